#include "chanest/registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chanest {

namespace {

PowerDelayProfile make_pdp(std::string name, std::vector<scalar_t> delays_us,
                           std::vector<scalar_t> gains_db) {
    PowerDelayProfile pdp;
    pdp.name = std::move(name);
    pdp.delays_s = Eigen::Map<vec_t>(delays_us.data(), static_cast<Eigen::Index>(delays_us.size()));
    pdp.delays_s *= 1e-6;
    pdp.gains_db = Eigen::Map<vec_t>(gains_db.data(), static_cast<Eigen::Index>(gains_db.size()));
    return pdp;
}

PowerDelayProfile fixed_profile(std::uint32_t id) {
    switch (id) {
        case 0: return make_pdp("flat", {0.0}, {0.0});
        case 1:
            return make_pdp("EPA", {0.0, 0.03, 0.07, 0.09, 0.11, 0.19, 0.41},
                            {0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8});
        case 2:
            return make_pdp("EVA", {0.0, 0.03, 0.15, 0.31, 0.37, 0.71, 1.09, 1.73, 2.51},
                            {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9});
        case 3:
            return make_pdp("ETU", {0.0, 0.05, 0.12, 0.2, 0.23, 0.5, 1.6, 2.3, 5.0},
                            {-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0});
        case 4:
            return make_pdp("DC1", {0.0, 0.05, 0.1, 0.2, 0.4}, {0.0, -2.0, -4.0, -8.0, -16.0});
        case 5:
            return make_pdp("DC2", {0.0, 0.03, 0.2, 0.3, 0.5, 1.5, 2.5, 5.0},
                            {-7.0, 0.0, 0.0, -1.0, -2.0, -1.0, -1.0, -5.5});
        case 6:
            return make_pdp("DC3", {0.0, 0.05, 0.12, 0.2, 0.23, 0.5, 1.6, 2.3, 5.0, 7.0},
                            {0.0, -1.0, -1.0, -1.0, -1.0, -1.5, -1.5, -1.5, -3.0, -5.0});
        case 7: return make_pdp("two-path", {0.05, 5.0}, {-3.0, -3.0});
        case 8:
            return make_pdp("designed", {0.0, 0.03, 0.2, 0.3, 0.5, 1.5, 2.5, 5.0, 7.0, 9.0},
                            {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0, -1.0, -2.0, -3.0});
        case 9:
            return make_pdp("additional-1", {0.0, 0.05, 0.12, 0.2, 0.5, 1.0, 1.6},
                            {-7.0, -3.0, -14.0, 0.0, -12.0, -5.0, -9.0});
        case 10:
            return make_pdp("additional-2", {0.0, 0.05, 0.12, 0.2, 0.23, 0.5, 1.6, 2.3, 5.0, 7.0},
                            {0.0, -14.0, -15.0, -1.0, -5.0, -1.0, -15.0, -10.0, -10.0, -5.0});
        default: throw std::logic_error("fixed_profile: bad id");
    }
}

}  // namespace

const std::vector<std::string>& registry_names() {
    static const std::vector<std::string> names = {
        "flat",     "EPA",          "EVA",          "ETU", "DC1",   "DC2",   "DC3",
        "two-path", "designed",     "additional-1", "additional-2",
        "CE",       "TDL-A",        "TDL-B"};
    return names;
}

std::uint32_t pdp_id(const std::string& name) {
    const auto& names = registry_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<std::uint32_t>(i);
    return kCustomPdpId;
}

namespace {

PowerDelayProfile sort_by_delay(PowerDelayProfile pdp) {
    std::vector<int> order(static_cast<std::size_t>(pdp.n_paths()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pdp.delays_s(a) < pdp.delays_s(b); });
    PowerDelayProfile sorted = pdp;
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.delays_s(static_cast<Eigen::Index>(i)) = pdp.delays_s(order[i]);
        sorted.gains_db(static_cast<Eigen::Index>(i)) = pdp.gains_db(order[i]);
    }
    return sorted;
}

// delays are dimensionless (per unit of desired delay spread); the source
// tables list taps out of delay order, so sort here
PowerDelayProfile make_normalized(std::string name, std::vector<scalar_t> delays,
                                  std::vector<scalar_t> gains_db) {
    PowerDelayProfile pdp = make_pdp(std::move(name), std::move(delays), std::move(gains_db));
    pdp.delays_s *= 1e6;  // undo the microsecond conversion
    return sort_by_delay(pdp);
}

}  // namespace

PowerDelayProfile tdl_a_normalized() {
    return make_normalized(
        "TDL-A",
        {0.0,    0.3819, 0.4025, 0.5868, 0.4610, 0.5375, 0.6708, 0.5750, 0.7618, 1.5375, 1.8978,
         2.2242, 2.1718, 2.4942, 2.5119, 3.0582, 4.0810, 4.4579, 4.5695, 4.7966, 5.0066, 5.3043,
         9.6586},
        {-13.4, 0.0,   -2.2,  -4.0,  -6.0,  -8.2,  -9.9,  -10.5, -7.5,  -15.9, -6.6, -16.7,
         -12.4, -15.2, -10.8, -11.3, -12.7, -16.2, -18.3, -18.9, -16.6, -19.9, -29.7});
}

PowerDelayProfile tdl_b_normalized() {
    return make_normalized(
        "TDL-B",
        {0.0,    0.1072, 0.2155, 0.2095, 0.2870, 0.2986, 0.3752, 0.5055, 0.3681, 0.3697, 0.5700,
         0.5283, 1.1021, 1.2756, 1.5474, 1.7842, 2.0169, 2.8294, 3.0219, 3.6187, 4.1067, 4.2790,
         4.7834},
        {0.0,  -2.2, -4.0,  -3.2, -9.8,  -1.2,  -3.4, -5.2,  -7.6,  -3.0,  -8.9, -9.0,
         -4.8, -5.7, -7.5,  -1.9, -7.6,  -12.2, -9.8, -11.4, -14.9, -9.2,  -11.3});
}

PowerDelayProfile load_pdp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open PDP file: " + path);
    std::vector<scalar_t> delays_us, gains_db;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        scalar_t d, g;
        if (ls >> d >> g) {
            delays_us.push_back(d);
            gains_db.push_back(g);
        }
    }
    if (delays_us.empty()) throw std::invalid_argument("PDP file has no '<delay_us> <gain_db>' lines: " + path);
    PowerDelayProfile pdp = make_pdp(path, delays_us, gains_db);
    pdp.validate();
    return pdp;
}

PowerDelayProfile resolve_pdp(const std::string& name, const OfdmConfig& cfg,
                              const PdpOptions& opts) {
    const std::uint32_t id = pdp_id(name);
    if (id <= 10) return fixed_profile(id);
    if (name == "CE") {
        const scalar_t zeta = opts.zeta_s.value_or(ce_default_zeta(cfg));
        return ce_channel(cfg, zeta);
    }
    if (name == "TDL-A" || name == "TDL-B") {
        if (!opts.ds_desired_s)
            throw std::invalid_argument(name + " requires a desired delay spread (--ds-ns)");
        const PowerDelayProfile base = name == "TDL-A" ? tdl_a_normalized() : tdl_b_normalized();
        return scale_tdl(base, *opts.ds_desired_s);
    }
    std::ifstream probe(name);
    if (probe.good()) return load_pdp_file(name);

    std::string msg = "unknown PDP '" + name + "'; valid names:";
    for (const auto& n : registry_names()) msg += " " + n;
    msg += ", or a path to a '<delay_us> <gain_db>' text file";
    throw std::invalid_argument(msg);
}

std::string registry_listing(const OfdmConfig& cfg) {
    std::ostringstream out;
    for (const auto& name : registry_names()) {
        const bool tdl = name == "TDL-A" || name == "TDL-B";
        PowerDelayProfile pdp;
        if (tdl) {
            pdp = name == "TDL-A" ? tdl_a_normalized() : tdl_b_normalized();
            out << name << " (normalized delays, scale by --ds-ns): [";
        } else {
            pdp = resolve_pdp(name, cfg, {});
            out << name << ": delays_us = [";
        }
        for (Eigen::Index i = 0; i < pdp.delays_s.size(); ++i) {
            if (i) out << " ";
            out << (tdl ? pdp.delays_s(i) : pdp.delays_s(i) * 1e6);
        }
        out << "], gains_db = [";
        for (Eigen::Index i = 0; i < pdp.gains_db.size(); ++i) {
            if (i) out << " ";
            out << pdp.gains_db(i);
        }
        out << "]\n";
    }
    return out.str();
}

}  // namespace chanest
