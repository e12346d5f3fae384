#include "chanest/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "chanest/estimators.hpp"
#include "chanest/parallel.hpp"
#include "chanest/rng.hpp"

namespace chanest {

namespace {

constexpr char kMagic[4] = {'C', 'E', 'D', 'S'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("dataset file truncated");
    return v;
}

void write_cmat_f32(std::ostream& out, const cmat_t& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            write_pod<float>(out, static_cast<float>(m(r, c).real()));
            write_pod<float>(out, static_cast<float>(m(r, c).imag()));
        }
    }
}

cmat_t read_cmat_f32(std::istream& in, int rows, int cols) {
    cmat_t m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const float re = read_pod<float>(in);
            const float im = read_pod<float>(in);
            m(r, c) = cx_t(re, im);
        }
    }
    return m;
}

DatasetSample generate_sample(const DatasetSpec& spec, std::uint64_t sample_seed) {
    const OfdmConfig& cfg = spec.cfg;
    Rng draw(mix_seed(sample_seed, 1));
    const scalar_t snr_db = draw.uniform(spec.snr_min_db, spec.snr_max_db);

    FadingSpec fading;
    fading.max_doppler = spec.doppler_max_hz;
    fading.n_sinusoids = spec.n_sinusoids;
    const ChannelRealization real = realize_channel(spec.pdp, fading, cfg, mix_seed(sample_seed, 2));

    const BitBlock bits = random_bits(2 * data_cell_count(cfg), mix_seed(sample_seed, 3));
    const std::uint64_t pilot_seed = mix_seed(sample_seed, 4);
    const ResourceGrid slot = build_slot(bits, cfg, pilot_seed);
    const cvec_t tx = ofdm_transmit(slot, cfg);
    const cvec_t rx = apply_channel(tx, real, snr_db, cfg, mix_seed(sample_seed, 5));
    const ResourceGrid rx_grid = ofdm_receive(rx, cfg);
    const PilotLsEstimate ls = ls_estimate(rx_grid, pilot_grid(cfg, pilot_seed), cfg);

    DatasetSample sample;
    sample.feature = ls.values;
    sample.label = freq_response(real, cfg);
    sample.snr_db = static_cast<float>(snr_db);
    sample.doppler_hz = static_cast<float>(real.doppler_hz);
    sample.pdp_id = spec.pdp_id;
    sample.seed = sample_seed;
    return sample;
}

}  // namespace

void DatasetSpec::validate() const {
    cfg.validate();
    pdp.validate();
    if (n_samples < 1) throw std::invalid_argument("DatasetSpec: n_samples must be >= 1");
    if (snr_min_db > snr_max_db) throw std::invalid_argument("DatasetSpec: snr_min > snr_max");
    if (doppler_min_hz != 0.0)
        throw std::invalid_argument("DatasetSpec: only a zero Doppler minimum is supported");
    if (doppler_max_hz < 0.0) throw std::invalid_argument("DatasetSpec: negative doppler_max");
    if (!(split > 0.0 && split <= 1.0)) throw std::invalid_argument("DatasetSpec: split outside (0, 1]");
    if (pdp.max_delay_s() > cfg.cp_duration())
        throw std::invalid_argument("DatasetSpec: profile '" + pdp.name +
                                    "' has paths beyond the CP duration");
}

std::pair<int, int> split_counts(int n, scalar_t split) {
    const int train = static_cast<int>(std::floor(static_cast<scalar_t>(n) * split));
    return {train, n - train};
}

Dataset generate_dataset(const DatasetSpec& spec) {
    spec.validate();
    Dataset ds;
    ds.cfg = spec.cfg;
    ds.snr_min_db = static_cast<float>(spec.snr_min_db);
    ds.snr_max_db = static_cast<float>(spec.snr_max_db);
    ds.doppler_min_hz = static_cast<float>(spec.doppler_min_hz);
    ds.doppler_max_hz = static_cast<float>(spec.doppler_max_hz);
    ds.master_seed = spec.master_seed;
    ds.samples.resize(static_cast<std::size_t>(spec.n_samples));

    parallel_blocks(spec.n_samples, 32, [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            ds.samples[static_cast<std::size_t>(i)] =
                generate_sample(spec, mix_seed(spec.master_seed, static_cast<std::uint64_t>(i)));
        }
    });
    return ds;
}

Dataset mix_datasets(const std::vector<std::pair<DatasetSpec, scalar_t>>& specs) {
    if (specs.empty()) throw std::invalid_argument("mix_datasets: empty spec list");
    scalar_t weight_sum = 0.0;
    int n_total = 0;
    for (const auto& [spec, w] : specs) {
        spec.validate();
        if (w < 0.0) throw std::invalid_argument("mix_datasets: negative weight");
        weight_sum += w;
        n_total += spec.n_samples;
        if (spec.cfg.n_subcarriers != specs.front().first.cfg.n_subcarriers ||
            spec.cfg.n_symbols != specs.front().first.cfg.n_symbols ||
            spec.cfg.dmrs.subcarrier_stride != specs.front().first.cfg.dmrs.subcarrier_stride ||
            spec.cfg.dmrs.n_pilot_symbols() != specs.front().first.cfg.dmrs.n_pilot_symbols())
            throw std::invalid_argument("mix_datasets: incompatible grid dimensions across specs");
    }
    if (std::abs(weight_sum - 1.0) > 1e-9)
        throw std::invalid_argument("mix_datasets: weights must sum to 1");

    // largest-remainder allocation of the total across specs
    const std::size_t k = specs.size();
    std::vector<int> counts(k, 0);
    std::vector<std::pair<scalar_t, std::size_t>> remainders(k);
    int assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const scalar_t exact = specs[i].second * static_cast<scalar_t>(n_total);
        counts[i] = static_cast<int>(std::floor(exact));
        remainders[i] = {exact - std::floor(exact), i};
        assigned += counts[i];
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int r = 0; r < n_total - assigned; ++r) counts[remainders[static_cast<std::size_t>(r)].second]++;

    // smallest-quota-first interleave
    std::vector<std::size_t> order;
    order.reserve(static_cast<std::size_t>(n_total));
    std::vector<int> taken(k, 0);
    for (int i = 0; i < n_total; ++i) {
        std::size_t best = k;
        scalar_t best_ratio = 0.0;
        for (std::size_t s = 0; s < k; ++s) {
            if (taken[s] >= counts[s]) continue;
            const scalar_t ratio = (static_cast<scalar_t>(taken[s]) + 1.0) /
                                   static_cast<scalar_t>(counts[s]);
            if (best == k || ratio < best_ratio) {
                best = s;
                best_ratio = ratio;
            }
        }
        order.push_back(best);
        taken[static_cast<std::size_t>(best)]++;
    }

    Dataset ds;
    const DatasetSpec& first = specs.front().first;
    ds.cfg = first.cfg;
    ds.snr_min_db = static_cast<float>(first.snr_min_db);
    ds.snr_max_db = static_cast<float>(first.snr_max_db);
    ds.doppler_min_hz = static_cast<float>(first.doppler_min_hz);
    ds.doppler_max_hz = static_cast<float>(first.doppler_max_hz);
    ds.master_seed = first.master_seed;
    ds.samples.resize(static_cast<std::size_t>(n_total));

    std::vector<std::pair<std::size_t, int>> jobs;  // (spec index, sub index)
    jobs.reserve(static_cast<std::size_t>(n_total));
    std::vector<int> sub(k, 0);
    for (std::size_t s : order) jobs.emplace_back(s, sub[s]++);

    parallel_blocks(n_total, 32, [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            const auto [spec_idx, sub_idx] = jobs[static_cast<std::size_t>(i)];
            const DatasetSpec& spec = specs[spec_idx].first;
            ds.samples[static_cast<std::size_t>(i)] = generate_sample(
                spec, mix_seed(spec.master_seed, static_cast<std::uint64_t>(sub_idx)));
        }
    });
    return ds;
}

std::size_t dataset_header_size() { return 4 + 2 + 2 + 4 * 4 + 4 * 4 + 8 + 8; }

std::size_t dataset_record_size(const OfdmConfig& cfg) {
    const std::size_t feature = static_cast<std::size_t>(
        cfg.dmrs.n_pilot_subcarriers(cfg.n_subcarriers) * cfg.dmrs.n_pilot_symbols() * 8);
    const std::size_t label = static_cast<std::size_t>(cfg.n_subcarriers * cfg.n_symbols * 8);
    return feature + label + 4 + 4 + 4 + 8;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, 4);
    write_pod<std::uint16_t>(out, kVersion);
    write_pod<std::uint16_t>(out, static_cast<std::uint16_t>(ds.cfg.dmrs.id));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ds.cfg.n_subcarriers));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ds.cfg.n_symbols));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ds.cfg.dmrs.subcarrier_stride));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ds.cfg.dmrs.n_pilot_symbols()));
    write_pod<float>(out, ds.snr_min_db);
    write_pod<float>(out, ds.snr_max_db);
    write_pod<float>(out, ds.doppler_min_hz);
    write_pod<float>(out, ds.doppler_max_hz);
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(ds.samples.size()));
    write_pod<std::uint64_t>(out, ds.master_seed);
    for (const auto& s : ds.samples) {
        write_cmat_f32(out, s.feature);
        write_cmat_f32(out, s.label);
        write_pod<float>(out, s.snr_db);
        write_pod<float>(out, s.doppler_hz);
        write_pod<std::uint32_t>(out, s.pdp_id);
        write_pod<std::uint64_t>(out, s.seed);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad dataset magic in " + path + " (expected \"CEDS\")");
    const auto version = read_pod<std::uint16_t>(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported dataset version " + std::to_string(version));
    const auto pattern_id = read_pod<std::uint16_t>(in);

    Dataset ds;
    ds.cfg = OfdmConfig::make_default();
    ds.cfg.dmrs = pattern_id == 0 ? PilotPattern::make_default() : PilotPattern::make_alternative();
    ds.cfg.n_subcarriers = static_cast<int>(read_pod<std::uint32_t>(in));
    ds.cfg.n_symbols = static_cast<int>(read_pod<std::uint32_t>(in));
    const int stride = static_cast<int>(read_pod<std::uint32_t>(in));
    const int n_pilot = static_cast<int>(read_pod<std::uint32_t>(in));
    if (stride != ds.cfg.dmrs.subcarrier_stride || n_pilot != ds.cfg.dmrs.n_pilot_symbols())
        throw std::runtime_error("dataset pilot geometry does not match its pattern id");
    ds.snr_min_db = read_pod<float>(in);
    ds.snr_max_db = read_pod<float>(in);
    ds.doppler_min_hz = read_pod<float>(in);
    ds.doppler_max_hz = read_pod<float>(in);
    const auto n_samples = read_pod<std::uint64_t>(in);
    ds.master_seed = read_pod<std::uint64_t>(in);

    const int n_psc = ds.cfg.dmrs.n_pilot_subcarriers(ds.cfg.n_subcarriers);
    ds.samples.resize(n_samples);
    for (auto& s : ds.samples) {
        s.feature = read_cmat_f32(in, n_psc, n_pilot);
        s.label = read_cmat_f32(in, ds.cfg.n_subcarriers, ds.cfg.n_symbols);
        s.snr_db = read_pod<float>(in);
        s.doppler_hz = read_pod<float>(in);
        s.pdp_id = read_pod<std::uint32_t>(in);
        s.seed = read_pod<std::uint64_t>(in);
    }
    in.peek();
    if (!in.eof()) throw std::runtime_error("trailing bytes after the last record in " + path);
    return ds;
}

}  // namespace chanest
