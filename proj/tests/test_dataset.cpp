#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "chanest/dataset.hpp"
#include "chanest/rng.hpp"
#include "chanest/sha256.hpp"
#include "helpers.hpp"

using namespace chanest;

namespace {

DatasetSpec ce_spec(int n, std::uint64_t seed) {
    DatasetSpec spec;
    spec.cfg = OfdmConfig::make_default();
    spec.pdp = resolve_pdp("CE", spec.cfg, {});
    spec.pdp_id = pdp_id("CE");
    spec.n_samples = n;
    spec.master_seed = seed;
    return spec;
}

std::string temp_path(const char* name) {
    return std::string("/tmp/chanest_test_") + name;
}

}  // namespace

TEST_CASE("split arithmetic") {
    CHECK(split_counts(125000, 0.95) == std::pair<int, int>(118750, 6250));
    CHECK(split_counts(10, 1.0) == std::pair<int, int>(10, 0));
    CHECK(split_counts(3, 0.5) == std::pair<int, int>(1, 2));
}

TEST_CASE("generation is deterministic and rejects long profiles") {
    const Dataset a = generate_dataset(ce_spec(12, 77));
    const Dataset b = generate_dataset(ce_spec(12, 77));
    REQUIRE(a.size() == 12);
    for (int i = 0; i < a.size(); ++i) {
        CHECK((a.samples[i].feature - b.samples[i].feature).norm() == 0.0);
        CHECK((a.samples[i].label - b.samples[i].label).norm() == 0.0);
        CHECK(a.samples[i].seed == b.samples[i].seed);
    }
    const Dataset c = generate_dataset(ce_spec(12, 78));
    CHECK((a.samples[0].feature - c.samples[0].feature).norm() > 0.0);

    DatasetSpec bad = ce_spec(4, 1);
    bad.pdp = resolve_pdp("TDL-A", bad.cfg, {.zeta_s = {}, .ds_desired_s = 2000e-9});
    CHECK_THROWS(generate_dataset(bad));
}

TEST_CASE("labels keep their energy inside the cyclic extension") {
    const OfdmConfig cfg = OfdmConfig::make_default();
    const Dataset ds = generate_dataset(ce_spec(40, 3));
    FadingSpec fading;
    scalar_t mean_ratio = 0.0;
    for (const auto& sample : ds.samples) {
        const ChannelRealization real =
            realize_channel(resolve_pdp("CE", cfg, {}), fading, cfg, mix_seed(sample.seed, 2));
        const cvec_t taps = sampled_taps(real, cfg, 0);
        scalar_t near = 0.0;
        for (int n = 0; n < cfg.n_subcarriers; ++n) {
            const int dist = std::min(n, cfg.n_subcarriers - n);
            if (dist <= cfg.cyclic_ext()) near += std::norm(taps(n));
        }
        const scalar_t ratio = near / taps.squaredNorm();
        CHECK(ratio > 0.95);  // single draws fluctuate around the ensemble value
        mean_ratio += ratio;
    }
    CHECK(mean_ratio / ds.size() > 0.99);
}

TEST_CASE("feature equals label plus pilot noise of the drawn variance") {
    const Dataset ds = generate_dataset(ce_spec(400, 9));
    const OfdmConfig& cfg = ds.cfg;
    const auto pilot_sc = cfg.dmrs.pilot_subcarriers(cfg.n_subcarriers);
    const auto pilot_sym = cfg.dmrs.pilot_symbols_0based();
    scalar_t ratio_sum = 0.0;
    for (const auto& sample : ds.samples) {
        const scalar_t rho = std::pow(10.0, -static_cast<scalar_t>(sample.snr_db) / 10.0);
        scalar_t err = 0.0;
        for (std::size_t j = 0; j < pilot_sym.size(); ++j)
            for (std::size_t i = 0; i < pilot_sc.size(); ++i)
                err += std::norm(sample.feature(i, j) - sample.label(pilot_sc[i], pilot_sym[j]));
        err /= static_cast<scalar_t>(pilot_sc.size() * pilot_sym.size());
        ratio_sum += err / rho;
    }
    CHECK(ratio_sum / ds.size() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("snr and doppler marginals are uniform") {
    DatasetSpec spec = ce_spec(5000, 123);
    const Dataset ds = generate_dataset(spec);
    std::vector<scalar_t> snr, doppler;
    for (const auto& s : ds.samples) {
        snr.push_back(s.snr_db);
        doppler.push_back(s.doppler_hz);
    }
    CHECK(testutil::ks_uniform(snr, spec.snr_min_db, spec.snr_max_db) <
          testutil::ks_crit_01(snr.size()));
    CHECK(testutil::ks_uniform(doppler, 0.0, spec.doppler_max_hz) <
          testutil::ks_crit_01(doppler.size()));
}

TEST_CASE("mixture allocation and interleave") {
    std::vector<std::pair<DatasetSpec, scalar_t>> specs;
    const char* names[5] = {"flat", "EPA", "ETU", "two-path", "DC1"};
    for (int i = 0; i < 5; ++i) {
        DatasetSpec spec = ce_spec(200, 55 + i);
        spec.pdp = resolve_pdp(names[i], spec.cfg, {});
        spec.pdp_id = pdp_id(names[i]);
        specs.emplace_back(spec, 0.2);
    }
    const Dataset mixed = mix_datasets(specs);
    REQUIRE(mixed.size() == 1000);
    std::map<std::uint32_t, int> counts;
    for (const auto& s : mixed.samples) counts[s.pdp_id]++;
    for (int i = 0; i < 5; ++i) CHECK(counts[pdp_id(names[i])] == 200);
    // interleaved: every window of 5 holds all five sources
    for (int w = 0; w < 1000; w += 5) {
        std::set<std::uint32_t> seen;
        for (int i = 0; i < 5; ++i) seen.insert(mixed.samples[w + i].pdp_id);
        CHECK(seen.size() == 5);
    }

    // single spec at weight 1 reproduces generate_dataset
    const Dataset single = mix_datasets({{ce_spec(20, 5), 1.0}});
    const Dataset direct = generate_dataset(ce_spec(20, 5));
    for (int i = 0; i < 20; ++i)
        CHECK((single.samples[i].label - direct.samples[i].label).norm() == 0.0);

    CHECK_THROWS(mix_datasets({}));
    auto bad = specs;
    bad[1].first.cfg.n_subcarriers = 36;
    bad[1].first.cfg.sample_period = bad[1].first.cfg.nominal_sample_period();
    CHECK_THROWS(mix_datasets(bad));
    auto badw = specs;
    badw[0].second = 0.5;
    CHECK_THROWS(mix_datasets(badw));
}

TEST_CASE("alternative pilot pattern flows through generation") {
    DatasetSpec spec = ce_spec(30, 12);
    spec.cfg = OfdmConfig::make_alternative();
    const Dataset ds = generate_dataset(spec);
    REQUIRE(ds.size() == 30);
    CHECK(ds.samples[0].feature.rows() == 24);  // stride 3 over 72 subcarriers
    CHECK(ds.samples[0].feature.cols() == 4);
    // pilot consistency holds for this pattern too
    const auto pilot_sc = spec.cfg.dmrs.pilot_subcarriers(spec.cfg.n_subcarriers);
    const auto pilot_sym = spec.cfg.dmrs.pilot_symbols_0based();
    scalar_t ratio = 0.0;
    for (const auto& s : ds.samples) {
        const scalar_t rho = std::pow(10.0, -static_cast<scalar_t>(s.snr_db) / 10.0);
        scalar_t err = 0.0;
        for (std::size_t j = 0; j < pilot_sym.size(); ++j)
            for (std::size_t i = 0; i < pilot_sc.size(); ++i)
                err += std::norm(s.feature(i, j) - s.label(pilot_sc[i], pilot_sym[j]));
        ratio += err / (pilot_sc.size() * pilot_sym.size()) / rho;
    }
    CHECK(ratio / ds.size() == doctest::Approx(1.0).epsilon(0.2));

    // round trip keeps the pattern
    const std::string path = temp_path("alt.ceds");
    save_dataset(ds, path);
    const Dataset loaded = load_dataset(path);
    CHECK(loaded.cfg.dmrs.id == PilotPattern::Id::alternative);
    CHECK(loaded.cfg.dmrs.subcarrier_stride == 3);
    std::remove(path.c_str());
}

TEST_CASE("file round trip, sizes, and corruption") {
    const Dataset ds = generate_dataset(ce_spec(100, 2024));
    const std::string path = temp_path("roundtrip.ceds");
    save_dataset(ds, path);

    // exact size: header + n * record
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    const auto size = static_cast<std::size_t>(in.tellg());
    CHECK(size == dataset_header_size() + 100 * dataset_record_size(ds.cfg));

    const Dataset loaded = load_dataset(path);
    const std::string path2 = temp_path("roundtrip2.ceds");
    save_dataset(loaded, path2);
    CHECK(sha256_file(path) == sha256_file(path2));
    CHECK(loaded.master_seed == ds.master_seed);
    CHECK(loaded.size() == ds.size());

    // corrupt the magic
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.write("XXXX", 4);
    f.close();
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("CEDS"), std::runtime_error);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}
