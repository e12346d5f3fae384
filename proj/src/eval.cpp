#include "chanest/eval.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "chanest/parallel.hpp"
#include "chanest/rng.hpp"

namespace chanest {

namespace {

struct SlotStats {
    scalar_t mse = 0.0;
    scalar_t ber = 0.0;
};

struct PointContext {
    const EvalSpec* spec = nullptr;
    const PowerDelayProfile* pdp = nullptr;
    scalar_t snr_db = 0.0;
    std::optional<CorrelationSet> corr;  // mmse_designed
    NoiseConfig noise;
};

SlotStats simulate_slot(const PointContext& ctx, std::uint64_t slot_seed) {
    const EvalSpec& spec = *ctx.spec;
    const OfdmConfig& cfg = spec.cfg;

    FadingSpec fading;
    fading.max_doppler = spec.doppler_max_hz;
    fading.quasi_static = spec.quasi_static;
    fading.n_sinusoids = spec.n_sinusoids;
    const ChannelRealization real = realize_channel(*ctx.pdp, fading, cfg, mix_seed(slot_seed, 2));

    const BitBlock bits = random_bits(2 * data_cell_count(cfg), mix_seed(slot_seed, 3));
    const std::uint64_t pilot_seed = mix_seed(slot_seed, 4);
    const ResourceGrid slot = build_slot(bits, cfg, pilot_seed);
    const cvec_t tx = ofdm_transmit(slot, cfg);
    const cvec_t rx = apply_channel(tx, real, ctx.snr_db, cfg, mix_seed(slot_seed, 5));
    const ResourceGrid rx_grid = ofdm_receive(rx, cfg);
    const ChannelMatrix h = freq_response(real, cfg);

    ChannelMatrix estimate;
    switch (spec.kind) {
        case EstimatorKind::perfect_csi: estimate = h; break;
        case EstimatorKind::ls_interp: {
            const PilotLsEstimate ls = ls_estimate(rx_grid, pilot_grid(cfg, pilot_seed), cfg);
            estimate = bilinear_interpolate(ls, cfg);
            break;
        }
        case EstimatorKind::mmse_designed: {
            const PilotLsEstimate ls = ls_estimate(rx_grid, pilot_grid(cfg, pilot_seed), cfg);
            estimate = mmse_estimate(ls, *ctx.corr, ctx.noise, cfg);
            break;
        }
        case EstimatorKind::simplenet: {
            const PilotLsEstimate ls = ls_estimate(rx_grid, pilot_grid(cfg, pilot_seed), cfg);
            estimate = forward(*spec.model, ls.values);
            break;
        }
    }

    SlotStats stats;
    if (spec.pilot_only) {
        scalar_t acc = 0.0;
        int count = 0;
        for (int l : cfg.dmrs.pilot_symbols_0based()) {
            for (int k : cfg.dmrs.pilot_subcarriers(cfg.n_subcarriers)) {
                acc += std::norm(estimate(k, l) - h(k, l));
                ++count;
            }
        }
        stats.mse = acc / static_cast<scalar_t>(count);
    } else {
        stats.mse = (estimate - h).squaredNorm() / static_cast<scalar_t>(h.size());
    }

    // zero-forcing equalization of the data cells, then hard QPSK decisions
    int errors = 0;
    int n_bits = 0;
    std::size_t bit_at = 0;
    for (int l = 0; l < cfg.n_symbols; ++l) {
        for (int k = 0; k < cfg.n_subcarriers; ++k) {
            if (slot.role(k, l) != CellRole::data) continue;
            const cx_t hkl = estimate(k, l);
            const cx_t eq = std::norm(hkl) > 1e-300 ? rx_grid.cells(k, l) / hkl : cx_t(0.0, 0.0);
            const std::uint8_t b0 = eq.real() < 0.0 ? 1 : 0;
            const std::uint8_t b1 = eq.imag() < 0.0 ? 1 : 0;
            errors += (b0 != bits[bit_at]) + (b1 != bits[bit_at + 1]);
            bit_at += 2;
            n_bits += 2;
        }
    }
    stats.ber = static_cast<scalar_t>(errors) / static_cast<scalar_t>(n_bits);
    return stats;
}

CurvePoint run_point(const PointContext& ctx, const std::string& x_kind, scalar_t x_value,
                     std::uint64_t point_seed) {
    const int n = ctx.spec->n_slots;
    const std::int64_t block = 32;
    const std::int64_t n_blocks = block_count(n, block);
    std::vector<scalar_t> mse1(static_cast<std::size_t>(n_blocks), 0.0),
        mse2(static_cast<std::size_t>(n_blocks), 0.0), ber1(static_cast<std::size_t>(n_blocks), 0.0),
        ber2(static_cast<std::size_t>(n_blocks), 0.0);
    parallel_blocks(n, block, [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
        scalar_t m1 = 0.0, m2 = 0.0, e1 = 0.0, e2 = 0.0;
        for (std::int64_t s = lo; s < hi; ++s) {
            const SlotStats st = simulate_slot(ctx, mix_seed(point_seed, static_cast<std::uint64_t>(s)));
            m1 += st.mse;
            m2 += st.mse * st.mse;
            e1 += st.ber;
            e2 += st.ber * st.ber;
        }
        mse1[static_cast<std::size_t>(b)] = m1;
        mse2[static_cast<std::size_t>(b)] = m2;
        ber1[static_cast<std::size_t>(b)] = e1;
        ber2[static_cast<std::size_t>(b)] = e2;
    });
    scalar_t m1 = 0.0, m2 = 0.0, e1 = 0.0, e2 = 0.0;
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        m1 += mse1[static_cast<std::size_t>(b)];
        m2 += mse2[static_cast<std::size_t>(b)];
        e1 += ber1[static_cast<std::size_t>(b)];
        e2 += ber2[static_cast<std::size_t>(b)];
    }
    const scalar_t fn = static_cast<scalar_t>(n);
    CurvePoint p;
    p.channel = ctx.pdp->name;
    p.x_kind = x_kind;
    p.x_value = x_value;
    p.n_slots = n;
    p.mse = m1 / fn;
    p.ber = e1 / fn;
    p.mse_stderr = std::sqrt(std::max(0.0, m2 / fn - p.mse * p.mse) / fn);
    p.ber_stderr = std::sqrt(std::max(0.0, e2 / fn - p.ber * p.ber) / fn);
    return p;
}

void validate_spec(const EvalSpec& spec) {
    spec.cfg.validate();
    if (spec.n_slots < 1) throw std::invalid_argument("EvalSpec: n_slots must be >= 1");
    if (spec.channels.empty()) throw std::invalid_argument("EvalSpec: no channels");
    if (spec.kind == EstimatorKind::mmse_designed && !spec.design_pdp)
        throw std::invalid_argument("EvalSpec: the MMSE estimator needs a design profile");
    if (spec.kind == EstimatorKind::simplenet) {
        if (!spec.model) throw std::invalid_argument("EvalSpec: no model loaded");
        const auto& shape = spec.model->shape;
        if (shape.out_rows != spec.cfg.n_subcarriers || shape.out_cols != spec.cfg.n_symbols ||
            shape.in_rows != spec.cfg.dmrs.n_pilot_subcarriers(spec.cfg.n_subcarriers) ||
            shape.in_cols != spec.cfg.dmrs.n_pilot_symbols())
            throw std::invalid_argument("EvalSpec: model geometry does not match the grid");
    }
}

}  // namespace

std::vector<CurvePoint> run_sweep(const EvalSpec& spec) {
    validate_spec(spec);
    if (spec.snr_grid_db.empty()) throw std::invalid_argument("EvalSpec: empty SNR grid");
    std::vector<CurvePoint> points;
    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
        PointContext ctx;
        ctx.spec = &spec;
        ctx.pdp = &spec.channels[c];
        if (spec.kind == EstimatorKind::mmse_designed)
            ctx.corr = correlation_from_pdp(*spec.design_pdp, spec.cfg);
        for (std::size_t s = 0; s < spec.snr_grid_db.size(); ++s) {
            ctx.snr_db = spec.snr_grid_db[s];
            ctx.noise = NoiseConfig::from_snr_db(ctx.snr_db);
            points.push_back(run_point(ctx, "snr_db", ctx.snr_db,
                                       mix_seed(spec.seed, static_cast<std::uint64_t>(c),
                                                static_cast<std::uint64_t>(s))));
        }
    }
    return points;
}

std::vector<CurvePoint> ds_sweep(const EvalSpec& spec, const PowerDelayProfile& tdl_model,
                                 const std::vector<scalar_t>& ds_grid_s, scalar_t snr_db) {
    EvalSpec local = spec;
    local.channels = {tdl_model};  // placeholder so validation passes
    validate_spec(local);
    if (ds_grid_s.empty()) throw std::invalid_argument("ds_sweep: empty delay-spread grid");

    std::vector<CurvePoint> points;
    for (std::size_t d = 0; d < ds_grid_s.size(); ++d) {
        const PowerDelayProfile scaled = scale_tdl(tdl_model, ds_grid_s[d]);
        PointContext ctx;
        ctx.spec = &local;
        ctx.pdp = &scaled;
        ctx.snr_db = snr_db;
        ctx.noise = NoiseConfig::from_snr_db(snr_db);
        if (local.kind == EstimatorKind::mmse_designed)
            ctx.corr = correlation_from_pdp(*local.design_pdp, local.cfg);
        CurvePoint p = run_point(ctx, "ds_ns", ds_grid_s[d] * 1e9,
                                 mix_seed(spec.seed, 0x6473ULL, static_cast<std::uint64_t>(d)));
        points.push_back(std::move(p));
    }
    return points;
}

std::optional<scalar_t> delta_snr(const std::vector<CurvePoint>& curve_a,
                                  const std::vector<CurvePoint>& curve_b, scalar_t target_ber) {
    if (target_ber <= 0.0) throw std::invalid_argument("delta_snr: target must be positive");
    const auto crossing = [&](const std::vector<CurvePoint>& curve) -> std::optional<scalar_t> {
        const scalar_t target_log = std::log10(target_ber);
        for (std::size_t i = 1; i < curve.size(); ++i) {
            const scalar_t b0 = curve[i - 1].ber;
            const scalar_t b1 = curve[i].ber;
            if (b0 <= 0.0 || b1 <= 0.0) {
                if (b0 > 0.0 && b1 <= 0.0 && b0 >= target_ber) {
                    // treat an exact-zero endpoint as below any positive target
                    return curve[i].x_value;
                }
                continue;
            }
            const scalar_t l0 = std::log10(b0);
            const scalar_t l1 = std::log10(b1);
            if ((l0 - target_log) * (l1 - target_log) <= 0.0 && l0 != l1) {
                const scalar_t w = (target_log - l0) / (l1 - l0);
                return curve[i - 1].x_value + w * (curve[i].x_value - curve[i - 1].x_value);
            }
        }
        return std::nullopt;
    };
    const auto a = crossing(curve_a);
    const auto b = crossing(curve_b);
    if (!a || !b) return std::nullopt;
    return *a - *b;
}

void write_csv(const std::vector<CurvePoint>& points, std::ostream& out) {
    out << "channel,x_kind,x_value,mse,mse_stderr,ber,ber_stderr,n_slots\n";
    char buf[256];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%.10g,%.10g,%.10g,%.10g,%d\n",
                      p.channel.c_str(), p.x_kind.c_str(), p.x_value, p.mse, p.mse_stderr, p.ber,
                      p.ber_stderr, p.n_slots);
        out << buf;
    }
}

}  // namespace chanest
