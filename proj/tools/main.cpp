#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chanest/dataset.hpp"
#include "chanest/eval.hpp"
#include "chanest/manifest.hpp"
#include "chanest/parallel.hpp"
#include "chanest/registry.hpp"
#include "chanest/rng.hpp"
#include "chanest/robustness.hpp"
#include "chanest/simplenet.hpp"
#include "chanest/svg.hpp"

namespace {

using namespace chanest;

struct GridFlags {
    int nf = 72;
    int ns = 14;
    int cp = 10;
    int impl_delay = 7;
    std::string pattern = "default";
    double sample_period = 9.3897e-7;

    void attach(CLI::App* cmd) {
        cmd->add_option("--nf", nf, "Subcarriers per symbol");
        cmd->add_option("--ns", ns, "OFDM symbols per slot");
        cmd->add_option("--cp", cp, "Cyclic prefix length in samples");
        cmd->add_option("--impl-delay", impl_delay, "Extra guard samples in the cyclic extension");
        cmd->add_option("--pattern", pattern, "Pilot pattern: default | alt")
            ->check(CLI::IsMember({"default", "alt"}));
        cmd->add_option("--sample-period", sample_period, "Sample period in seconds");
    }

    OfdmConfig build() const {
        OfdmConfig cfg;
        cfg.n_subcarriers = nf;
        cfg.n_symbols = ns;
        cfg.cp_len = cp;
        cfg.impl_delay = impl_delay;
        cfg.sample_period = sample_period;
        cfg.dmrs = pattern == "alt" ? PilotPattern::make_alternative() : PilotPattern::make_default();
        cfg.validate();
        return cfg;
    }
};

std::vector<double> parse_grid(const std::string& text) {
    // "a:step:b" inclusive range, or a comma-separated list
    std::vector<double> out;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        double a = 0, step = 0, b = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &step, &b) != 3 || step <= 0)
            throw std::invalid_argument("grid '" + text + "': expected start:step:stop");
        for (double v = a; v <= b + 1e-9; v += step) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("grid '" + text + "': empty value list");
    return out;
}

std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct GenerateArgs {
    std::string pdp = "CE";
    int n = 1000;
    double snr_min = 5.0, snr_max = 25.0;
    double doppler_max = 97.0;
    std::uint64_t seed = 0;
    std::string out;
    double zeta_us = 0.0;  // 0 = default spacing
    double ds_ns = 0.0;
    GridFlags grid;
};

int cmd_generate(const GenerateArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    const OfdmConfig cfg = args.grid.build();
    PdpOptions opts;
    if (args.zeta_us > 0.0) opts.zeta_s = args.zeta_us * 1e-6;
    if (args.ds_ns > 0.0) opts.ds_desired_s = args.ds_ns * 1e-9;

    const std::vector<std::string> pdp_names = split_names(args.pdp);
    const auto make_spec = [&](const std::string& name, int n, std::uint64_t seed) {
        DatasetSpec spec;
        spec.cfg = cfg;
        spec.pdp = resolve_pdp(name, cfg, opts);
        spec.pdp_id = pdp_id(name);
        spec.n_samples = n;
        spec.snr_min_db = args.snr_min;
        spec.snr_max_db = args.snr_max;
        spec.doppler_max_hz = args.doppler_max;
        spec.master_seed = seed;
        return spec;
    };

    Dataset ds;
    if (pdp_names.size() <= 1) {
        ds = generate_dataset(make_spec(args.pdp, args.n, args.seed));
    } else {
        // several names: an equal mixture over the listed profiles
        const int k = static_cast<int>(pdp_names.size());
        std::vector<std::pair<DatasetSpec, scalar_t>> specs;
        for (int i = 0; i < k; ++i) {
            const int share = args.n / k + (i < args.n % k ? 1 : 0);
            specs.emplace_back(make_spec(pdp_names[static_cast<std::size_t>(i)], share,
                                         mix_seed(args.seed, 1000 + static_cast<std::uint64_t>(i))),
                               1.0 / k);
        }
        ds = mix_datasets(specs);
    }
    save_dataset(ds, args.out);

    RunManifest manifest;
    manifest.command = "generate";
    manifest.threads = thread_count();
    manifest.add("pdp", args.pdp);
    manifest.add("n", static_cast<std::int64_t>(args.n));
    manifest.add("snr_min_db", args.snr_min);
    manifest.add("snr_max_db", args.snr_max);
    manifest.add("doppler_max_hz", args.doppler_max);
    manifest.add("seed", args.seed);
    manifest.add("pattern", args.grid.pattern);
    manifest.add("nf", static_cast<std::int64_t>(cfg.n_subcarriers));
    manifest.add("ns", static_cast<std::int64_t>(cfg.n_symbols));
    manifest.add("cp", static_cast<std::int64_t>(cfg.cp_len));
    manifest.add("impl_delay", static_cast<std::int64_t>(cfg.impl_delay));
    manifest.add("sample_period_s", cfg.sample_period);
    if (args.zeta_us > 0.0) manifest.add("zeta_us", args.zeta_us);
    if (args.ds_ns > 0.0) manifest.add("ds_ns", args.ds_ns);
    manifest.outputs = {args.out};
    manifest.wall_clock_sec = elapsed_since(t0);
    manifest.write(args.out + ".manifest.json");

    std::cout << "wrote " << ds.size() << " samples to " << args.out << "\n";
    return 0;
}

struct TrainArgs {
    std::string data;
    std::string out;
    int epochs = 100;
    double lr = 0.002;
    int drop_period = 20;
    double drop_factor = 0.5;
    int batch = 128;
    double split = 0.95;
    std::uint64_t seed = 0;
    bool resize_last = false;
};

int cmd_train(const TrainArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset ds = load_dataset(args.data);

    TrainConfig cfg;
    cfg.max_epochs = args.epochs;
    cfg.initial_lr = args.lr;
    cfg.lr_drop_period = args.drop_period;
    cfg.lr_drop_factor = args.drop_factor;
    cfg.minibatch = args.batch;
    cfg.split = args.split;
    cfg.seed = args.seed;
    cfg.resize_first = !args.resize_last;

    const TrainResult result = train(ds, cfg);
    save_model(result.params, args.out);

    const std::string log_path = args.out + ".log.csv";
    {
        std::ofstream log(log_path, std::ios::trunc);
        log << "epoch,lr,train_loss,val_mse\n";
        char buf[160];
        for (std::size_t e = 0; e < result.log.train_loss.size(); ++e) {
            std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g\n", e, result.log.lr[e],
                          result.log.train_loss[e], result.log.val_mse[e]);
            log << buf;
        }
    }
    if (result.log.aborted_non_finite)
        std::cerr << "warning: training diverged; kept the last finite parameters\n";

    RunManifest manifest;
    manifest.command = "train";
    manifest.threads = thread_count();
    manifest.add("data", args.data);
    manifest.add("epochs", static_cast<std::int64_t>(args.epochs));
    manifest.add("lr", args.lr);
    manifest.add("drop_period", static_cast<std::int64_t>(args.drop_period));
    manifest.add("drop_factor", args.drop_factor);
    manifest.add("batch", static_cast<std::int64_t>(args.batch));
    manifest.add("split", args.split);
    manifest.add("seed", args.seed);
    manifest.add("resize_first", args.resize_last ? "false" : "true");
    manifest.inputs = {args.data};
    manifest.outputs = {args.out, log_path};
    manifest.wall_clock_sec = elapsed_since(t0);
    manifest.write(args.out + ".manifest.json");

    const double final_val = result.log.val_mse.empty() ? 0.0 : result.log.val_mse.back();
    std::cout << "trained " << result.params.param_count() << " parameters for "
              << result.log.train_loss.size() << " epochs; final val mse " << final_val << "\n";
    return 0;
}

struct EvalArgs {
    std::string estimator = "ls";
    std::string model;
    std::string design = "CE";
    std::string channels = "flat";
    std::string snr = "0:5:30";
    std::string ds;
    int slots = 5000;
    double doppler_max = 97.0;
    bool quasi_static = false;
    bool pilot_only = false;
    double target_ber = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string svg;
    double zeta_us = 0.0;
    double ds_ns = 0.0;
    GridFlags grid;
};

int cmd_eval(const EvalArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    const OfdmConfig cfg = args.grid.build();

    EvalSpec spec;
    spec.cfg = cfg;
    spec.n_slots = args.slots;
    spec.doppler_max_hz = args.doppler_max;
    spec.quasi_static = args.quasi_static;
    spec.pilot_only = args.pilot_only;
    spec.seed = args.seed;

    if (args.estimator == "perfect") {
        spec.kind = EstimatorKind::perfect_csi;
    } else if (args.estimator == "ls") {
        spec.kind = EstimatorKind::ls_interp;
    } else if (args.estimator == "mmse") {
        spec.kind = EstimatorKind::mmse_designed;
        PdpOptions opts;
        if (args.zeta_us > 0.0) opts.zeta_s = args.zeta_us * 1e-6;
        if (args.ds_ns > 0.0) opts.ds_desired_s = args.ds_ns * 1e-9;
        spec.design_pdp = resolve_pdp(args.design, cfg, opts);
    } else if (args.estimator == "simplenet") {
        spec.kind = EstimatorKind::simplenet;
        if (args.model.empty()) throw std::invalid_argument("--estimator simplenet needs --model");
        spec.model = load_model(args.model);
    } else {
        throw std::invalid_argument("unknown estimator '" + args.estimator +
                                    "'; valid: perfect, ls, mmse, simplenet");
    }

    std::vector<CurvePoint> points;
    const std::vector<std::string> channel_names = split_names(args.channels);
    if (!args.ds.empty()) {
        // delay-spread sweep over one normalized TDL profile at a fixed SNR
        if (channel_names.size() != 1 ||
            (channel_names[0] != "TDL-A" && channel_names[0] != "TDL-B"))
            throw std::invalid_argument("--ds sweeps need --channels TDL-A or TDL-B");
        const std::vector<double> snr_grid = parse_grid(args.snr);
        if (snr_grid.size() != 1)
            throw std::invalid_argument("--ds sweeps use a single --snr value");
        PowerDelayProfile model =
            channel_names[0] == "TDL-A" ? tdl_a_normalized() : tdl_b_normalized();
        std::vector<double> ds_s;
        for (double ns : parse_grid(args.ds)) ds_s.push_back(ns * 1e-9);
        points = ds_sweep(spec, model, ds_s, snr_grid[0]);
    } else {
        PdpOptions opts;
        if (args.zeta_us > 0.0) opts.zeta_s = args.zeta_us * 1e-6;
        if (args.ds_ns > 0.0) opts.ds_desired_s = args.ds_ns * 1e-9;
        for (const auto& name : channel_names)
            spec.channels.push_back(resolve_pdp(name, cfg, opts));
        spec.snr_grid_db = parse_grid(args.snr);
        points = run_sweep(spec);
    }

    if (args.out.empty()) {
        write_csv(points, std::cout);
    } else {
        std::ofstream out(args.out, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + args.out);
        write_csv(points, out);
    }

    RunManifest manifest;
    manifest.command = "eval";
    manifest.threads = thread_count();
    manifest.add("estimator", args.estimator);
    if (!args.model.empty()) manifest.add("model", args.model);
    if (args.estimator == "mmse") manifest.add("design", args.design);
    manifest.add("channels", args.channels);
    manifest.add("snr", args.snr);
    if (!args.ds.empty()) manifest.add("ds_ns_grid", args.ds);
    manifest.add("slots", static_cast<std::int64_t>(args.slots));
    manifest.add("doppler_max_hz", args.doppler_max);
    manifest.add("quasi_static", args.quasi_static ? "true" : "false");
    manifest.add("pilot_only", args.pilot_only ? "true" : "false");
    manifest.add("seed", args.seed);
    manifest.add("pattern", args.grid.pattern);
    if (!args.model.empty()) manifest.inputs.push_back(args.model);
    if (!args.out.empty()) manifest.outputs.push_back(args.out);

    // optional gap-to-reference table at a target error rate
    if (args.target_ber > 0.0 && args.ds.empty()) {
        EvalSpec ref = spec;
        ref.kind = EstimatorKind::perfect_csi;
        ref.model.reset();
        const std::vector<CurvePoint> ref_points = run_sweep(ref);
        std::ostringstream table;
        table << "channel,target_ber,delta_snr_db\n";
        for (const auto& name : channel_names) {
            std::vector<CurvePoint> mine, theirs;
            for (const auto& p : points)
                if (p.channel == name) mine.push_back(p);
            for (const auto& p : ref_points)
                if (p.channel == name) theirs.push_back(p);
            const auto gap = delta_snr(mine, theirs, args.target_ber);
            char buf[128];
            if (gap)
                std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g\n", name.c_str(), args.target_ber,
                              *gap);
            else
                std::snprintf(buf, sizeof(buf), "%s,%.10g,not-achieved\n", name.c_str(),
                              args.target_ber);
            table << buf;
        }
        std::cout << table.str();
        if (!args.out.empty()) {
            const std::string path = args.out + ".delta_snr.csv";
            std::ofstream dout(path, std::ios::trunc);
            dout << table.str();
            manifest.outputs.push_back(path);
        }
    }

    if (!args.svg.empty()) {
        std::vector<SvgSeries> mse_series, ber_series;
        std::vector<std::string> series_names = channel_names;
        if (!args.ds.empty()) series_names = {channel_names[0]};
        for (const auto& name : series_names) {
            SvgSeries m{name, {}, {}}, b{name, {}, {}};
            for (const auto& p : points) {
                if (p.channel != name) continue;
                m.x.push_back(p.x_value);
                m.y.push_back(p.mse);
                b.x.push_back(p.x_value);
                b.y.push_back(p.ber);
            }
            mse_series.push_back(std::move(m));
            ber_series.push_back(std::move(b));
        }
        const std::string x_label = points.empty() ? "x" : points.front().x_kind;
        write_svg_plot(args.svg + "_mse.svg", "channel estimate MSE", x_label, "mse", mse_series,
                       true);
        write_svg_plot(args.svg + "_ber.svg", "bit error rate", x_label, "ber", ber_series, true);
        manifest.outputs.push_back(args.svg + "_mse.svg");
        manifest.outputs.push_back(args.svg + "_ber.svg");
    }

    manifest.wall_clock_sec = elapsed_since(t0);
    if (!args.out.empty()) manifest.write(args.out + ".manifest.json");
    return 0;
}

struct AnalyzeArgs {
    std::string design = "CE";
    std::string actual = "DC1";
    std::string snr = "10";
    int verify_trials = 0;
    bool literal = false;
    std::string out;
    double zeta_us = 0.0;
    double ds_ns = 0.0;
    std::uint64_t seed = 0;
    GridFlags grid;
};

int cmd_analyze(const AnalyzeArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    const OfdmConfig cfg = args.grid.build();
    PdpOptions opts;
    if (args.zeta_us > 0.0) opts.zeta_s = args.zeta_us * 1e-6;
    if (args.ds_ns > 0.0) opts.ds_desired_s = args.ds_ns * 1e-9;

    std::ostringstream csv;
    csv << "design,actual,snr_db,rho,verdict,violating_tau_us,epsilon_m,xi_m";
    if (args.literal) csv << ",literal_epsilon_m";
    if (args.verify_trials > 0) csv << ",mc_mse,mc_stderr,rel_gap";
    csv << "\n";

    for (const std::string& design_name : split_names(args.design)) {
        const PowerDelayProfile design = resolve_pdp(design_name, cfg, opts);
        const SampledPdp p_design = sampled_pdp(design, cfg);
        for (const std::string& actual_name : split_names(args.actual)) {
            const PowerDelayProfile actual = resolve_pdp(actual_name, cfg, opts);
            const SampledPdp p_actual = sampled_pdp(actual, cfg);
            const Applicability app = is_applicable(actual, design);
            for (double snr_db : parse_grid(args.snr)) {
                const NoiseConfig noise = NoiseConfig::from_snr_db(snr_db);
                const MismatchReport rep = mismatch_error(p_design, p_actual, noise);

                std::string verdict = "applicable";
                std::string tau = "";
                if (app.verdict == Applicability::Verdict::violates_c1) {
                    verdict = "violates_C1";
                    char b[32];
                    std::snprintf(b, sizeof(b), "%.6g", *app.violating_tau_s * 1e6);
                    tau = b;
                } else if (app.verdict == Applicability::Verdict::violates_c2) {
                    verdict = "violates_C2";
                }

                char line[512];
                std::snprintf(line, sizeof(line), "%s,%s,%.10g,%.10g,%s,%s,%.10g,%.10g",
                              design_name.c_str(), actual_name.c_str(), snr_db, noise.rho(),
                              verdict.c_str(), tau.c_str(), rep.epsilon_m, rep.xi_m);
                csv << line;
                if (args.literal) {
                    std::snprintf(line, sizeof(line), ",%.10g",
                                  mismatch_error_literal(p_design, p_actual, noise));
                    csv << line;
                }
                if (args.verify_trials > 0) {
                    const MonteCarloMse mc = verify_mismatch(p_design, actual, noise, cfg,
                                                             args.verify_trials, args.seed);
                    std::snprintf(line, sizeof(line), ",%.10g,%.10g,%.10g", mc.mse, mc.stderr_,
                                  std::abs(rep.epsilon_m - mc.mse) / mc.mse);
                    csv << line;
                }
                csv << "\n";
            }
        }
    }

    std::cout << csv.str();
    if (!args.out.empty()) {
        std::ofstream out(args.out, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + args.out);
        out << csv.str();

        RunManifest manifest;
        manifest.command = "analyze";
        manifest.threads = thread_count();
        manifest.add("design", args.design);
        manifest.add("actual", args.actual);
        manifest.add("snr", args.snr);
        manifest.add("verify_trials", static_cast<std::int64_t>(args.verify_trials));
        manifest.add("literal", args.literal ? "true" : "false");
        manifest.add("seed", args.seed);
        manifest.outputs = {args.out};
        manifest.wall_clock_sec = elapsed_since(t0);
        manifest.write(args.out + ".manifest.json");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"link-level OFDM channel estimation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file; explicit flags take precedence");
    app.set_version_flag("--version", chanest::kToolVersion);

    int threads = chanest::thread_count();
    app.add_option("--threads", threads, "Worker thread cap")->capture_default_str();

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Synthesize a training dataset");
    generate->add_option("--pdp", gen.pdp, "Profile name(s) or PDP file; a comma list makes an equal mixture")->required();
    generate->add_option("--n", gen.n, "Sample count")->required();
    generate->add_option("--snr-min", gen.snr_min, "Lower SNR bound (dB)")->capture_default_str();
    generate->add_option("--snr-max", gen.snr_max, "Upper SNR bound (dB)")->capture_default_str();
    generate->add_option("--doppler-max", gen.doppler_max, "Doppler cap (Hz)")->capture_default_str();
    generate->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
    generate->add_option("--out", gen.out, "Output dataset path")->required();
    generate->add_option("--zeta-us", gen.zeta_us, "CE path spacing (us)");
    generate->add_option("--ds-ns", gen.ds_ns, "TDL desired delay spread (ns)");
    gen.grid.attach(generate);

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train the conv estimator on a dataset");
    train_cmd->add_option("--data", tr.data, "Dataset path")->required();
    train_cmd->add_option("--out", tr.out, "Output model path")->required();
    train_cmd->add_option("--epochs", tr.epochs, "Epoch count")->capture_default_str();
    train_cmd->add_option("--lr", tr.lr, "Initial learning rate")->capture_default_str();
    train_cmd->add_option("--drop-period", tr.drop_period, "Epochs between rate drops")
        ->capture_default_str();
    train_cmd->add_option("--drop-factor", tr.drop_factor, "Rate drop factor")->capture_default_str();
    train_cmd->add_option("--batch", tr.batch, "Minibatch size")->capture_default_str();
    train_cmd->add_option("--split", tr.split, "Training fraction")->capture_default_str();
    train_cmd->add_option("--seed", tr.seed, "Training seed")->capture_default_str();
    train_cmd->add_flag("--resize-last", tr.resize_last,
                        "Run the conv stack on the pilot grid and resize afterwards");

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Monte Carlo MSE/BER sweeps");
    eval_cmd->add_option("--estimator", ev.estimator, "perfect | ls | mmse | simplenet")
        ->capture_default_str();
    eval_cmd->add_option("--model", ev.model, "Model path for simplenet");
    eval_cmd->add_option("--design", ev.design, "Design profile for mmse")->capture_default_str();
    eval_cmd->add_option("--channels", ev.channels, "Comma-separated profile names")
        ->capture_default_str();
    eval_cmd->add_option("--snr", ev.snr, "SNR grid: a:step:b or list (dB)")->capture_default_str();
    eval_cmd->add_option("--ds", ev.ds, "Delay-spread grid in ns (TDL sweep)");
    eval_cmd->add_option("--slots", ev.slots, "Slots per point")->capture_default_str();
    eval_cmd->add_option("--doppler-max", ev.doppler_max, "Doppler cap (Hz)")->capture_default_str();
    eval_cmd->add_flag("--quasi-static", ev.quasi_static, "Freeze fading over each slot");
    eval_cmd->add_flag("--pilot-only", ev.pilot_only, "Score the estimate at pilot cells only");
    eval_cmd->add_option("--target-ber", ev.target_ber,
                         "Also report the SNR gap to perfect CSI at this BER");
    eval_cmd->add_option("--seed", ev.seed, "Sweep seed")->capture_default_str();
    eval_cmd->add_option("--out", ev.out, "Output CSV path (stdout if omitted)");
    eval_cmd->add_option("--svg", ev.svg, "Also write <prefix>_mse.svg and <prefix>_ber.svg");
    eval_cmd->add_option("--zeta-us", ev.zeta_us, "CE path spacing (us)");
    eval_cmd->add_option("--ds-ns", ev.ds_ns, "TDL delay spread for fixed-channel evals (ns)");
    ev.grid.attach(eval_cmd);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Mismatch errors and applicability verdicts");
    analyze->add_option("--design", an.design, "Design profile name(s)")->capture_default_str();
    analyze->add_option("--actual", an.actual, "Actual profile name(s)")->capture_default_str();
    analyze->add_option("--snr", an.snr, "SNR grid (dB)")->capture_default_str();
    analyze->add_option("--verify-trials", an.verify_trials,
                        "Monte Carlo trials anchoring the closed form (0 = off)");
    analyze->add_flag("--paper-literal", an.literal,
                      "Also evaluate the literal trace form of the mismatch error");
    analyze->add_option("--out", an.out, "Output CSV path");
    analyze->add_option("--seed", an.seed, "Monte Carlo seed")->capture_default_str();
    analyze->add_option("--zeta-us", an.zeta_us, "CE path spacing (us)");
    analyze->add_option("--ds-ns", an.ds_ns, "TDL desired delay spread (ns)");
    an.grid.attach(analyze);

    auto* registry = app.add_subcommand("registry", "List the built-in delay profiles");
    GridFlags reg_grid;
    reg_grid.attach(registry);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    chanest::thread_count() = threads > 0 ? threads : 1;

    try {
        if (*generate) return cmd_generate(gen);
        if (*train_cmd) return cmd_train(tr);
        if (*eval_cmd) return cmd_eval(ev);
        if (*analyze) return cmd_analyze(an);
        if (*registry) {
            std::cout << registry_listing(reg_grid.build());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
