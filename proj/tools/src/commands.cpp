#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "config.hpp"
#include "cpofdm/baselines.hpp"
#include "cpofdm/cod.hpp"
#include "cpofdm/micf.hpp"
#include "cpofdm/paraunitary.hpp"
#include "cpofdm/random.hpp"
#include "cpofdm/reconstruct.hpp"
#include "cpofdm/scene.hpp"
#include "cpofdm/waveform_io.hpp"

namespace cpofdm::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

kv::Document load_config(const CommandOptions& opt) {
    if (!opt.config) throw ConfigError("--config is required");
    if (!fs::exists(*opt.config)) throw ConfigError("config file not found: " + opt.config->string());
    return kv::Document::load(*opt.config);
}

fs::path config_dir(const CommandOptions& opt) {
    return opt.config ? fs::absolute(*opt.config).parent_path() : fs::current_path();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// JSON has no infinities; report them as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json array_of(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

WaveformSet load_waveform(const CommandOptions& opt, const std::optional<fs::path>& from_config) {
    const auto path = opt.waveform ? opt.waveform : from_config;
    if (!path) throw ConfigError("no waveform given (use --waveform or the 'waveform' key)");
    if (!fs::exists(*path)) throw ConfigError("waveform file not found: " + path->string());
    return io::load_waveform_set(*path);
}

json waveform_metrics(const WaveformSet& ws) {
    json m;
    const PulseLayout& layout = ws.layout();
    m["num_subcarriers"] = layout.num_subcarriers;
    m["range_cells"] = layout.range_cells;
    m["eta_max"] = layout.eta_max;
    m["nonzero_length"] = layout.nonzero_length();
    m["num_tx"] = ws.num_tx();
    m["num_pulses"] = ws.num_pulses();
    m["num_nonzero"] = ws.num_nonzero();
    json xi = json::array();
    for (std::size_t a = 0; a < ws.num_tx(); ++a) {
        std::vector<ComplexSeq> rows;
        for (std::size_t p = 0; p < ws.num_pulses(); ++p) rows.push_back(ws.freq(a, p));
        xi.push_back(number(micf::xi_db(rows)));
    }
    m["xi_db_per_tx"] = xi;
    m["flat_unitary_deviation"] = cod::verify_flat_unitary(ws);
    double zero_violation = 0.0;
    for (std::size_t a = 0; a < ws.num_tx(); ++a) {
        for (std::size_t p = 0; p < ws.num_pulses(); ++p) {
            const auto& t = ws.time(a, p);
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (!layout.support().contains(i)) zero_violation = std::max(zero_violation, std::abs(t[i]));
            }
        }
    }
    m["max_zero_region_magnitude"] = zero_violation;
    return m;
}

json pulse_metrics(const std::vector<ComplexSeq>& pulses, const PulseLayout& layout, std::size_t oversampling) {
    json m;
    std::vector<double> papr;
    double sum = 0.0;
    for (const auto& s : pulses) {
        papr.push_back(dsp::papr_db(s, oversampling, layout.support()));
        sum += papr.back();
    }
    m["xi_db"] = number(micf::xi_db(pulses));
    m["mean_papr_db"] = sum / static_cast<double>(pulses.size());
    m["papr_db"] = array_of(papr);
    return m;
}

}  // namespace

CommandResult cmd_design(const CommandOptions& opt) {
    const auto doc = load_config(opt);
    const DesignSpec spec = parse_design(doc, opt.seed);
    const micf::MicfConfig& cfg = spec.micf;
    const PulseLayout layout = cfg.layout();

    CommandResult res;
    json metrics;
    std::vector<ComplexSeq> base;
    metrics["mode"] = spec.mode == DesignMode::micf ? "micf" : "paraunitary";
    metrics["placement"] = spec.placement == Placement::cod ? "cod" : "none";

    if (spec.mode == DesignMode::micf) {
        std::size_t chosen = 0;
        json search;
        if (spec.search_trials > 1) {
            const auto mc = micf::monte_carlo_cdf(cfg, spec.search_trials, spec.thresholds, opt.threads.value_or(1));
            // Lowest mean PAPR among qualifying designs, otherwise the largest xi.
            if (!mc.qualifying_trials.empty()) {
                chosen = *std::min_element(mc.qualifying_trials.begin(), mc.qualifying_trials.end(),
                                           [&](std::size_t a, std::size_t b) {
                                               return mc.mean_papr_db[a] < mc.mean_papr_db[b];
                                           });
            } else {
                chosen = static_cast<std::size_t>(
                    std::max_element(mc.xi_db.begin(), mc.xi_db.end()) - mc.xi_db.begin());
            }
            search["trials"] = spec.search_trials;
            search["qualifying"] = mc.qualifying;
            search["xi_min_db"] = spec.thresholds.xi_min_db;
            search["papr_max_db"] = spec.thresholds.papr_max_db;
        }
        micf::MicfConfig run = cfg;
        run.seed = cfg.seed + chosen;
        const micf::DesignResult r = micf::micf_design(run);
        base = r.pulses;
        metrics["seed"] = run.seed;
        metrics["iterations"] = r.iterations_run;
        metrics["papr_d_db"] = cfg.papr_d_db;
        metrics["g_f"] = cfg.g_f;
        metrics["oversampling"] = cfg.oversampling;
        if (!search.empty()) metrics["search"] = search;
    } else {
        const auto factors =
            paraunitary::random_factors(cfg.num_pulses, layout.nonzero_length(), cfg.num_subcarriers, cfg.num_tx, cfg.seed);
        base = paraunitary::polyphase_to_pulses(paraunitary::synthesize_polyphase(factors), cfg.num_subcarriers,
                                                layout.first_nonzero());
        std::ostringstream bin;
        io::write_factors(bin, factors);
        res.files.add("factors.bin", bin.str());
        metrics["seed"] = cfg.seed;
        metrics["factor_count"] = factors.vectors.size();
    }
    metrics["base_pulses"] = pulse_metrics(base, layout, cfg.oversampling);

    WaveformSet ws = spec.placement == Placement::cod
                         ? cod::place_pulses(cod::design_for_transmitters(cfg.num_tx), base, layout)
                         : WaveformSet(layout, 1, base.size(), base.size(), base);
    metrics["waveform"] = waveform_metrics(ws);

    std::ostringstream bin;
    io::write_waveform_set(bin, ws);
    std::ostringstream csv;
    io::write_waveform_csv(csv, ws);
    res.files.add("waveform.bin", bin.str());
    res.files.add("waveform.csv", csv.str());
    res.files.add("metrics.json", dump(metrics));

    std::ostringstream line;
    line << std::fixed << std::setprecision(4) << "design: xi " << metrics["base_pulses"]["xi_db"].dump()
         << " dB, mean PAPR " << metrics["base_pulses"]["mean_papr_db"].get<double>() << " dB";
    res.summary = line.str();
    return res;
}

CommandResult cmd_verify(const CommandOptions& opt) {
    std::optional<fs::path> wf_from_config;
    std::uint64_t seed = opt.seed.value_or(1);
    std::size_t trials = opt.trials.value_or(0);
    std::size_t pu_seeds = 100;
    if (opt.config) {
        const auto doc = load_config(opt);
        doc.restrict_keys({"waveform", "seed", "cod_trials", "paraunitary_seeds"});
        if (doc.has("waveform")) {
            fs::path p = doc.get_string("waveform");
            wf_from_config = p.is_absolute() ? p : config_dir(opt) / p;
        }
        if (!opt.seed) seed = doc.get_uint("seed", seed);
        if (!opt.trials) trials = static_cast<std::size_t>(doc.get_uint("cod_trials", 0));
        pu_seeds = static_cast<std::size_t>(doc.get_uint("paraunitary_seeds", pu_seeds));
    }
    const std::size_t cod_trials = trials ? trials : 10000;

    CommandResult res;
    json checks = json::array();
    auto check = [&](const std::string& name, double value, double limit, bool ok) {
        checks.push_back({{"name", name}, {"value", number(value)}, {"limit", limit}, {"pass", ok}});
        res.passed = res.passed && ok;
    };

    const double d2 = cod::verify_cod(cod::alamouti_design(), cod_trials, seed);
    check("cod_identity_alamouti", d2, 1e-12, d2 < 1e-12);
    const double d4 = cod::verify_cod(cod::cod4_design(), cod_trials, seed);
    check("cod_identity_cod4", d4, 1e-12, d4 < 1e-12);

    const PulseLayout set_a{302, 96, 40};
    for (std::size_t order : {2u, 4u}) {
        double dev = 0.0;
        double worst_xi = 0.0;
        const std::size_t tx = 2;
        const double target = 1.0 / static_cast<double>(set_a.num_subcarriers * tx);
        for (std::size_t s = 0; s < pu_seeds; ++s) {
            const auto f = paraunitary::random_factors(order, set_a.nonzero_length(), set_a.num_subcarriers, tx,
                                                       derive_seed(seed, {order, s}));
            const auto pulses = paraunitary::polyphase_to_pulses(paraunitary::synthesize_polyphase(f),
                                                                 set_a.num_subcarriers, set_a.first_nonzero());
            for (std::size_t k = 0; k < set_a.num_subcarriers; ++k) {
                double pk = 0.0;
                for (const auto& s_p : pulses) pk += std::norm(s_p[k]);
                dev = std::max(dev, std::abs(pk - target));
            }
            worst_xi = std::min(worst_xi, micf::xi_db(pulses));
        }
        check("paraunitary_flat_power_P" + std::to_string(order), dev, 1e-12, dev < 1e-12);
        check("paraunitary_xi_P" + std::to_string(order), worst_xi, -1e-10, worst_xi >= -1e-10);
    }

    json report;
    report["seed"] = seed;
    if (opt.waveform || wf_from_config) {
        const WaveformSet ws = load_waveform(opt, wf_from_config);
        const json wm = waveform_metrics(ws);
        report["waveform"] = wm;
        const double zero = wm["max_zero_region_magnitude"].get<double>();
        check("waveform_zero_head_tail", zero, cod::kZeroConditionTolerance, zero <= cod::kZeroConditionTolerance);
        const double target = 1.0 / static_cast<double>(ws.num_tx() * ws.num_nonzero());
        double energy_dev = 0.0;
        for (std::size_t a = 0; a < ws.num_tx(); ++a) {
            for (std::size_t p = 0; p < ws.num_pulses(); ++p) {
                if (!ws.is_zero_pulse(a, p)) energy_dev = std::max(energy_dev, std::abs(ws.pulse_energy(a, p) - target));
            }
        }
        check("waveform_pulse_energy", energy_dev, 1e-12, energy_dev <= 1e-12);
        double scale = 0.0;
        for (std::size_t a = 0; a < ws.num_tx(); ++a) {
            for (double v : ws.total_power_profile(a)) scale = std::max(scale, v);
        }
        const double flat = wm["flat_unitary_deviation"].get<double>();
        check("waveform_flat_unitary", flat, 1e-9 * scale, flat <= 1e-9 * scale);
        bool separable = true;
        try {
            TransmitterSeparator sep(ws);
        } catch (const RankDeficientError&) {
            separable = false;
        }
        check("waveform_full_row_rank", separable ? 0.0 : 1.0, 0.0, separable);
    }
    report["checks"] = checks;
    report["passed"] = res.passed;
    res.files.add("verify.json", dump(report));
    res.summary = std::string("verify: ") + (res.passed ? "all checks passed" : "FAILED");
    return res;
}

namespace {

struct PairAccumulator {
    double sq_error = 0.0;
    std::size_t cells = 0;
};

void add_errors(std::vector<PairAccumulator>& acc, const Tensor3<cplx>& est, const Tensor3<cplx>& g) {
    for (std::size_t b = 0; b < g.dim0(); ++b) {
        for (std::size_t a = 0; a < g.dim1(); ++a) {
            auto& pa = acc[b * g.dim1() + a];
            for (std::size_t m = 0; m < g.dim2(); ++m) pa.sq_error += std::norm(est(b, a, m) - g(b, a, m));
            pa.cells += g.dim2();
        }
    }
}

double total_mse(const std::vector<PairAccumulator>& acc) {
    double e = 0.0;
    std::size_t n = 0;
    for (const auto& pa : acc) {
        e += pa.sq_error;
        n += pa.cells;
    }
    return n ? e / static_cast<double>(n) : 0.0;
}

json seeds_json(const SceneSpec& spec) {
    json s;
    s["seed"] = spec.seed;
    s["rcs_seed"] = spec.rcs_seed();
    json noise = json::array();
    for (std::size_t r = 0; r < spec.repeats; ++r) noise.push_back(spec.noise_seed(r));
    s["noise_seeds"] = noise;
    return s;
}

json scene_json(const SceneSpec& spec) {
    const SceneConfig& s = spec.scene;
    json j;
    j["num_tx"] = s.num_tx;
    j["num_rx"] = s.num_rx;
    j["range_cells"] = s.range_cells;
    j["eta_max"] = s.eta_max;
    j["eta"] = s.eta;
    j["target_cells"] = s.target_cells;
    j["carrier_hz"] = s.carrier_hz;
    j["bandwidth_hz"] = s.bandwidth_hz;
    j["range_resolution_m"] = s.range_resolution();
    j["sigma_d2"] = s.sigma_d2;
    j["sigma_n2"] = s.sigma_n2;
    j["repeats"] = spec.repeats;
    if (spec.geometry) {
        json res = json::array();
        for (const auto& row : spec.geometry->residual) res.push_back(row);
        j["eta_rounding_residual"] = res;
    }
    return j;
}

struct OfdmRun {
    RcsRealization rcs;
    Tensor3<cplx> first_g_hat;
    ReceivedFrame first_frame;
    std::vector<PairAccumulator> acc;
    bool fast_path = false;
};

OfdmRun run_ofdm(const WaveformSet& ws, const SceneSpec& spec) {
    const SceneConfig& scene = spec.scene;
    OfdmRun run;
    run.rcs = sample_rcs(scene, spec.rcs_seed());
    const ReceivedFrame clean = synthesize_noiseless(ws, run.rcs, scene);
    const TransmitterSeparator sep(ws);
    run.fast_path = sep.uses_fast_path();
    run.acc.assign(scene.num_rx * scene.num_tx, {});
    for (std::size_t r = 0; r < spec.repeats; ++r) {
        ReceivedFrame frame = clean;
        add_noise(frame, scene.sigma_n2, spec.noise_seed(r));
        const RangeEstimate est = reconstruct_all(frame, ws, scene, sep);
        add_errors(run.acc, est.g_hat, run.rcs.g);
        if (r == 0) {
            run.first_g_hat = est.g_hat;
            run.first_frame = std::move(frame);
        }
    }
    return run;
}

}  // namespace

CommandResult cmd_simulate(const CommandOptions& opt) {
    const auto doc = load_config(opt);
    const SceneSpec spec = parse_scene(doc, config_dir(opt), opt.seed);
    const WaveformSet ws = load_waveform(opt, spec.waveform);
    const SceneConfig& scene = spec.scene;

    const OfdmRun run = run_ofdm(ws, spec);
    const EstimateScore first = score_estimate(run.first_g_hat, run.rcs.g, scene.target_cells);

    json pairs = json::array();
    for (std::size_t b = 0; b < scene.num_rx; ++b) {
        for (std::size_t a = 0; a < scene.num_tx; ++a) {
            const auto& pa = run.acc[b * scene.num_tx + a];
            const double mse = pa.sq_error / static_cast<double>(pa.cells);
            const double signal = first.pairs[b * scene.num_tx + a].signal_power;
            json pj;
            pj["beta"] = b;
            pj["alpha"] = a;
            pj["eta"] = scene.eta[b][a];
            pj["mse"] = mse;
            pj["signal_power"] = signal;
            pj["empirical_snr_db"] = mse > 0.0 ? number(10.0 * std::log10(signal / mse)) : json(nullptr);
            if (scene.sigma_n2 > 0.0 && signal > 0.0) {
                const auto profile = ws.total_power_profile(a);
                pj["theory_snr_db"] = number(snr_post_theory_db(signal, profile, scene.sigma_n2));
                pj["max_snr_db"] = snr_max_theory_db(signal, scene.num_tx, scene.sigma_n2);
            }
            pairs.push_back(pj);
        }
    }
    json summary;
    summary["seeds"] = seeds_json(spec);
    summary["scene"] = scene_json(spec);
    summary["separation"] = run.fast_path ? "fast" : "general";
    summary["mse"] = total_mse(run.acc);
    summary["max_relative_error_first_run"] = first.max_relative_error;
    summary["pairs"] = pairs;

    CommandResult res;
    std::ostringstream csv;
    write_estimate_csv(csv, run.first_g_hat);
    res.files.add("estimate.csv", csv.str());
    res.files.add("summary.json", dump(summary));
    if (opt.export_frames) {
        std::ostringstream frames;
        write_frame_csv(frames, run.first_frame);
        res.files.add("frames.csv", frames.str());
    }
    std::ostringstream line;
    line << "simulate: mse " << std::setprecision(6) << summary["mse"].get<double>() << " over " << spec.repeats
         << " run(s)";
    res.summary = line.str();
    return res;
}

CommandResult cmd_compare(const CommandOptions& opt) {
    const auto doc = load_config(opt);
    const SceneSpec spec = parse_scene(doc, config_dir(opt), opt.seed);
    const WaveformSet ws = load_waveform(opt, spec.waveform);
    const SceneConfig& scene = spec.scene;
    const std::size_t pulses = ws.num_pulses();
    const std::size_t nt = ws.layout().nonzero_length();

    const OfdmRun ofdm = run_ofdm(ws, spec);
    const auto& g = ofdm.rcs.g;
    const auto tau = scene.tau_sum();

    const bool want_p4 = spec.baseline != BaselineKind::fd_lfm;
    const bool want_lfm = spec.baseline != BaselineKind::p4;
    baselines::CodeSet codes;
    if (want_p4) {
        if (spec.code_file) {
            if (!fs::exists(*spec.code_file)) throw ConfigError("code file not found: " + spec.code_file->string());
            codes = baselines::load_code_set(*spec.code_file);
            if (codes.num_tx() != scene.num_tx) throw ConfigError("code file has a different transmitter count");
        } else {
            codes = baselines::p4_code_set(scene.num_tx, nt, derive_seed(spec.seed, {4}));
        }
    }
    const baselines::LfmConfig lfm{spec.lfm_length ? spec.lfm_length : nt, spec.lfm_kappa};

    std::vector<PairAccumulator> p4_acc(scene.num_rx * scene.num_tx), lfm_acc(scene.num_rx * scene.num_tx);
    Tensor3<cplx> p4_first, lfm_first;
    for (std::size_t r = 0; r < spec.repeats; ++r) {
        if (want_p4) {
            const auto est = baselines::compensate_baseline(
                baselines::code_set_simulate(codes, scene, ofdm.rcs, pulses, spec.noise_seed(r)), tau, scene.carrier_hz);
            add_errors(p4_acc, est, g);
            if (r == 0) p4_first = est;
        }
        if (want_lfm) {
            const auto est = baselines::compensate_baseline(
                baselines::fd_lfm_simulate(scene, ofdm.rcs, lfm, pulses, spec.noise_seed(r)), tau, scene.carrier_hz);
            add_errors(lfm_acc, est, g);
            if (r == 0) lfm_first = est;
        }
    }

    std::ostringstream csv;
    csv << "beta,alpha,m,true_re,true_im,ofdm_re,ofdm_im";
    if (want_p4) csv << ",p4_re,p4_im";
    if (want_lfm) csv << ",fdlfm_re,fdlfm_im";
    csv << '\n' << std::setprecision(17);
    for (std::size_t b = 0; b < scene.num_rx; ++b) {
        for (std::size_t a = 0; a < scene.num_tx; ++a) {
            for (std::size_t m = 0; m < scene.range_cells; ++m) {
                auto put = [&](cplx v) { csv << ',' << v.real() << ',' << v.imag(); };
                csv << b << ',' << a << ',' << m;
                put(g(b, a, m));
                put(ofdm.first_g_hat(b, a, m));
                if (want_p4) put(p4_first(b, a, m));
                if (want_lfm) put(lfm_first(b, a, m));
                csv << '\n';
            }
        }
    }

    json methods;
    json noise = seeds_json(spec)["noise_seeds"];
    methods["ofdm"] = {{"mse", total_mse(ofdm.acc)}, {"noise_seeds", noise}, {"bandwidth_hz", scene.bandwidth_hz}};
    if (want_p4) {
        methods["p4"] = {{"mse", total_mse(p4_acc)},
                         {"noise_seeds", noise},
                         {"code_set", codes.label},
                         {"code_length", codes.length()},
                         {"bandwidth_hz", scene.bandwidth_hz}};
    }
    if (want_lfm) {
        methods["fd_lfm"] = {{"mse", total_mse(lfm_acc)},
                             {"noise_seeds", noise},
                             {"lfm_length", lfm.length},
                             {"bandwidth_hz", scene.bandwidth_hz * static_cast<double>(scene.num_tx)}};
    }
    json summary;
    summary["seeds"] = seeds_json(spec);
    summary["scene"] = scene_json(spec);
    summary["methods"] = methods;

    CommandResult res;
    res.files.add("compare.csv", csv.str());
    res.files.add("summary.json", dump(summary));
    std::ostringstream line;
    line << std::setprecision(4) << "compare: mse ofdm " << total_mse(ofdm.acc);
    if (want_p4) line << ", p4 " << total_mse(p4_acc);
    if (want_lfm) line << ", fd-lfm " << total_mse(lfm_acc);
    res.summary = line.str();
    return res;
}

CommandResult cmd_montecarlo(const CommandOptions& opt) {
    if (opt.trials && *opt.trials == 0) throw ConfigError("--trials must be >= 1");
    const auto doc = load_config(opt);
    const MonteCarloSpec spec = parse_montecarlo(doc, opt.seed, opt.trials, opt.threads);

    CommandResult res;
    std::ostringstream counts;
    counts << "setting,trials,qualifying,median_mean_papr_db,median_xi_db\n" << std::setprecision(17);
    json settings = json::array();
    for (const auto& [label, cfg] : spec.settings()) {
        const auto mc = micf::monte_carlo_cdf(cfg, spec.trials, spec.thresholds, spec.threads);
        std::ostringstream cdf;
        micf::write_cdf_csv(cdf, mc);
        res.files.add("cdf_" + label + ".csv", cdf.str());
        const double mp = micf::median(mc.mean_papr_db);
        const double mx = micf::median(mc.xi_db);
        counts << label << ',' << spec.trials << ',' << mc.qualifying << ',' << mp << ',' << mx << '\n';
        settings.push_back({{"setting", label},
                            {"num_pulses", cfg.num_pulses},
                            {"iterations", cfg.iterations},
                            {"papr_d_db", cfg.papr_d_db},
                            {"g_f", cfg.g_f},
                            {"qualifying", mc.qualifying},
                            {"median_mean_papr_db", mp},
                            {"median_xi_db", number(mx)}});
    }
    json summary;
    summary["seed"] = spec.base.seed;
    summary["trials"] = spec.trials;
    summary["xi_min_db"] = spec.thresholds.xi_min_db;
    summary["papr_max_db"] = spec.thresholds.papr_max_db;
    summary["settings"] = settings;
    res.files.add("counts.csv", counts.str());
    res.files.add("summary.json", dump(summary));
    res.summary = "montecarlo: " + std::to_string(settings.size()) + " setting(s) x " + std::to_string(spec.trials) +
                  " trials";
    return res;
}

int run_command(const std::string& name, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        CommandResult res;
        if (name == "design") {
            res = cmd_design(opt);
        } else if (name == "verify") {
            res = cmd_verify(opt);
        } else if (name == "simulate") {
            res = cmd_simulate(opt);
        } else if (name == "compare") {
            res = cmd_compare(opt);
        } else if (name == "montecarlo") {
            res = cmd_montecarlo(opt);
        } else {
            err << "error: unknown command '" << name << "'\n";
            return kExitConfig;
        }
        res.files.commit(opt.out);
        out << res.summary << '\n';
        return res.passed ? kExitOk : kExitRuntime;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace cpofdm::cli
