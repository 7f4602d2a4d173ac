#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cpofdm/cod.hpp"
#include "cpofdm/random.hpp"

namespace cpofdm::cli {

namespace {

const std::set<std::string> kMicfKeys{"num_subcarriers", "range_cells", "eta_max",     "num_tx",
                                      "num_pulses",      "iterations",  "papr_d_db",   "g_f",
                                      "oversampling",    "seed"};

std::set<std::string> with(std::set<std::string> base, std::initializer_list<std::string> more) {
    base.insert(more);
    return base;
}

std::size_t as_size(std::uint64_t v) { return static_cast<std::size_t>(v); }

micf::MicfConfig read_micf(const kv::Document& doc, std::optional<std::uint64_t> seed_override) {
    micf::MicfConfig c;
    c.num_subcarriers = as_size(doc.get_uint("num_subcarriers", c.num_subcarriers));
    c.range_cells = as_size(doc.get_uint("range_cells", c.range_cells));
    c.eta_max = as_size(doc.get_uint("eta_max", c.eta_max));
    c.num_tx = as_size(doc.get_uint("num_tx", c.num_tx));
    c.num_pulses = as_size(doc.get_uint("num_pulses", c.num_pulses));
    c.iterations = as_size(doc.get_uint("iterations", c.iterations));
    c.papr_d_db = doc.get_double("papr_d_db", c.papr_d_db);
    c.g_f = doc.get_double("g_f", c.g_f);
    c.oversampling = as_size(doc.get_uint("oversampling", c.oversampling));
    c.seed = seed_override.value_or(doc.get_uint("seed", c.seed));
    return c;
}

// Library validation errors become config errors here.
template <typename F>
void as_config_error(const kv::Document& doc, F&& f) {
    try {
        f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(doc.source() + ": " + e.what());
    }
}

Point3 to_point(const std::vector<double>& v, const kv::Document& doc, const std::string& key) {
    if (v.size() != 3) throw ConfigError(doc.source() + ": key '" + key + "': positions need 3 coordinates (x y z)");
    return {v[0], v[1], v[2]};
}

}  // namespace

DesignSpec parse_design(const kv::Document& doc, std::optional<std::uint64_t> seed_override) {
    doc.restrict_keys(with(kMicfKeys, {"mode", "placement", "search_trials", "xi_min_db", "papr_max_db"}));
    DesignSpec spec;
    const std::string mode = doc.get_string("mode", "micf");
    if (mode == "micf") {
        spec.mode = DesignMode::micf;
    } else if (mode == "paraunitary") {
        spec.mode = DesignMode::paraunitary;
    } else {
        throw ConfigError(doc.source() + ": mode must be 'micf' or 'paraunitary', got '" + mode + "'");
    }
    const std::string placement = doc.get_string("placement", "cod");
    if (placement == "cod") {
        spec.placement = Placement::cod;
    } else if (placement == "none") {
        spec.placement = Placement::none;
    } else {
        throw ConfigError(doc.source() + ": placement must be 'cod' or 'none', got '" + placement + "'");
    }
    spec.micf = read_micf(doc, seed_override);
    spec.search_trials = as_size(doc.get_uint("search_trials", 1));
    if (spec.search_trials == 0) throw ConfigError(doc.source() + ": search_trials must be >= 1");
    spec.thresholds.xi_min_db = doc.get_double("xi_min_db", spec.thresholds.xi_min_db);
    spec.thresholds.papr_max_db = doc.get_double("papr_max_db", spec.thresholds.papr_max_db);

    if (spec.placement == Placement::cod) {
        if (spec.micf.num_tx == 0 || spec.micf.num_tx > 4) {
            throw ConfigError(doc.source() + ": COD placement supports num_tx in [1, 4]");
        }
        const std::size_t vars = cod::design_for_transmitters(spec.micf.num_tx).num_vars();
        if (!doc.has("num_pulses")) {
            spec.micf.num_pulses = vars;
        } else if (spec.micf.num_pulses != vars) {
            std::ostringstream msg;
            msg << doc.source() << ": num_pulses=" << spec.micf.num_pulses << " but the design for num_tx="
                << spec.micf.num_tx << " has " << vars << " base pulses";
            throw ConfigError(msg.str());
        }
    }
    as_config_error(doc, [&] { spec.micf.validate(); });
    if (spec.mode == DesignMode::paraunitary && spec.search_trials != 1) {
        throw ConfigError(doc.source() + ": search_trials applies to mode = micf only");
    }
    return spec;
}

std::uint64_t SceneSpec::rcs_seed() const { return derive_seed(seed, {1}); }
std::uint64_t SceneSpec::noise_seed(std::size_t repeat) const { return derive_seed(seed, {2, repeat}); }

SceneSpec parse_scene(const kv::Document& doc, const std::filesystem::path& base_dir,
                      std::optional<std::uint64_t> seed_override) {
    doc.restrict_keys({"num_tx", "num_rx", "range_cells", "eta_max", "eta", "tx_positions", "rx_positions",
                       "cell0_position", "carrier_hz", "bandwidth_hz", "target_cells", "random_targets",
                       "sigma_d2", "sigma_n2", "snr_db", "range_cell0_m", "seed", "repeats", "waveform",
                       "baseline", "code_file", "lfm_length", "lfm_kappa"});
    SceneSpec spec;
    SceneConfig& s = spec.scene;
    spec.seed = seed_override.value_or(doc.get_uint("seed", 1));
    spec.repeats = as_size(doc.get_uint("repeats", 1));
    if (spec.repeats == 0) throw ConfigError(doc.source() + ": repeats must be >= 1");

    s.range_cells = as_size(doc.get_uint("range_cells"));
    s.carrier_hz = doc.get_double("carrier_hz");
    s.bandwidth_hz = doc.get_double("bandwidth_hz");
    s.range_cell0_m = doc.get_double("range_cell0_m", 0.0);

    const bool geometric = doc.has("tx_positions") || doc.has("rx_positions") || doc.has("cell0_position");
    if (geometric && doc.has("eta")) throw ConfigError(doc.source() + ": give either eta or antenna positions, not both");
    if (geometric) {
        Geometry geo;
        for (const auto& row : doc.get_matrix("tx_positions")) geo.transmitters.push_back(to_point(row, doc, "tx_positions"));
        for (const auto& row : doc.get_matrix("rx_positions")) geo.receivers.push_back(to_point(row, doc, "rx_positions"));
        geo.nearest_cell = to_point(doc.get_doubles("cell0_position"), doc, "cell0_position");
        geo.bandwidth_hz = s.bandwidth_hz;
        as_config_error(doc, [&] { spec.geometry = delays_from_geometry(geo); });
        s.eta = spec.geometry->eta;
        s.tau0_s = spec.geometry->tau0_s;
        s.num_tx = geo.transmitters.size();
        s.num_rx = geo.receivers.size();
        s.eta_max = as_size(doc.get_uint("eta_max", spec.geometry->eta_max));
    } else {
        for (const auto& row : doc.get_uint_matrix("eta")) {
            s.eta.emplace_back(row.begin(), row.end());
        }
        s.num_rx = s.eta.size();
        s.num_tx = s.eta.front().size();
        std::size_t largest = 0;
        for (const auto& row : s.eta) largest = std::max(largest, *std::max_element(row.begin(), row.end()));
        s.eta_max = as_size(doc.get_uint("eta_max", largest));
    }
    if (doc.has("num_tx") && doc.get_uint("num_tx") != s.num_tx) {
        throw ConfigError(doc.source() + ": num_tx disagrees with the delay/position data");
    }
    if (doc.has("num_rx") && doc.get_uint("num_rx") != s.num_rx) {
        throw ConfigError(doc.source() + ": num_rx disagrees with the delay/position data");
    }

    if (doc.has("target_cells") && doc.has("random_targets")) {
        throw ConfigError(doc.source() + ": give either target_cells or random_targets");
    }
    if (doc.has("target_cells")) {
        for (auto m : doc.get_uints("target_cells")) s.target_cells.push_back(as_size(m));
        std::sort(s.target_cells.begin(), s.target_cells.end());
        if (std::adjacent_find(s.target_cells.begin(), s.target_cells.end()) != s.target_cells.end()) {
            throw ConfigError(doc.source() + ": target_cells contains duplicates");
        }
    } else if (doc.has("random_targets")) {
        as_config_error(doc, [&] {
            s.target_cells = random_target_cells(s.range_cells, as_size(doc.get_uint("random_targets")),
                                                 derive_seed(spec.seed, {3}));
        });
    } else {
        throw ConfigError(doc.source() + ": missing target_cells or random_targets");
    }

    s.sigma_d2 = doc.get_double("sigma_d2", 1.0);
    if (doc.has("sigma_n2") && doc.has("snr_db")) throw ConfigError(doc.source() + ": give either sigma_n2 or snr_db");
    if (doc.has("snr_db")) {
        s.sigma_n2 = s.sigma_d2 / std::pow(10.0, doc.get_double("snr_db") / 10.0);
    } else {
        s.sigma_n2 = doc.get_double("sigma_n2", 0.0);
    }

    if (doc.has("waveform")) {
        std::filesystem::path p = doc.get_string("waveform");
        spec.waveform = p.is_absolute() ? p : base_dir / p;
    }
    const std::string baseline = doc.get_string("baseline", "both");
    if (baseline == "p4") {
        spec.baseline = BaselineKind::p4;
    } else if (baseline == "fd-lfm") {
        spec.baseline = BaselineKind::fd_lfm;
    } else if (baseline == "both") {
        spec.baseline = BaselineKind::both;
    } else {
        throw ConfigError(doc.source() + ": baseline must be p4, fd-lfm or both");
    }
    if (doc.has("code_file")) {
        std::filesystem::path p = doc.get_string("code_file");
        spec.code_file = p.is_absolute() ? p : base_dir / p;
    }
    spec.lfm_length = as_size(doc.get_uint("lfm_length", 0));
    spec.lfm_kappa = doc.get_double("lfm_kappa", 1.0);

    as_config_error(doc, [&] { s.validate(); });
    return spec;
}

std::vector<std::pair<std::string, micf::MicfConfig>> MonteCarloSpec::settings() const {
    std::vector<std::pair<std::string, micf::MicfConfig>> out;
    if (sweep_key.empty()) {
        out.emplace_back("base", base);
        return out;
    }
    for (double v : sweep_values) {
        micf::MicfConfig c = base;
        std::ostringstream label;
        label << sweep_key << '_' << v;
        if (sweep_key == "num_pulses") {
            c.num_pulses = static_cast<std::size_t>(v);
        } else if (sweep_key == "iterations") {
            c.iterations = static_cast<std::size_t>(v);
        } else if (sweep_key == "papr_d_db") {
            c.papr_d_db = v;
        } else if (sweep_key == "g_f") {
            c.g_f = v;
        }
        out.emplace_back(label.str(), c);
    }
    return out;
}

MonteCarloSpec parse_montecarlo(const kv::Document& doc, std::optional<std::uint64_t> seed_override,
                                std::optional<std::size_t> trials_override,
                                std::optional<std::size_t> threads_override) {
    doc.restrict_keys(with(kMicfKeys, {"trials", "threads", "xi_min_db", "papr_max_db", "sweep_num_pulses",
                                       "sweep_iterations", "sweep_papr_d_db", "sweep_g_f"}));
    MonteCarloSpec spec;
    spec.base = read_micf(doc, seed_override);
    spec.trials = trials_override.value_or(as_size(doc.get_uint("trials", 0)));
    if (spec.trials == 0) throw ConfigError(doc.source() + ": trials must be >= 1");
    spec.threads = threads_override.value_or(as_size(doc.get_uint("threads", 1)));
    spec.thresholds.xi_min_db = doc.get_double("xi_min_db", spec.thresholds.xi_min_db);
    spec.thresholds.papr_max_db = doc.get_double("papr_max_db", spec.thresholds.papr_max_db);

    for (const char* key : {"num_pulses", "iterations", "papr_d_db", "g_f"}) {
        const std::string sweep = std::string("sweep_") + key;
        if (!doc.has(sweep)) continue;
        if (!spec.sweep_key.empty()) throw ConfigError(doc.source() + ": only one sweep_* key is allowed");
        spec.sweep_key = key;
        spec.sweep_values = doc.get_doubles(sweep);
        if (spec.sweep_values.empty()) throw ConfigError(doc.source() + ": " + sweep + " is empty");
        const bool integral = spec.sweep_key == "num_pulses" || spec.sweep_key == "iterations";
        for (double v : spec.sweep_values) {
            if (integral && (v < 1.0 || v != std::floor(v))) {
                throw ConfigError(doc.source() + ": " + sweep + " needs positive integers");
            }
        }
    }
    for (const auto& [label, cfg] : spec.settings()) {
        as_config_error(doc, [&] { cfg.validate(); });
    }
    return spec;
}

}  // namespace cpofdm::cli
