#pragma once

// Config files of the command-line tool, mapped onto library structs.
// Every loader rejects unknown keys; see README.md for the key lists.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cpofdm/keyvalue.hpp"
#include "cpofdm/micf.hpp"
#include "cpofdm/scene.hpp"

namespace cpofdm::cli {

using kv::ConfigError;

enum class DesignMode { micf, paraunitary };
enum class Placement { cod, none };

struct DesignSpec {
    DesignMode mode = DesignMode::micf;
    Placement placement = Placement::cod;
    micf::MicfConfig micf;             // shared layout/seed fields for both modes
    std::size_t search_trials = 1;     // MICF seeds tried, best kept
    micf::Thresholds thresholds;
};

DesignSpec parse_design(const kv::Document& doc, std::optional<std::uint64_t> seed_override);

enum class BaselineKind { p4, fd_lfm, both };

struct SceneSpec {
    SceneConfig scene;
    std::uint64_t seed = 1;
    std::size_t repeats = 1;
    std::optional<std::filesystem::path> waveform;
    std::optional<GeometryDelays> geometry;
    BaselineKind baseline = BaselineKind::both;
    std::optional<std::filesystem::path> code_file;
    std::size_t lfm_length = 0;  // 0: use N_t of the waveform
    double lfm_kappa = 1.0;

    std::uint64_t rcs_seed() const;
    std::uint64_t noise_seed(std::size_t repeat) const;
};

// Relative paths in the file resolve against `base_dir`.
SceneSpec parse_scene(const kv::Document& doc, const std::filesystem::path& base_dir,
                      std::optional<std::uint64_t> seed_override);

struct MonteCarloSpec {
    micf::MicfConfig base;
    std::size_t trials = 0;
    std::size_t threads = 1;
    micf::Thresholds thresholds;
    std::string sweep_key;             // empty: single setting
    std::vector<double> sweep_values;

    // Configs in sweep order with the labels used for file names.
    std::vector<std::pair<std::string, micf::MicfConfig>> settings() const;
};

MonteCarloSpec parse_montecarlo(const kv::Document& doc, std::optional<std::uint64_t> seed_override,
                                std::optional<std::size_t> trials_override,
                                std::optional<std::size_t> threads_override);

}  // namespace cpofdm::cli
