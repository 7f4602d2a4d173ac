#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "output.hpp"

namespace cpofdm::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

struct CommandOptions {
    std::optional<std::filesystem::path> config;
    std::filesystem::path out = ".";
    std::optional<std::filesystem::path> waveform;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> threads;
    bool export_frames = false;
};

struct CommandResult {
    OutputSet files;
    bool passed = true;   // false -> exit 3 after writing (verify)
    std::string summary;  // one line for stdout
};

// Each command only builds its artifacts. ConfigError means a bad or missing
// input (exit 2); any other exception is a runtime/validation failure (exit 3).
CommandResult cmd_design(const CommandOptions& opt);
CommandResult cmd_verify(const CommandOptions& opt);
CommandResult cmd_simulate(const CommandOptions& opt);
CommandResult cmd_compare(const CommandOptions& opt);
CommandResult cmd_montecarlo(const CommandOptions& opt);

// Runs a command by name, commits its artifacts to opt.out and maps failures
// to exit codes with a message on `err`.
int run_command(const std::string& name, const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace cpofdm::cli
