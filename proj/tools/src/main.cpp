#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"

int main(int argc, char** argv) {
    using cpofdm::cli::CommandOptions;

    CLI::App app{"Multi-transmitter CP-OFDM radar: pulse design, simulation and baselines"};
    app.require_subcommand(1);

    CommandOptions opt;
    std::string config, out = ".", waveform;
    std::uint64_t seed = 0;
    std::size_t trials = 0, threads = 0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config, "key = value config file");
        if (needs_config) c->required();
        sub->add_option("--out", out, "output directory (created on success)");
        sub->add_option("--seed", seed, "overrides the config seed");
        sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    };

    auto* design = app.add_subcommand("design", "design a waveform set (MICF or paraunitary) and place it with a COD");
    add_common(design, true);
    auto* verify = app.add_subcommand("verify", "check COD identities, paraunitary flatness and a waveform file");
    add_common(verify, false);
    verify->add_option("--waveform", waveform, "waveform container to check");
    verify->add_option("--trials", trials, "random assignments per COD check");
    auto* simulate = app.add_subcommand("simulate", "simulate a scene and reconstruct the range profiles");
    add_common(simulate, true);
    simulate->add_option("--waveform", waveform, "waveform container (overrides the config)");
    simulate->add_flag("--export-frames", opt.export_frames, "also write the first run's received frames");
    auto* compare = app.add_subcommand("compare", "run the OFDM chain next to matched-filter baselines");
    add_common(compare, true);
    compare->add_option("--waveform", waveform, "waveform container (overrides the config)");
    auto* montecarlo = app.add_subcommand("montecarlo", "Monte Carlo CDFs and qualifying counts for MICF");
    add_common(montecarlo, true);
    montecarlo->add_option("--trials", trials, "trials per setting (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cpofdm::cli::kExitConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (!config.empty()) opt.config = config;
    opt.out = out;
    if (!waveform.empty()) opt.waveform = waveform;
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->get_option_no_throw("--trials") && sub->count("--trials")) opt.trials = trials;
    if (sub->count("--threads")) opt.threads = threads;

    return cpofdm::cli::run_command(sub->get_name(), opt, std::cout, std::cerr);
}
