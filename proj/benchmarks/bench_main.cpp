#include <benchmark/benchmark.h>

#include "cpofdm/cod.hpp"
#include "cpofdm/dsp.hpp"
#include "cpofdm/micf.hpp"
#include "cpofdm/random.hpp"
#include "cpofdm/reconstruct.hpp"

using namespace cpofdm;

namespace {

ComplexSeq noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    ComplexSeq x(n);
    for (auto& v : x) v = rng.complex_normal(1.0);
    return x;
}

// 302/309 go through Bluestein, 1024 is radix-2, 1208/1236 are the L=4 grids.
void BM_Dft(benchmark::State& state) {
    ComplexSeq x = noise(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        dsp::dft_unitary_inplace(x);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_Dft)->Arg(302)->Arg(309)->Arg(1024)->Arg(1208)->Arg(1236);

void BM_MicfDesign(benchmark::State& state) {
    micf::MicfConfig cfg;
    cfg.num_pulses = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto r = micf::micf_design(cfg);
        benchmark::DoNotOptimize(r.xi_db);
        ++cfg.seed;
    }
}
BENCHMARK(BM_MicfDesign)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

struct SetB {
    PulseLayout layout{309, 96, 40};
    SceneConfig scene;
    WaveformSet ws;
    RcsRealization rcs;

    SetB() {
        scene.num_tx = 2;
        scene.num_rx = 2;
        scene.range_cells = 96;
        scene.eta_max = 40;
        scene.eta = {{17, 0}, {6, 32}};
        scene.carrier_hz = 9e9;
        scene.bandwidth_hz = 150e6;
        scene.target_cells = random_target_cells(96, 10, 1);
        scene.range_cell0_m = 10000.0;
        std::vector<ComplexSeq> base;
        for (std::uint64_t s = 0; s < 2; ++s) {
            ComplexSeq t(309);
            Rng rng(s + 10);
            for (std::size_t i = layout.first_nonzero(); i <= layout.last_nonzero(); ++i) t[i] = rng.complex_normal(1.0);
            base.push_back(dsp::dft_unitary(t));
        }
        ws = cod::place_pulses(cod::alamouti_design(), base, layout);
        rcs = sample_rcs(scene, 3);
    }
};

void BM_SynthesizeSetB(benchmark::State& state) {
    const SetB b;
    for (auto _ : state) {
        auto f = synthesize_noiseless(b.ws, b.rcs, b.scene);
        benchmark::DoNotOptimize(f.streams.data());
    }
}
BENCHMARK(BM_SynthesizeSetB)->Unit(benchmark::kMillisecond);

void BM_ReconstructSetB(benchmark::State& state) {
    const SetB b;
    const auto frame = synthesize_noiseless(b.ws, b.rcs, b.scene);
    const TransmitterSeparator sep(b.ws);
    for (auto _ : state) {
        auto est = reconstruct_all(frame, b.ws, b.scene, sep);
        benchmark::DoNotOptimize(est.g_hat.data().data());
    }
}
BENCHMARK(BM_ReconstructSetB)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
