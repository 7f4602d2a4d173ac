#include <gtest/gtest.h>

#include <sstream>

#include "cpofdm/cod.hpp"
#include "cpofdm/scene.hpp"
#include "test_support.hpp"

using namespace cpofdm;
using cpofdm::test::max_abs_diff;
using cpofdm::test::random_valid_pulse;

namespace {

SceneConfig small_scene() {
    SceneConfig s;
    s.num_tx = 2;
    s.num_rx = 2;
    s.range_cells = 8;
    s.eta_max = 4;
    s.eta = {{3, 0}, {1, 4}};
    s.carrier_hz = 9e9;
    s.bandwidth_hz = 150e6;
    s.target_cells = {0, 2, 7};
    s.range_cell0_m = 10000.0;
    return s;
}

WaveformSet small_waveform(std::uint64_t seed) {
    const PulseLayout layout{64, 8, 4};
    std::vector<ComplexSeq> base{random_valid_pulse(layout, seed), random_valid_pulse(layout, seed + 1)};
    return cod::place_pulses(cod::alamouti_design(), base, layout);
}

}  // namespace

TEST(Geometry, CollocatedArrayHasZeroDelays) {
    Geometry g;
    g.transmitters = {{0, 0, 0}, {0, 0, 0}};
    g.receivers = {{0, 0, 0}};
    g.nearest_cell = {5000, 0, 0};
    g.bandwidth_hz = 150e6;
    const auto d = delays_from_geometry(g);
    EXPECT_EQ(d.eta_max, 0u);
    EXPECT_EQ(d.eta, (DelayMatrix{{0, 0}}));
    EXPECT_NEAR(d.tau_min_s, 10000.0 / kSpeedOfLight, 1e-18);
}

TEST(Geometry, EngineeredAdditiveDelays) {
    // One sample = c/B metres of extra path. Place antennas on the far side of
    // the origin along x so the extra path equals the offset.
    const double bw = 150e6;
    const double step = kSpeedOfLight / bw;
    Geometry g;
    g.bandwidth_hz = bw;
    g.nearest_cell = {0, 0, 0};
    const double base = 5000.0;
    // r_0 = 0, r_1 = 6 samples (receivers); t_0 = 17, t_1 = 0 (transmitters)
    g.receivers = {{-(base), 0, 0}, {-(base + 6 * step), 0, 0}};
    g.transmitters = {{-(base + 17 * step), 0, 0}, {-(base), 0, 0}};
    const auto d = delays_from_geometry(g);
    EXPECT_EQ(d.eta, (DelayMatrix{{17, 0}, {23, 6}}));
    EXPECT_EQ(d.eta_max, 23u);
    for (const auto& row : d.residual) {
        for (double r : row) EXPECT_LT(std::abs(r), 1e-6);
    }
    EXPECT_NEAR(d.tau0_s[0][1], 2 * base / kSpeedOfLight, 1e-15);
}

TEST(Geometry, ExampleMatrixIsNotAdditive) {
    // A bistatic delay eta_{b,a} = r_b + t_a must satisfy eta00 + eta11 == eta01 + eta10.
    const DelayMatrix eta{{17, 0}, {6, 32}};
    EXPECT_NE(eta[0][0] + eta[1][1], eta[0][1] + eta[1][0]);
}

TEST(Geometry, RoundingReportsResidual) {
    const double bw = 100e6;
    const double step = kSpeedOfLight / bw;
    Geometry g;
    g.bandwidth_hz = bw;
    g.receivers = {{-1000, 0, 0}};
    g.transmitters = {{-1000, 0, 0}, {-(1000 + 2.4 * step), 0, 0}};
    const auto d = delays_from_geometry(g);
    EXPECT_EQ(d.eta[0][1], 2u);
    EXPECT_NEAR(d.residual[0][1], 0.4, 1e-9);
}

TEST(Geometry, InvalidInputs) {
    Geometry g;
    g.bandwidth_hz = 1e6;
    EXPECT_THROW(delays_from_geometry(g), std::invalid_argument);
    g.transmitters = {{0, 0, 0}};
    g.receivers = {{0, 0, std::nan("")}};
    EXPECT_THROW(delays_from_geometry(g), std::invalid_argument);
    g.receivers = {{0, 0, 0}};
    g.bandwidth_hz = 0.0;
    EXPECT_THROW(delays_from_geometry(g), std::invalid_argument);
}

TEST(SceneConfig, ValidateAndTau) {
    SceneConfig s = small_scene();
    EXPECT_NO_THROW(s.validate());
    const auto tau = s.tau_sum();
    const double ts = 1.0 / 150e6;
    EXPECT_NEAR(tau(1, 1, 3), 2 * 10000.0 / kSpeedOfLight + 7 * ts, 1e-18);
    EXPECT_NEAR(s.range_resolution(), 0.999308193333, 1e-9);
    s.eta[1][1] = 5;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = small_scene();
    s.target_cells.push_back(8);
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = small_scene();
    s.eta.pop_back();
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(RandomHelpers, TargetsDistinctSortedDeterministic) {
    const auto a = random_target_cells(96, 10, 5);
    EXPECT_EQ(a.size(), 10u);
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
    EXPECT_LT(a.back(), 96u);
    EXPECT_EQ(a, random_target_cells(96, 10, 5));
    EXPECT_EQ(random_target_cells(5, 5, 1), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
    EXPECT_THROW(random_target_cells(3, 4, 1), std::invalid_argument);
    const auto eta = random_delays(3, 2, 40, 7);
    for (const auto& row : eta) {
        for (auto v : row) EXPECT_LE(v, 40u);
    }
}

TEST(CarrierPhase, ReducedCycles) {
    EXPECT_LT(std::abs(carrier_phase(9e9, 0.0) - 1.0), 1e-15);
    EXPECT_LT(std::abs(carrier_phase(1.0, 0.25) - cplx(0.0, -1.0)), 1e-15);
    // 9 GHz over 66.7 us: many cycles, phase still on the unit circle and exact for integer cycles.
    EXPECT_LT(std::abs(carrier_phase(1e9, 1e-6) - 1.0), 1e-9);
}

TEST(Rcs, StatisticsOverManyDraws) {
    SceneConfig s;
    s.num_tx = 1;
    s.num_rx = 1;
    s.range_cells = 1;
    s.eta = {{0}};
    s.target_cells = {0};
    s.sigma_d2 = 2.5;
    double sum2 = 0.0;
    cplx mean{};
    double pseudo = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const auto r = sample_rcs(s, static_cast<std::uint64_t>(i) + 1);
        const cplx g = r.g(0, 0, 0);
        sum2 += std::norm(g);
        mean += g;
        pseudo += (g * g).real();
    }
    // Standard error of |g|^2 mean is sigma^2/sqrt(draws) ~ 0.008
    EXPECT_NEAR(sum2 / draws, 2.5, 0.05);
    EXPECT_LT(std::abs(mean / static_cast<double>(draws)), 0.03);
    EXPECT_LT(std::abs(pseudo / draws), 0.05);
}

TEST(Rcs, ZeroOutsideTargetsAndPhaseApplied) {
    const SceneConfig s = small_scene();
    const auto r = sample_rcs(s, 3);
    for (std::size_t b = 0; b < 2; ++b) {
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t m = 0; m < 8; ++m) {
                const bool target = m == 0 || m == 2 || m == 7;
                EXPECT_EQ(r.g(b, a, m) != cplx{}, target);
                const cplx expect = r.g(b, a, m) * carrier_phase(s.carrier_hz, r.tau_sum(b, a, m));
                EXPECT_LT(std::abs(r.d(b, a, m) - expect), 1e-15);
            }
        }
    }
}

TEST(Synthesize, MatchesLinearConvolutionOracle) {
    const SceneConfig s = small_scene();
    const WaveformSet ws = small_waveform(30);
    const auto rcs = sample_rcs(s, 4);
    const ReceivedFrame f = synthesize_noiseless(ws, rcs, s);
    const PulseLayout& layout = ws.layout();
    ASSERT_EQ(f.streams.size(), 4u);
    for (std::size_t b = 0; b < 2; ++b) {
        for (std::size_t p = 0; p < 2; ++p) {
            ComplexSeq expect(layout.frame_length());
            for (std::size_t a = 0; a < 2; ++a) {
                ComplexSeq x(layout.transmit_length());
                for (std::size_t i = 0; i < x.size(); ++i) x[i] = ws.time(a, p)[i % 64];
                ComplexSeq h(s.eta[b][a] + s.range_cells);
                for (std::size_t m = 0; m < s.range_cells; ++m) h[s.eta[b][a] + m] = rcs.d(b, a, m);
                const ComplexSeq y = dsp::linear_convolve(x, h);
                ASSERT_LE(y.size(), expect.size());
                for (std::size_t i = 0; i < y.size(); ++i) expect[i] += y[i];
            }
            EXPECT_LT(max_abs_diff(f.stream(b, p), expect), 1e-13);
        }
    }
}

TEST(Synthesize, LinearInRcs) {
    const SceneConfig s = small_scene();
    const WaveformSet ws = small_waveform(31);
    const auto r1 = sample_rcs(s, 1);
    const auto r2 = sample_rcs(s, 2);
    Tensor3<cplx> g(2, 2, 8);
    const cplx c1{0.5, -1.0}, c2{2.0, 0.25};
    for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = c1 * r1.g.data()[i] + c2 * r2.g.data()[i];
    const auto f = synthesize_noiseless(ws, make_rcs(s, g), s);
    const auto f1 = synthesize_noiseless(ws, r1, s);
    const auto f2 = synthesize_noiseless(ws, r2, s);
    for (std::size_t j = 0; j < f.streams.size(); ++j) {
        ComplexSeq expect(f.streams[j].size());
        for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = c1 * f1.streams[j][i] + c2 * f2.streams[j][i];
        EXPECT_LT(max_abs_diff(f.streams[j], expect), 1e-12);
    }
}

TEST(Synthesize, RejectsMismatchedScene) {
    SceneConfig s = small_scene();
    const WaveformSet ws = small_waveform(32);
    const auto r = sample_rcs(s, 1);
    s.range_cells = 9;
    EXPECT_THROW(synthesize_noiseless(ws, r, s), std::invalid_argument);
    s = small_scene();
    s.eta_max = 5;
    EXPECT_THROW(synthesize_noiseless(ws, r, s), std::invalid_argument);
}

TEST(Noise, VarianceAndSeeding) {
    SceneConfig s = small_scene();
    s.sigma_d2 = 0.0;
    s.sigma_n2 = 0.3;
    const WaveformSet ws = small_waveform(33);
    const auto r = sample_rcs(s, 1);
    double acc = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto f = synthesize_received(ws, r, s, seed);
        EXPECT_TRUE(f.noisy);
        for (const auto& st : f.streams) {
            for (const auto& v : st) {
                acc += std::norm(v);
                ++count;
            }
        }
    }
    EXPECT_NEAR(acc / static_cast<double>(count), 0.3, 0.005);
    const auto a = synthesize_received(ws, r, s, 9);
    const auto b = synthesize_received(ws, r, s, 9);
    EXPECT_EQ(a.streams, b.streams);
    EXPECT_NE(a.stream(0, 0), a.stream(0, 1));
    s.sigma_n2 = 0.0;
    EXPECT_FALSE(synthesize_received(ws, r, s, 9).noisy);
}

TEST(FrameCsv, Header) {
    const SceneConfig s = small_scene();
    const auto f = synthesize_noiseless(small_waveform(34), sample_rcs(s, 1), s);
    std::ostringstream out;
    write_frame_csv(out, f);
    EXPECT_EQ(out.str().rfind("beta,p,i,re,im\n", 0), 0u);
}
