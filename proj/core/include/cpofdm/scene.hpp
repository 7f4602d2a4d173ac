#pragma once

// Scene description (antenna delays, RCS statistics, noise) and the discrete
// channel that turns a WaveformSet into received sample streams:
//
//   u_{beta,i}^{(p)} = sum_alpha sum_{m=0}^{M-1} d_{beta,alpha,m} s_{alpha, i-m-eta_{beta,alpha}}^{(p)} + w
//
// with i = 0 .. N + 2(eta_max + M) - 3.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cpofdm/dsp.hpp"
#include "cpofdm/layout.hpp"
#include "cpofdm/tensor.hpp"
#include "cpofdm/waveform_set.hpp"

namespace cpofdm {

inline constexpr double kSpeedOfLight = 299792458.0;

struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Integer delay matrix indexed [beta][alpha].
using DelayMatrix = std::vector<std::vector<std::size_t>>;

struct Geometry {
    std::vector<Point3> transmitters;
    std::vector<Point3> receivers;
    Point3 nearest_cell;  // position of range cell 0
    double bandwidth_hz = 0.0;
};

struct GeometryDelays {
    DelayMatrix eta;
    std::vector<std::vector<double>> residual;  // (tau0 - tau_min)/T_s - eta, in samples
    std::vector<std::vector<double>> tau0_s;    // tau_{beta,alpha,0}
    double tau_min_s = 0.0;
    std::size_t eta_max = 0;
};

// Slant ranges to cell 0, tau0 = (R_alpha + R_beta)/c, eta rounded to the nearest sample.
GeometryDelays delays_from_geometry(const Geometry& geometry);

struct SceneConfig {
    std::size_t num_tx = 1;
    std::size_t num_rx = 1;
    std::size_t range_cells = 1;
    std::size_t eta_max = 0;
    DelayMatrix eta;                 // num_rx x num_tx, entries in [0, eta_max]
    double carrier_hz = 0.0;
    double bandwidth_hz = 1.0;
    std::vector<std::size_t> target_cells;
    double sigma_d2 = 1.0;
    double sigma_n2 = 0.0;
    double range_cell0_m = 0.0;
    // Optional tau_{beta,alpha,0} in seconds; when empty it is
    // 2 * range_cell0_m / c + eta * T_s.
    std::vector<std::vector<double>> tau0_s;

    double sample_period() const { return 1.0 / bandwidth_hz; }
    double range_resolution() const { return kSpeedOfLight * sample_period() / 2.0; }
    double tau_min() const { return 2.0 * range_cell0_m / kSpeedOfLight; }
    double base_delay(std::size_t beta, std::size_t alpha) const;
    // tau_{beta,alpha,0} + m T_s
    Tensor3<double> tau_sum() const;

    void validate() const;
};

// `count` distinct cells out of [0, M-1], ascending, seeded.
std::vector<std::size_t> random_target_cells(std::size_t range_cells, std::size_t count, std::uint64_t seed);
// Random R x T delays in [0, eta_max].
DelayMatrix random_delays(std::size_t num_rx, std::size_t num_tx, std::size_t eta_max, std::uint64_t seed);

struct RcsRealization {
    Tensor3<cplx> g;          // (beta, alpha, m)
    Tensor3<cplx> d;          // g * exp(-j 2 pi f_c tau_sum)
    Tensor3<double> tau_sum;  // seconds
};

// exp(-j 2 pi f_c tau), reduced modulo one carrier cycle before the exponential.
cplx carrier_phase(double carrier_hz, double tau_s);

// g ~ CN(0, sigma_d2) on the target cells of every pair, zero elsewhere.
RcsRealization sample_rcs(const SceneConfig& scene, std::uint64_t seed);
// Rebuilds d and tau_sum for a given g (used for superposition and relabelling).
RcsRealization make_rcs(const SceneConfig& scene, Tensor3<cplx> g);

struct ReceivedFrame {
    std::size_t num_rx = 0;
    std::size_t num_pulses = 0;
    std::vector<ComplexSeq> streams;  // [beta * P + p]
    std::uint64_t noise_seed = 0;
    bool noisy = false;

    const ComplexSeq& stream(std::size_t beta, std::size_t p) const { return streams.at(beta * num_pulses + p); }
    ComplexSeq& stream(std::size_t beta, std::size_t p) { return streams.at(beta * num_pulses + p); }
};

// Noise-free channel output for every (beta, p), evaluated as the direct double sum.
ReceivedFrame synthesize_noiseless(const WaveformSet& ws, const RcsRealization& rcs, const SceneConfig& scene);
// Adds CN(0, sigma_n2) to every sample; stream (beta, p) uses derive_seed(noise_seed, {beta, p}).
void add_noise(ReceivedFrame& frame, double sigma_n2, std::uint64_t noise_seed);
// synthesize_noiseless followed by add_noise with scene.sigma_n2 (skipped when it is zero).
ReceivedFrame synthesize_received(const WaveformSet& ws, const RcsRealization& rcs, const SceneConfig& scene,
                                  std::uint64_t noise_seed);

// "beta,p,i,re,im"
void write_frame_csv(std::ostream& out, const ReceivedFrame& frame);

}  // namespace cpofdm
