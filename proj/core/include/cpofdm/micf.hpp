#pragma once

// Joint design of P non-zero base pulses by modified iterative clipping and
// filtering: alternate between the oversampled time domain (zero head/tail
// window + amplitude clip) and the frequency domain (out-of-band removal +
// clipping of the total power per subcarrier), then force the zero conditions
// and the energy exactly at the end.
//
// P here counts non-zero pulses, i.e. the base pulses later fed to
// cod::place_pulses.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "cpofdm/dsp.hpp"
#include "cpofdm/layout.hpp"

namespace cpofdm::micf {

struct MicfConfig {
    std::size_t num_subcarriers = 302;
    std::size_t range_cells = 96;
    std::size_t eta_max = 40;
    std::size_t num_tx = 2;
    std::size_t num_pulses = 4;
    std::size_t iterations = 8;   // Q
    double papr_d_db = 0.1;
    double g_f = 0.1;
    std::size_t oversampling = 4; // L
    std::uint64_t seed = 1;

    PulseLayout layout() const { return {num_subcarriers, range_cells, eta_max}; }
    // Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

struct DesignResult {
    std::vector<ComplexSeq> pulses;  // P spectra of length N
    std::vector<double> papr_db;     // per pulse
    double mean_papr_db = 0.0;
    double xi_db = 0.0;
    std::size_t iterations_run = 0;
};

// SNR degradation factor 10 log10(N^2 / (E sum_k 1/P_k)), P_k = sum_p |S_k^(p)|^2,
// E = sum_k P_k. This equals N^2 T / sum_k P_k^-1 once the energy is 1/T and
// does not depend on the overall scale. Returns -infinity if some P_k is zero.
double xi_db(std::span<const ComplexSeq> pulses);

// Saturates |x_n| at A = sqrt(mean_{window}|x|^2 * 10^(papr_d/10)) inside `window`,
// keeping the phase. Samples outside the window are copied unchanged.
ComplexSeq time_clip(std::span<const cplx> x, double papr_d_db, dsp::IndexRange window);

// Called after the frequency clip of each iteration (1-based) with the clipped
// spectra and the pre-clip average power Pav(q) the clip bounds refer to.
using IterationObserver =
    std::function<void(std::size_t iteration, std::span<const ComplexSeq> spectra, double average_power)>;

DesignResult micf_design(const MicfConfig& cfg, const IterationObserver& observer = {});

struct Thresholds {
    double xi_min_db = -0.08;
    double papr_max_db = 2.2;
};

struct MonteCarloResult {
    // Indexed by trial t (seed = cfg.seed + t).
    std::vector<double> mean_papr_db;
    std::vector<double> xi_db;
    // Ascending copies, i.e. empirical CDF abscissae.
    std::vector<double> papr_cdf;
    std::vector<double> xi_cdf;
    std::vector<std::size_t> qualifying_trials;
    std::size_t qualifying = 0;
};

// Runs micf_design for seeds cfg.seed .. cfg.seed + trials - 1 on `threads`
// workers (0 = hardware concurrency). Output does not depend on `threads`.
MonteCarloResult monte_carlo_cdf(const MicfConfig& cfg, std::size_t trials, Thresholds thresholds,
                                 std::size_t threads = 1);

double median(std::vector<double> values);

// "metric,value,probability" rows for both CDFs.
void write_cdf_csv(std::ostream& out, const MonteCarloResult& result);

}  // namespace cpofdm::micf
