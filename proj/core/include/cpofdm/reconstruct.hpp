#pragma once

// Receive chain: trim the CP-length head and tail, N-point DFT, per-subcarrier
// transmitter separation, IDFT + cyclic shift back to range cells, and carrier
// phase compensation. With a CP of eta_max + M - 1 samples the channel is
// circular on the trimmed window, so every step is exact in the absence of noise.

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cpofdm/dsp.hpp"
#include "cpofdm/layout.hpp"
#include "cpofdm/scene.hpp"
#include "cpofdm/tensor.hpp"
#include "cpofdm/waveform_set.hpp"

namespace cpofdm {

// Drops eta_max + M - 1 samples at both ends and returns the unitary N-point DFT.
ComplexSeq trim_and_demodulate(std::span<const cplx> stream, const PulseLayout& layout);

struct SubcarrierObservations {
    std::vector<Eigen::MatrixXcd> u;  // per k: R x P

    std::size_t num_subcarriers() const { return u.size(); }
};

SubcarrierObservations build_observations(const ReceivedFrame& frame, const PulseLayout& layout);

enum class SeparationPath {
    automatic,  // fast path when the set is flat-unitary, general otherwise
    general,    // U_k S_k^H (S_k S_k^H)^-1
    fast,       // U_k S_k^H / c_k; requires flat-unitary S_k
};

class RankDeficientError : public std::invalid_argument {
public:
    RankDeficientError(std::size_t subcarrier, double ratio);
    std::size_t subcarrier() const { return subcarrier_; }

private:
    std::size_t subcarrier_;
};

// Smallest/largest singular value threshold for the rank check.
inline constexpr double kRankTolerance = 1e-10;

// Per-subcarrier right inverses of S_k, validated once and reusable across
// noise realisations.
class TransmitterSeparator {
public:
    TransmitterSeparator(const WaveformSet& ws, SeparationPath path = SeparationPath::automatic);

    // D_k = U_k * inverse_k for every k; U_k is R x P, D_k is R x T.
    std::vector<Eigen::MatrixXcd> apply(const SubcarrierObservations& obs) const;

    bool uses_fast_path() const { return fast_; }
    const Eigen::MatrixXcd& right_inverse(std::size_t k) const { return inverse_.at(k); }

private:
    std::vector<Eigen::MatrixXcd> inverse_;  // P x T
    bool fast_ = false;
};

std::vector<Eigen::MatrixXcd> separate_transmitters(const SubcarrierObservations& obs, const WaveformSet& ws,
                                                    SeparationPath path = SeparationPath::automatic);

// Unitary IDFT of D_hat_{beta,alpha,0..N-1}, right cyclic shift by
// eta_max + M - eta - 1, first M entries. Noise-free result is sqrt(N) d.
ComplexSeq recover_rcs(std::span<const cplx> d_hat_k, std::size_t eta, const PulseLayout& layout);

// g_hat = d_hat / sqrt(N) * exp(+j 2 pi f_c tau_sum)
Tensor3<cplx> phase_compensate(const Tensor3<cplx>& d_hat, const Tensor3<double>& tau_sum, double carrier_hz,
                               std::size_t num_subcarriers);

struct RangeEstimate {
    Tensor3<cplx> d_hat;  // carries the sqrt(N) gain
    Tensor3<cplx> g_hat;
};

RangeEstimate reconstruct_all(const ReceivedFrame& frame, const WaveformSet& ws, const SceneConfig& scene,
                              SeparationPath path = SeparationPath::automatic);
// Same with a prepared separator (Monte Carlo loops).
RangeEstimate reconstruct_all(const ReceivedFrame& frame, const WaveformSet& ws, const SceneConfig& scene,
                              const TransmitterSeparator& separator);

struct PairScore {
    std::size_t beta = 0;
    std::size_t alpha = 0;
    double mse = 0.0;                // mean over all M cells of |g_hat - g|^2
    double max_abs_error = 0.0;
    double signal_power = 0.0;       // mean |g|^2 over target cells
    double empirical_snr_db = 0.0;   // signal_power / mse; +inf when mse is 0
};

struct EstimateScore {
    std::vector<PairScore> pairs;
    double mse = 0.0;                // mean over all pairs and cells
    double max_relative_error = 0.0; // max |g_hat - g| / max |g|
};

// Compares any (beta, alpha, m) amplitude estimate with the true g.
EstimateScore score_estimate(const Tensor3<cplx>& g_hat, const Tensor3<cplx>& g,
                             const std::vector<std::size_t>& target_cells);

// N^2 |d|^2 / (sigma^2 sum_k 1/P_k), P_k = sum_p |S_{alpha,k}^(p)|^2. Throws if sigma_n2 <= 0.
double snr_post_theory_db(double d_power, std::span<const double> power_profile, double sigma_n2);
// |d|^2 / (T sigma^2)
double snr_max_theory_db(double d_power, std::size_t num_tx, double sigma_n2);
// |d|^2 / (N_t T P0 sigma^2); snr_max = P0 N_t snr_pre.
double snr_pre_theory_db(double d_power, std::size_t nonzero_length, std::size_t num_tx, std::size_t num_nonzero,
                         double sigma_n2);

// "beta,alpha,m,re,im,abs" of g_hat
void write_estimate_csv(std::ostream& out, const Tensor3<cplx>& g_hat);

}  // namespace cpofdm
