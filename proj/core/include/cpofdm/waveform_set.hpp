#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cpofdm/dsp.hpp"
#include "cpofdm/layout.hpp"

namespace cpofdm {

// Frequency-domain weights S_{alpha,k}^{(p)} of every (transmitter, pulse slot)
// and their N-point time sequences. Immutable once built.
class WaveformSet {
public:
    WaveformSet() = default;
    // `freq_weights` is indexed [alpha * num_pulses + p], each of length N.
    WaveformSet(PulseLayout layout, std::size_t num_tx, std::size_t num_pulses, std::size_t num_nonzero,
                std::vector<ComplexSeq> freq_weights);

    const PulseLayout& layout() const { return layout_; }
    std::size_t num_tx() const { return num_tx_; }
    std::size_t num_pulses() const { return num_pulses_; }
    std::size_t num_nonzero() const { return num_nonzero_; }
    std::size_t num_subcarriers() const { return layout_.num_subcarriers; }

    const ComplexSeq& freq(std::size_t alpha, std::size_t p) const { return freq_[alpha * num_pulses_ + p]; }
    const ComplexSeq& time(std::size_t alpha, std::size_t p) const { return time_[alpha * num_pulses_ + p]; }

    // T x P weighting matrix at subcarrier k.
    Eigen::MatrixXcd subcarrier_matrix(std::size_t k) const;
    // sum_p |S_{alpha,k}^{(p)}|^2 for k = 0..N-1.
    std::vector<double> total_power_profile(std::size_t alpha) const;
    double pulse_energy(std::size_t alpha, std::size_t p) const;
    bool is_zero_pulse(std::size_t alpha, std::size_t p) const;

    // Periodic extension of the time sequence: s_i = s_{i mod N} for
    // 0 <= i <= N + eta_max + M - 2, zero elsewhere (CP realised by the zero head).
    cplx transmitted_sample(std::size_t alpha, std::size_t p, std::ptrdiff_t i) const;

    bool operator==(const WaveformSet& other) const;

private:
    PulseLayout layout_{};
    std::size_t num_tx_ = 0;
    std::size_t num_pulses_ = 0;
    std::size_t num_nonzero_ = 0;
    std::vector<ComplexSeq> freq_;
    std::vector<ComplexSeq> time_;
};

}  // namespace cpofdm
