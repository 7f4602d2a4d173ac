#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "cpofdm/dsp.hpp"

namespace cpofdm {

// Time-index geometry of one CP-OFDM pulse with N subcarriers, M range cells
// and maximal relative pair delay eta_max (in samples).
//
//   [0, eta_max+M-2]              zero head (also the implicit CP)
//   [eta_max+M-1, N-eta_max-M+1]  non-zero support, length N_t
//   [N-eta_max-M+2, N-1]          zero tail, keeps the time-reversed pulse valid
struct PulseLayout {
    std::size_t num_subcarriers = 0;
    std::size_t range_cells = 0;
    std::size_t eta_max = 0;

    std::size_t cp_length() const { return eta_max + range_cells - 1; }
    std::size_t first_nonzero() const { return cp_length(); }
    std::size_t last_nonzero() const { return num_subcarriers - eta_max - range_cells + 1; }
    std::size_t nonzero_length() const;
    dsp::IndexRange support() const { return {first_nonzero(), last_nonzero()}; }

    // Samples per transmitted pulse including the CP: N + eta_max + M - 1.
    std::size_t transmit_length() const { return num_subcarriers + cp_length(); }
    // Samples per received stream: N + 2(eta_max + M) - 2.
    std::size_t frame_length() const { return num_subcarriers + 2 * (eta_max + range_cells) - 2; }

    // Throws std::invalid_argument unless N >= eta_max + M and N_t >= 1.
    void validate() const;

    bool operator==(const PulseLayout&) const = default;
};

// N_t = N - 2 eta_max - 2M + 3; throws when the support would be empty.
std::size_t nonzero_length(std::size_t num_subcarriers, std::size_t range_cells, std::size_t eta_max);

// Describes the first zero-condition violation of a length-N time sequence,
// or nullopt when both the head and the tail segments are below `tolerance`.
std::optional<std::string> zero_condition_violation(std::span<const cplx> time_seq, const PulseLayout& layout,
                                                    double tolerance);

}  // namespace cpofdm
