#include "cpofdm/layout.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cpofdm {

std::size_t nonzero_length(std::size_t num_subcarriers, std::size_t range_cells, std::size_t eta_max) {
    if (range_cells == 0) throw std::invalid_argument("range cell count M must be >= 1");
    const std::size_t used = 2 * eta_max + 2 * range_cells;
    if (num_subcarriers + 3 <= used) {
        std::ostringstream msg;
        msg << "N=" << num_subcarriers << " leaves no non-zero support for M=" << range_cells
            << ", eta_max=" << eta_max << " (need N >= 2 eta_max + 2M - 2)";
        throw std::invalid_argument(msg.str());
    }
    return num_subcarriers + 3 - used;
}

std::size_t PulseLayout::nonzero_length() const {
    return cpofdm::nonzero_length(num_subcarriers, range_cells, eta_max);
}

void PulseLayout::validate() const {
    if (range_cells == 0) throw std::invalid_argument("range cell count M must be >= 1");
    if (num_subcarriers < eta_max + range_cells) {
        std::ostringstream msg;
        msg << "N=" << num_subcarriers << " violates N >= eta_max + M = " << eta_max + range_cells;
        throw std::invalid_argument(msg.str());
    }
    (void)nonzero_length();
}

std::optional<std::string> zero_condition_violation(std::span<const cplx> time_seq, const PulseLayout& layout,
                                                    double tolerance) {
    if (time_seq.size() != layout.num_subcarriers) {
        std::ostringstream msg;
        msg << "sequence length " << time_seq.size() << " != N=" << layout.num_subcarriers;
        return msg.str();
    }
    const auto support = layout.support();
    for (std::size_t i = 0; i < time_seq.size(); ++i) {
        if (support.contains(i)) continue;
        const double mag = std::abs(time_seq[i]);
        if (mag > tolerance) {
            std::ostringstream msg;
            if (i < support.first) {
                msg << "zero head violated at sample " << i << " (|s|=" << mag << ")";
            } else {
                msg << "zero tail violated at sample " << i << " (|s|=" << mag
                    << "); the time-reversed pulse would break the zero head";
            }
            return msg.str();
        }
    }
    return std::nullopt;
}

}  // namespace cpofdm
