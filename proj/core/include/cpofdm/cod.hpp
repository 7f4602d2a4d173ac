#pragma once

// Complex orthogonal designs (CODs) and the placement of the first
// transmitter's base pulses across all transmitters.
//
// A T x P design X has entries in {0, +-x_i, +-x_i^*} with
//   X X^H = (|x_1|^2 + ... + |x_P0|^2) I_T
// for every assignment. Using X as the per-subcarrier weighting matrix S_k
// makes every S_k flat-unitary whatever the base pulse spectra are, and the
// orthogonality never sees the propagation delays because they do not enter S_k.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpofdm/dsp.hpp"
#include "cpofdm/layout.hpp"
#include "cpofdm/waveform_set.hpp"

namespace cpofdm::cod {

enum class EntryKind { zero, variable, conjugate };

struct Entry {
    EntryKind kind = EntryKind::zero;
    int sign = 1;             // +1 or -1
    std::size_t variable = 0; // 0-based variable index

    static Entry none() { return {}; }
    static Entry var(std::size_t i, int sign = 1) { return {EntryKind::variable, sign, i}; }
    static Entry conj(std::size_t i, int sign = 1) { return {EntryKind::conjugate, sign, i}; }

    bool operator==(const Entry&) const = default;
};

class OrthogonalDesign {
public:
    // Row-major entries. Throws std::invalid_argument if a row does not use
    // every variable exactly once or an index is out of range.
    OrthogonalDesign(std::size_t rows, std::size_t cols, std::size_t num_vars, std::vector<Entry> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t num_vars() const { return num_vars_; }
    const Entry& at(std::size_t row, std::size_t col) const { return entries_[row * cols_ + col]; }

    // Numeric matrix for a given assignment of the variables.
    Eigen::MatrixXcd evaluate(std::span<const cplx> assignment) const;

    // Same design with one row removed (still a COD).
    OrthogonalDesign without_row(std::size_t row) const;

    // Human-readable grid, variables numbered from 1, e.g. "-x2*".
    std::string to_string() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t num_vars_;
    std::vector<Entry> entries_;
};

// [[x1, x2], [-x2*, x1*]]
OrthogonalDesign alamouti_design();
// The rate-3/4 design for four transmitters with one structural zero per row.
OrthogonalDesign cod4_design();
// Shipped designs: T=1 -> [x1], T=2 -> Alamouti, T=3 -> cod4 without its last row, T=4 -> cod4.
OrthogonalDesign design_for_transmitters(std::size_t num_tx);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool operator==(const Rational&) const = default;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// P0/P = (ceil(T/2) + 1) / (2 ceil(T/2)) for T >= 2, 1 for T = 1.
Rational cod_rate(std::size_t num_tx);

// Max Frobenius deviation ||X X^H - (sum |x_i|^2) I|| over `trials` random assignments.
double verify_cod(const OrthogonalDesign& design, std::size_t trials, std::uint64_t seed);

// Tolerance for the base-pulse zero-condition check.
inline constexpr double kZeroConditionTolerance = 1e-10;

// Places P0 base spectra (conceptually the first transmitter's non-zero
// pulses) into a T x P WaveformSet following `design`. Each base pulse must
// satisfy both the zero head and the zero tail condition so that conjugated
// (time-reversed) copies are still valid pulses.
WaveformSet place_pulses(const OrthogonalDesign& design, std::span<const ComplexSeq> base_pulses,
                         const PulseLayout& layout);

// max_k ||S_k S_k^H - c_k I||_2 (spectral norm), c_k the mean squared row norm at k.
double verify_flat_unitary(const WaveformSet& ws);

}  // namespace cpofdm::cod
