#pragma once

// Closed-form P-pulse sets with exactly flat total spectral power.
//
// The P pulses are the rows of a P x P polyphase matrix S(z) (row p = pulse,
// column q = q-th polyphase component). If S(z) is paraunitary,
// sum_p |S^(p)(e^jw)|^2 is constant on the unit circle, so the pulses meet the
// flat-power criterion at every subcarrier. S(z) is generated by the
// degree-one factorization
//   S(z) = scale * prod_l (I - v_l v_l^H + z^-1 v_l v_l^H) * V
// with V unitary and unit-norm v_l. Using floor((N_t - P)/P) factors keeps the
// time support inside the N_t non-zero samples.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cpofdm/dsp.hpp"
#include "cpofdm/layout.hpp"

namespace cpofdm::paraunitary {

struct ParaunitaryFactors {
    std::size_t order = 0;            // P
    std::size_t nonzero_length = 0;   // N_t
    std::size_t num_subcarriers = 0;  // N
    std::size_t num_tx = 0;           // T
    Eigen::MatrixXcd unitary;         // V, P x P
    std::vector<Eigen::VectorXcd> vectors;  // v_l, unit norm
    // 1/sqrt(N T P): flat total power 1/(N T) and per-pulse energy 1/(T P).
    double scale = 0.0;
};

// floor((N_t - P) / P)
std::size_t factor_count(std::size_t order, std::size_t nonzero_length);

// V from a seeded complex Gaussian matrix orthonormalized by QR (with the
// R-diagonal phases folded back in); each v_l a normalized Gaussian vector.
ParaunitaryFactors random_factors(std::size_t order, std::size_t nonzero_length, std::size_t num_subcarriers,
                                  std::size_t num_tx, std::uint64_t seed);

// Polynomial matrix S(z) = sum_d taps[d] z^-d.
class PolyphaseMatrix {
public:
    PolyphaseMatrix() = default;
    explicit PolyphaseMatrix(std::vector<Eigen::MatrixXcd> taps);

    std::size_t order() const { return taps_.empty() ? 0 : static_cast<std::size_t>(taps_.front().rows()); }
    std::size_t degree() const { return taps_.empty() ? 0 : taps_.size() - 1; }
    const std::vector<Eigen::MatrixXcd>& taps() const { return taps_; }

    // Coefficients of S_q^{(p)}(z) in powers of z^-1.
    ComplexSeq coefficients(std::size_t p, std::size_t q) const;
    Eigen::MatrixXcd evaluate(cplx z) const;

private:
    std::vector<Eigen::MatrixXcd> taps_;
};

PolyphaseMatrix synthesize_polyphase(const ParaunitaryFactors& factors);

// Assembles s^{(p)}_{first + P i + q} = sqrt(N) * [S_q^{(p)}]_i (zero elsewhere) and
// returns the N-point unitary spectra. Throws std::invalid_argument if the
// support would pass N - first_nonzero.
std::vector<ComplexSeq> polyphase_to_pulses(const PolyphaseMatrix& pm, std::size_t num_subcarriers,
                                            std::size_t first_nonzero);

// random_factors -> synthesize_polyphase -> polyphase_to_pulses for a layout.
std::vector<ComplexSeq> paraunitary_pulses(std::size_t order, const PulseLayout& layout, std::size_t num_tx,
                                           std::uint64_t seed);

}  // namespace cpofdm::paraunitary
