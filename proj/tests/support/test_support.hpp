#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "cpofdm/dsp.hpp"
#include "cpofdm/layout.hpp"
#include "cpofdm/random.hpp"

namespace cpofdm::test {

inline ComplexSeq random_seq(std::size_t n, std::uint64_t seed, double var = 1.0) {
    Rng rng(seed);
    ComplexSeq x(n);
    for (auto& v : x) v = rng.complex_normal(var);
    return x;
}

// O(N^2) transform straight from the definition; sign = -1 forward, +1 inverse.
inline ComplexSeq direct_dft(const ComplexSeq& x, int sign) {
    const std::size_t n = x.size();
    ComplexSeq out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{};
        for (std::size_t i = 0; i < n; ++i) {
            // (i*k mod n) keeps the angle small and exact.
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>((i * k) % n) / static_cast<double>(n);
            acc += x[i] * std::polar(1.0, ang);
        }
        out[k] = acc / std::sqrt(static_cast<double>(n));
    }
    return out;
}

inline double max_abs_diff(const ComplexSeq& a, const ComplexSeq& b) {
    EXPECT_EQ(a.size(), b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const ComplexSeq& a) {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

// Spectrum of a random pulse that is zero outside the layout's support.
inline ComplexSeq random_valid_pulse(const PulseLayout& layout, std::uint64_t seed) {
    ComplexSeq t(layout.num_subcarriers);
    Rng rng(seed);
    for (std::size_t i = layout.first_nonzero(); i <= layout.last_nonzero(); ++i) t[i] = rng.complex_normal(1.0);
    return dsp::dft_unitary(t);
}

}  // namespace cpofdm::test
