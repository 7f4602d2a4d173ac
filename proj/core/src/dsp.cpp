#include "cpofdm/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpofdm/fft.hpp"

namespace cpofdm::dsp {

void dft_unitary_inplace(std::span<cplx> x) {
    if (x.empty()) throw std::invalid_argument("dft_unitary: empty input");
    FftPlan::get(x.size())->forward(x);
    const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (auto& v : x) v *= scale;
}

void idft_unitary_inplace(std::span<cplx> X) {
    if (X.empty()) throw std::invalid_argument("idft_unitary: empty input");
    FftPlan::get(X.size())->backward(X);
    const double scale = 1.0 / std::sqrt(static_cast<double>(X.size()));
    for (auto& v : X) v *= scale;
}

ComplexSeq dft_unitary(std::span<const cplx> x) {
    ComplexSeq out(x.begin(), x.end());
    dft_unitary_inplace(out);
    return out;
}

ComplexSeq idft_unitary(std::span<const cplx> X) {
    ComplexSeq out(X.begin(), X.end());
    idft_unitary_inplace(out);
    return out;
}

ComplexSeq cyclic_shift(std::span<const cplx> x, std::size_t positions, ShiftDirection direction) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    std::size_t p = positions % n;
    if (direction == ShiftDirection::right) p = (n - p) % n;
    ComplexSeq out(n);
    std::rotate_copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p), x.end(), out.begin());
    return out;
}

ComplexSeq linear_convolve(std::span<const cplx> x, std::span<const cplx> h) {
    if (x.empty() || h.empty()) throw std::invalid_argument("linear_convolve: empty input");
    ComplexSeq out(x.size() + h.size() - 1, cplx{});
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == cplx{}) continue;
        for (std::size_t j = 0; j < h.size(); ++j) out[i + j] += x[i] * h[j];
    }
    return out;
}

ComplexSeq zero_pad_tail(std::span<const cplx> spectrum, std::size_t factor) {
    if (factor == 0) throw std::invalid_argument("zero_pad_tail: factor must be >= 1");
    ComplexSeq out(spectrum.size() * factor, cplx{});
    std::copy(spectrum.begin(), spectrum.end(), out.begin());
    return out;
}

double papr_db(std::span<const cplx> spectrum, std::size_t oversampling, IndexRange window) {
    if (oversampling == 0) throw std::invalid_argument("papr_db: oversampling must be >= 1");
    if (spectrum.empty()) throw std::invalid_argument("papr_db: empty spectrum");
    if (window.last < window.first || window.last >= spectrum.size()) {
        throw std::invalid_argument("papr_db: window is empty or exceeds the sequence length");
    }
    ComplexSeq time = zero_pad_tail(spectrum, oversampling);
    idft_unitary_inplace(time);

    const std::size_t lo = oversampling * window.first;
    const std::size_t hi = oversampling * (window.last + 1);
    double peak = 0.0;
    double sum = 0.0;
    for (std::size_t n = lo; n < hi; ++n) {
        const double p = std::norm(time[n]);
        peak = std::max(peak, p);
        sum += p;
    }
    const double mean = sum / static_cast<double>(hi - lo);
    if (mean <= 0.0) throw std::invalid_argument("papr_db: signal is zero over the window");
    return 10.0 * std::log10(peak / mean);
}

double energy(std::span<const cplx> x) {
    double e = 0.0;
    for (const auto& v : x) e += std::norm(v);
    return e;
}

bool all_finite(std::span<const cplx> x) {
    return std::all_of(x.begin(), x.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

}  // namespace cpofdm::dsp
