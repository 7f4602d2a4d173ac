#include "cpofdm/fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace cpofdm::dsp {

namespace {

using cd = std::complex<double>;

std::complex<double> unit_phasor(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Plain product without the C99 NaN/Inf recovery path of operator*.
inline cd mul(cd a, cd b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

FftPlan::Radix2::Radix2(std::size_t size) : n(size) {
    if (n < 2) return;
    const int bits = std::countr_zero(n);
    bitrev.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
        bitrev[i] = r;
    }
    // Stage with butterfly span len uses twiddles[len/2 - 1 + j], j < len/2.
    twiddles.resize(n - 1);
    inverse_twiddles.resize(n - 1);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        for (std::size_t j = 0; j < half; ++j) {
            const cd w = unit_phasor(-2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(len));
            twiddles[half - 1 + j] = w;
            inverse_twiddles[half - 1 + j] = std::conj(w);
        }
    }
}

void FftPlan::Radix2::run(std::span<cd> data, bool inverse) const {
    if (n < 2) return;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = bitrev[i];
        if (i < j) std::swap(data[i], data[j]);
    }
    const cd* table = inverse ? inverse_twiddles.data() : twiddles.data();
    cd* x = data.data();
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const cd* w = table + half - 1;
        for (std::size_t start = 0; start < n; start += len) {
            cd* a = x + start;
            cd* b = a + half;
            for (std::size_t j = 0; j < half; ++j) {
                const cd u = a[j];
                const cd v = mul(b[j], w[j]);
                a[j] = u + v;
                b[j] = u - v;
            }
        }
    }
}

FftPlan::FftPlan(std::size_t n) : n_(n), pow2_(std::has_single_bit(n)) {
    if (n == 0) throw std::invalid_argument("FftPlan: length must be positive");
    if (pow2_) {
        radix2_ = Radix2(n);
        return;
    }
    std::size_t m = std::bit_ceil(2 * n - 1);
    radix2_ = Radix2(m);

    // k^2 mod 2n keeps the chirp argument small so the phase stays accurate for large k.
    chirp_.resize(n);
    const std::size_t two_n = 2 * n;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2 = (k * k) % two_n;
        chirp_[k] = unit_phasor(-std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n));
    }
    kernel_spectrum_.assign(m, cd{});
    kernel_spectrum_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n; ++k) {
        kernel_spectrum_[k] = std::conj(chirp_[k]);
        kernel_spectrum_[m - k] = std::conj(chirp_[k]);
    }
    radix2_.run(kernel_spectrum_, false);
}

void FftPlan::bluestein(std::span<cd> data) const {
    const std::size_t m = radix2_.n;
    thread_local std::vector<cd> work;
    work.assign(m, cd{});
    for (std::size_t k = 0; k < n_; ++k) work[k] = mul(data[k], chirp_[k]);
    radix2_.run(work, false);
    for (std::size_t k = 0; k < m; ++k) work[k] = mul(work[k], kernel_spectrum_[k]);
    radix2_.run(work, true);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n_; ++k) data[k] = mul(work[k], chirp_[k]) * inv_m;
}

void FftPlan::forward(std::span<cd> data) const {
    if (data.size() != n_) throw std::invalid_argument("FftPlan: buffer length does not match plan");
    if (n_ == 1) return;
    if (pow2_) {
        radix2_.run(data, false);
    } else {
        bluestein(data);
    }
}

void FftPlan::backward(std::span<cd> data) const {
    if (data.size() != n_) throw std::invalid_argument("FftPlan: buffer length does not match plan");
    if (n_ == 1) return;
    if (pow2_) {
        radix2_.run(data, true);
        return;
    }
    for (auto& v : data) v = std::conj(v);
    bluestein(data);
    for (auto& v : data) v = std::conj(v);
}

std::shared_ptr<const FftPlan> FftPlan::get(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto plan = std::make_shared<const FftPlan>(n);
    cache.emplace(n, plan);
    return plan;
}

}  // namespace cpofdm::dsp
