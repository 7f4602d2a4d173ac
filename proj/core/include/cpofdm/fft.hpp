#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace cpofdm::dsp {

// Precomputed plan for an unnormalized length-n DFT of arbitrary n.
// Powers of two run an iterative radix-2 transform; every other length goes
// through Bluestein's chirp-z reformulation on a power-of-two grid.
// A plan is immutable after construction and may be shared across threads.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);

    std::size_t size() const { return n_; }

    // sum_i x_i exp(-j 2 pi i k / n), no scaling.
    void forward(std::span<std::complex<double>> data) const;
    // sum_k X_k exp(+j 2 pi i k / n), no scaling.
    void backward(std::span<std::complex<double>> data) const;

    // Thread-local cache keyed by length.
    static std::shared_ptr<const FftPlan> get(std::size_t n);

private:
    struct Radix2 {
        std::size_t n = 0;
        std::vector<std::size_t> bitrev;
        std::vector<std::complex<double>> twiddles;          // per-stage exp(-j 2 pi j / len)
        std::vector<std::complex<double>> inverse_twiddles;  // conjugates

        explicit Radix2(std::size_t size = 0);
        void run(std::span<std::complex<double>> data, bool inverse) const;
    };

    void bluestein(std::span<std::complex<double>> data) const;

    std::size_t n_;
    bool pow2_;
    Radix2 radix2_;
    std::vector<std::complex<double>> chirp_;          // exp(-j pi k^2 / n)
    std::vector<std::complex<double>> kernel_spectrum_; // FFT of conj chirp, wrapped
};

}  // namespace cpofdm::dsp
