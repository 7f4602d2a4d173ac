#pragma once

// Complex-vector kernels shared by every stage of the radar chain.
//
// All transforms use the unitary 1/sqrt(N) scaling in both directions:
//   X_k = N^-1/2 sum_i x_i exp(-j 2 pi i k / N)
//   x_i = N^-1/2 sum_k X_k exp(+j 2 pi i k / N)
// so Parseval holds exactly and a delay-free channel keeps its sqrt(N) gain
// explicit in the range-recovery step.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cpofdm {

using cplx = std::complex<double>;
using ComplexSeq = std::vector<cplx>;

namespace dsp {

enum class ShiftDirection { left, right };

// Inclusive index range [first, last].
struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t size() const { return last - first + 1; }
    bool contains(std::size_t i) const { return i >= first && i <= last; }
};

ComplexSeq dft_unitary(std::span<const cplx> x);
ComplexSeq idft_unitary(std::span<const cplx> X);

// In-place variants; the buffer length selects the transform size.
void dft_unitary_inplace(std::span<cplx> x);
void idft_unitary_inplace(std::span<cplx> X);

// Left shift by p: y[i] = x[(i + p) mod N]. Right shift by p: y[(i + p) mod N] = x[i].
ComplexSeq cyclic_shift(std::span<const cplx> x, std::size_t positions, ShiftDirection direction);

ComplexSeq linear_convolve(std::span<const cplx> x, std::span<const cplx> h);

// PAPR in dB of the oversampled time signal of `spectrum` restricted to `window`.
// The window is given on the N-sample grid and covers samples
// [oversampling*first, oversampling*(last+1) - 1] of the LN-point IDFT of the
// spectrum zero-padded at its tail.
double papr_db(std::span<const cplx> spectrum, std::size_t oversampling, IndexRange window);

// [X_0 .. X_{N-1}, 0 .. 0] of length factor*N.
ComplexSeq zero_pad_tail(std::span<const cplx> spectrum, std::size_t factor);

double energy(std::span<const cplx> x);
bool all_finite(std::span<const cplx> x);

}  // namespace dsp
}  // namespace cpofdm
