// Thin FFTW wrapper shared by the modules. Plans are cached per size and
// created under a mutex; execution uses the new-array interface, which is
// safe to call concurrently.

#pragma once

#include <complex>
#include <span>

namespace fwlab::detail {

/// out_k = sum_j in_j exp(-2 pi i jk/N), unnormalized.
void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

/// out_j = sum_k in_k exp(+2 pi i jk/N), unnormalized.
void fft_backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

}  // namespace fwlab::detail
