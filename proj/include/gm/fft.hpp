#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gm {

// Unnormalized DFT: X[k] = sum_n x[n] exp(-j 2 pi k n / N).
// Plans are cached per (size, direction) and per thread.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x);

// Zero-padded forward transform of length n (n >= x.size()).
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x, std::size_t n);

// Unnormalized inverse: x[n] = sum_k X[k] exp(+j 2 pi k n / N).
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> X);

}  // namespace gm
