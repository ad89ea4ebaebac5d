#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hypdiff {

/// Unnormalised forward DFT, F_k = sum_j f_j exp(-2 pi i j k / n).
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> in);

/// Inverse DFT normalised by 1/n, so ifft(fft(x)) == x.
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> in);

} // namespace hypdiff
