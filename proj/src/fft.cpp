#include "hypdiff/fft.hpp"

#include <fftw3.h>

#include <stdexcept>

namespace hypdiff {

namespace {

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> in,
                                            int sign) {
    if (in.empty()) throw std::invalid_argument("fft: empty input");
    const int n = static_cast<int>(in.size());
    std::vector<std::complex<double>> buf(in.begin(), in.end());
    std::vector<std::complex<double>> out(in.size());
    // std::complex<double> is layout-compatible with fftw_complex.
    fftw_plan plan = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(buf.data()),
        reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("fft: planner failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

} // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> in) {
    return transform(in, FFTW_FORWARD);
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> in) {
    auto out = transform(in, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(in.size());
    for (auto& v : out) v *= scale;
    return out;
}

} // namespace hypdiff
