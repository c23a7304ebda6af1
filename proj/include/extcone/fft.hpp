#pragma once

#include <complex>
#include <vector>

namespace extcone {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

} // namespace extcone
