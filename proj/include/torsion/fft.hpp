#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace torsion::fft {

bool is_power_of_two(std::size_t n);

// In-place radix-2 transform; size must be a power of two. The inverse
// includes the 1/N normalization.
void transform(std::vector<std::complex<double>>& data, bool inverse);

// Forward transform of a real record, returning bins 0..N/2.
std::vector<std::complex<double>> real_forward(std::span<const double> x);

}  // namespace torsion::fft
