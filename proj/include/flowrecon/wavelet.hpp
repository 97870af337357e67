#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flowrecon {

/// Multi-level orthonormal Haar decomposition of a signal of length N.
///
/// details[0] is D_1 (finest, length N/2) and details[k-1] is D_k (length
/// N/2^k). The approximation is A_k with length N/2^k, so the coefficient
/// count always sums to N.
struct WaveletDecomposition {
    std::vector<double> approximation;
    std::vector<std::vector<double>> details;
    int base_window_minutes = 5;

    int levels() const noexcept { return static_cast<int>(details.size()); }
    std::size_t signal_length() const noexcept;
    std::size_t coefficient_count() const noexcept;
};

struct HaarLevel {
    std::vector<double> approximation;
    std::vector<double> detail;
};

// One analysis step: a_i = (x_2i + x_2i+1)/sqrt2, d_i = (x_2i - x_2i+1)/sqrt2.
// Throws OddLength for odd input; no padding is applied.
HaarLevel haar_forward_level(std::span<const double> signal);

// One synthesis step, the exact inverse of haar_forward_level.
// Throws LengthMismatch when the two vectors differ in length.
std::vector<double> haar_inverse_level(std::span<const double> approximation,
                                       std::span<const double> detail);

// Throws NotDyadicallyDivisible when 2^levels does not divide the length, and
// LevelOutOfRange for levels < 1.
WaveletDecomposition haar_forward(std::span<const double> signal, int levels,
                                  int base_window_minutes = 5);

// Applies haar_inverse_level from level k down to level 1.
// Throws LengthMismatch when the decomposition is malformed.
std::vector<double> haar_inverse(const WaveletDecomposition& decomposition);

// Throws LengthMismatch unless |A| * 2^k == N and |D_j| == N / 2^j.
void validate(const WaveletDecomposition& decomposition);

// Largest k >= 0 with 2^k dividing n. Returns 0 for n == 0.
int max_levels(std::size_t n) noexcept;

} // namespace flowrecon
