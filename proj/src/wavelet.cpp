#include "flowrecon/wavelet.hpp"
#include "flowrecon/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace flowrecon {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

} // namespace

std::size_t WaveletDecomposition::signal_length() const noexcept
{
    return approximation.size() << details.size();
}

std::size_t WaveletDecomposition::coefficient_count() const noexcept
{
    std::size_t n = approximation.size();
    for (const auto& d : details) {
        n += d.size();
    }
    return n;
}

HaarLevel haar_forward_level(std::span<const double> signal)
{
    if (signal.size() % 2 != 0) {
        throw Error(ErrorCode::OddLength, "signal length " + std::to_string(signal.size()) + " is odd");
    }
    const std::size_t half = signal.size() / 2;
    HaarLevel out;
    out.approximation.resize(half);
    out.detail.resize(half);
    for (std::size_t i = 0; i < half; ++i) {
        const double a = signal[2 * i];
        const double b = signal[2 * i + 1];
        out.approximation[i] = (a + b) * kInvSqrt2;
        out.detail[i] = (a - b) * kInvSqrt2;
    }
    return out;
}

std::vector<double> haar_inverse_level(std::span<const double> approximation, std::span<const double> detail)
{
    if (approximation.size() != detail.size()) {
        throw Error(ErrorCode::LengthMismatch, "approximation has " + std::to_string(approximation.size()) +
                                                   " coefficients, detail has " + std::to_string(detail.size()));
    }
    std::vector<double> out(2 * approximation.size());
    for (std::size_t i = 0; i < approximation.size(); ++i) {
        out[2 * i] = (approximation[i] + detail[i]) * kInvSqrt2;
        out[2 * i + 1] = (approximation[i] - detail[i]) * kInvSqrt2;
    }
    return out;
}

WaveletDecomposition haar_forward(std::span<const double> signal, int levels, int base_window_minutes)
{
    if (levels < 1) {
        throw Error(ErrorCode::LevelOutOfRange, "levels must be >= 1, got " + std::to_string(levels));
    }
    if (signal.empty() || max_levels(signal.size()) < levels) {
        throw Error(ErrorCode::NotDyadicallyDivisible,
                    "2^" + std::to_string(levels) + " does not divide length " + std::to_string(signal.size()));
    }
    WaveletDecomposition out;
    out.base_window_minutes = base_window_minutes;
    out.details.reserve(static_cast<std::size_t>(levels));
    std::vector<double> current(signal.begin(), signal.end());
    for (int j = 0; j < levels; ++j) {
        auto step = haar_forward_level(current);
        out.details.push_back(std::move(step.detail));
        current = std::move(step.approximation);
    }
    out.approximation = std::move(current);
    return out;
}

void validate(const WaveletDecomposition& decomposition)
{
    const std::size_t n = decomposition.signal_length();
    if (decomposition.details.empty() || decomposition.approximation.empty()) {
        throw Error(ErrorCode::LengthMismatch, "decomposition needs at least one level and one coefficient");
    }
    for (std::size_t j = 0; j < decomposition.details.size(); ++j) {
        const std::size_t expected = n >> (j + 1);
        if (decomposition.details[j].size() != expected) {
            throw Error(ErrorCode::LengthMismatch, "D_" + std::to_string(j + 1) + " has " +
                                                       std::to_string(decomposition.details[j].size()) +
                                                       " coefficients, expected " + std::to_string(expected));
        }
    }
}

std::vector<double> haar_inverse(const WaveletDecomposition& decomposition)
{
    validate(decomposition);
    std::vector<double> current = decomposition.approximation;
    for (auto j = decomposition.details.size(); j-- > 0;) {
        current = haar_inverse_level(current, decomposition.details[j]);
    }
    return current;
}

int max_levels(std::size_t n) noexcept
{
    if (n == 0) {
        return 0;
    }
    int k = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++k;
    }
    return k;
}

} // namespace flowrecon
