#pragma once

#include <complex>
#include <numbers>

namespace bomca {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

}  // namespace bomca
