#pragma once

#include <cmath>
#include <numbers>

namespace qwalk {

inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt2 = std::numbers::sqrt2;

/// Hadamard (unbiased) coin angle.
inline constexpr double hadamard_theta = pi / 4.0;

/// Tolerances shared by the library checks and the test suites.
namespace tol {
inline constexpr double norm = 1e-12;
inline constexpr double exact = 1e-12;
inline constexpr double psd = 1e-10;
inline constexpr double weights = 1e-15;
inline constexpr double angle_slack = 1e-12;
}  // namespace tol

/// Markov matrix entries of the Hadamard measurement protocol.
inline constexpr double markov_p = 1.0 - 1.0 / (2.0 * sqrt2);
inline constexpr double markov_q = 1.0 / (2.0 * sqrt2);

/// 1 - 1/sqrt(2): amplitude of the initial-condition dependence of the
/// asymptotic chirality distribution, and second eigenvalue of the chain.
inline constexpr double hadamard_memory = 1.0 - 1.0 / sqrt2;

}  // namespace qwalk
