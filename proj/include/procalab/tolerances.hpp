#pragma once

// Numerical tolerances used across the library. All contract checks
// reference these constants rather than scattering literals.
namespace procalab {

struct Tol {
  static constexpr double orthonormality = 1e-12;  // basis Gram matrix vs identity
  static constexpr double anti_hermitian = 1e-12;  // ||X + X*||
  static constexpr double unitarity = 1e-10;       // ||U U* - I||
  static constexpr double special_det = 1e-10;     // |det U - 1| for SU(N)
  static constexpr double chart_round_trip = 1e-10;
  static constexpr double coeff_reconstruct = 1e-12;
  static constexpr double symmetry = 1e-12;        // matrix symmetry checks
  static constexpr double series_tail = 1e-16;     // series truncation threshold
};

// Default chart radius r0 for the logarithmic coordinates: the log power
// series converges on ||I - U|| < r0 and the norm-comparison inequality
// (1/2)||I-U|| <= ||log U|| <= 2||I-U|| holds on ||I - U|| <= 1/2.
inline constexpr double kDefaultChartRadius = 0.5;

}  // namespace procalab
