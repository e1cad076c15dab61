#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tnls {

/// Black-hole mass in geometric units and the constants derived from it.
struct SchwarzschildParams {
  double mass = 1.0;

  double horizon() const { return 2.0 * mass; }

  /// Tortoise coordinate of r = 8M/3, where the effective potential peaks.
  double alpha() const;
};

/// Tortoise coordinate r_* = r + 2M log(r - 2M) for r > 2M.
/// Throws std::domain_error on or inside the horizon.
double tortoise(double r, const SchwarzschildParams& bh);

/// Numerical inverse of the tortoise map: returns r > 2M with
/// |tortoise(r) - r_star| < tol. Safeguarded Newton iteration with a
/// bisection fallback; the near-horizon branch starts from the
/// asymptotic r ~ 2M + exp(-1 + r_star/2M).
double inverse_tortoise(double r_star, const SchwarzschildParams& bh,
                        double tol = 1e-12);

/// Same solve, returning r - 2M. This stays meaningful deep in the
/// near-horizon region, where r - 2M underflows relative to 2M and
/// r itself rounds to the horizon value in double precision.
double inverse_tortoise_offset(double r_star, const SchwarzschildParams& bh,
                               double tol = 1e-12);

/// Effective potential V(r_*) = (2M/r^3)(1 - 2M/r) of the reduced
/// radial problem. Positive everywhere, vanishing at both ends.
double potential(double r_star, const SchwarzschildParams& bh);

/// Closed-form dV/dr_* = (2M/r^4)(1 - 2M/r)(8M/r - 3). Positive for
/// 2M < r < 8M/3, zero at r = 8M/3, negative beyond.
double potential_derivative(double r_star, const SchwarzschildParams& bh);

/// Uniform periodic lattice in the tortoise coordinate with the radial
/// map and the potential tabulated once at construction. Immutable
/// afterwards; safe for concurrent reads.
class Grid {
 public:
  Grid(std::size_t n, double r_star_min, double r_star_max,
       SchwarzschildParams bh, double tol = 1e-12);

  std::size_t size() const { return n_; }
  double r_star_min() const { return r_star_min_; }
  double r_star_max() const { return r_star_max_; }
  double spacing() const { return spacing_; }
  double length() const { return r_star_max_ - r_star_min_; }
  const SchwarzschildParams& params() const { return bh_; }

  std::span<const double> r_star() const { return r_star_; }
  std::span<const double> r() const { return r_; }
  /// r - 2M, exact even where r rounds to the horizon.
  std::span<const double> r_offset() const { return r_offset_; }
  std::span<const double> V() const { return V_; }
  std::span<const double> dV() const { return dV_; }

 private:
  std::size_t n_;
  double r_star_min_, r_star_max_, spacing_;
  SchwarzschildParams bh_;
  std::vector<double> r_star_, r_, r_offset_, V_, dV_;
};

}  // namespace tnls
