#include "tnls/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tnls {

double SchwarzschildParams::alpha() const {
  return 8.0 * mass / 3.0 + 2.0 * mass * std::log(2.0 * mass / 3.0);
}

double tortoise(double r, const SchwarzschildParams& bh) {
  const double h = bh.horizon();
  if (!(r > h)) {
    throw std::domain_error("tortoise: r = " + std::to_string(r) +
                            " is not outside the horizon r > " +
                            std::to_string(h));
  }
  return r + 2.0 * bh.mass * std::log(r - h);
}

namespace {

// r_* as a function of the horizon offset x = r - 2M.
double tortoise_from_offset(double x, double two_m) {
  return two_m + x + two_m * std::log(x);
}

}  // namespace

double inverse_tortoise_offset(double r_star, const SchwarzschildParams& bh,
                               double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("inverse_tortoise: tol must be > 0");
  if (!std::isfinite(r_star)) throw std::invalid_argument("inverse_tortoise: r_star must be finite");

  const double two_m = bh.horizon();

  // Initial guess: near-horizon asymptotic below 2M, otherwise r ~ r_star
  // corrected by the log term.
  double x;
  if (r_star < two_m) {
    x = std::exp(-1.0 + r_star / two_m);
  } else {
    x = std::max(r_star - two_m - two_m * std::log(std::max(r_star, 1.0)),
                 0.5 * two_m);
  }

  // Bracket for the bisection fallback. F is strictly increasing in x,
  // F -> -inf as x -> 0+.
  double lo = std::numeric_limits<double>::min();
  double hi = std::max(r_star, 2.0 * two_m) + 1.0;
  if (x <= lo || x >= hi) x = 0.5 * hi;

  const int max_iters = 200;
  for (int it = 0; it < max_iters; ++it) {
    const double f = tortoise_from_offset(x, two_m) - r_star;
    if (std::abs(f) < tol) return x;
    if (f > 0.0) hi = x; else lo = x;

    // Newton step: F'(x) = 1 + 2M/x = (x + 2M)/x.
    double next = x - f * x / (x + two_m);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw std::runtime_error("inverse_tortoise: no convergence after 200 iterations");
}

double inverse_tortoise(double r_star, const SchwarzschildParams& bh,
                        double tol) {
  return bh.horizon() + inverse_tortoise_offset(r_star, bh, tol);
}

namespace {

double potential_from_offset(double x, const SchwarzschildParams& bh) {
  const double r = bh.horizon() + x;
  // (2M/r^3)(1 - 2M/r) with 1 - 2M/r = x/r computed from the exact offset.
  return 2.0 * bh.mass * x / (r * r * r * r);
}

double potential_derivative_from_offset(double x, const SchwarzschildParams& bh) {
  const double r = bh.horizon() + x;
  const double r2 = r * r;
  return 2.0 * bh.mass * x * (8.0 * bh.mass - 3.0 * r) / (r2 * r2 * r2);
}

}  // namespace

double potential(double r_star, const SchwarzschildParams& bh) {
  return potential_from_offset(inverse_tortoise_offset(r_star, bh), bh);
}

double potential_derivative(double r_star, const SchwarzschildParams& bh) {
  return potential_derivative_from_offset(inverse_tortoise_offset(r_star, bh), bh);
}

Grid::Grid(std::size_t n, double r_star_min, double r_star_max,
           SchwarzschildParams bh, double tol)
    : n_(n), r_star_min_(r_star_min), r_star_max_(r_star_max), bh_(bh) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("Grid: point count must be a power of two");
  if (!(r_star_min < r_star_max))
    throw std::invalid_argument("Grid: r_star_min must be below r_star_max");
  if (!(bh.mass > 0.0)) throw std::invalid_argument("Grid: M must be > 0");

  spacing_ = (r_star_max - r_star_min) / static_cast<double>(n);
  r_star_.resize(n);
  r_.resize(n);
  r_offset_.resize(n);
  V_.resize(n);
  dV_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rs = r_star_min + spacing_ * static_cast<double>(i);
    const double x = inverse_tortoise_offset(rs, bh, tol);
    r_star_[i] = rs;
    r_offset_[i] = x;
    r_[i] = bh.horizon() + x;
    V_[i] = potential_from_offset(x, bh);
    dV_[i] = potential_derivative_from_offset(x, bh);
  }
}

}  // namespace tnls
