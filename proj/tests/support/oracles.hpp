#pragma once

// Slow reference implementations the tests compare against. Nothing here
// calls into the library except for plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "uavmob/geometry.hpp"
#include "uavmob/matrix.hpp"

namespace oracle {

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
  double flo = f(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double q_inverse(double p) {
  return bisect([p](double x) { return q_function(x) - p; }, -40.0, 40.0);
}

inline double los(double theta_deg, double psi, double beta) {
  return 1.0 / (1.0 + psi * std::exp(-beta * (theta_deg - psi)));
}

/// Smallest elevation angle in (0, 90] with LoS probability >= eps.
inline double min_elevation_bisect(double psi, double beta, double eps) {
  return bisect([&](double t) { return los(t, psi, beta) - eps; }, 1e-12, 90.0);
}

/// Eq.-independent power law: [Q^-1(delta)]^2 R_b N_o / 2 * 10^(eta/10) * (4 pi f d / c)^2.
inline double min_transmit_power(double d, double delta, double R_b, double N_o, double eta_db, double f_c,
                                 double c) {
  const double q = q_inverse(delta);
  const double g = 4.0 * std::acos(-1.0) * f_c * d / c;
  return q * q * R_b * N_o / 2.0 * std::pow(10.0, eta_db / 10.0) * g * g;
}

/// Minimum of sum_i costs(i, perm(i)) over all permutations of a square matrix.
inline double permutation_minimum(const uavmob::Matrix<double>& costs, std::vector<std::size_t>* best = nullptr) {
  const std::size_t n = costs.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double min_cost = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += costs(i, perm[i]);
    if (sum < min_cost) {
      min_cost = sum;
      if (best) *best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return min_cost;
}

/// Exhaustive capacity-respecting assignment of rows to columns (branch and
/// bound on the running cost). Returns +inf when infeasible.
inline double capacity_minimum(const uavmob::Matrix<double>& costs, std::vector<std::int64_t> capacities,
                               const uavmob::Matrix<char>* forbidden = nullptr) {
  const std::size_t n = costs.rows();
  const std::size_t k = costs.cols();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, double)> dfs = [&](std::size_t i, double acc) {
    if (acc >= best) return;
    if (i == n) {
      best = acc;
      return;
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (capacities[j] == 0) continue;
      if (forbidden && (*forbidden)(i, j)) continue;
      --capacities[j];
      dfs(i + 1, acc + costs(i, j));
      ++capacities[j];
    }
  };
  dfs(0, 0.0);
  return best;
}

/// Center-update objective at ground point (x, y) with the smallest feasible
/// altitude.
inline double center_value(std::span<const uavmob::GroundPosition> members, double x, double y, double theta_deg,
                           double h_min) {
  const double t = std::tan(theta_deg * std::acos(-1.0) / 180.0);
  double sum = 0.0;
  double far = 0.0;
  for (const auto& m : members) {
    const double d2 = (x - m.x) * (x - m.x) + (y - m.y) * (y - m.y);
    sum += d2;
    far = std::max(far, d2);
  }
  const double h = std::max(h_min, t * std::sqrt(far));
  return sum + static_cast<double>(members.size()) * h * h;
}

inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iterations = 80) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - r * (hi - lo);
  double b = lo + r * (hi - lo);
  double fa = f(a);
  double fb = f(b);
  for (int i = 0; i < iterations; ++i) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - r * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + r * (hi - lo);
      fb = f(b);
    }
  }
  return 0.5 * (lo + hi);
}

struct GridResult {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

/// Nested golden-section minimum of the center objective over a box; exact
/// up to the iteration count because the objective is convex in (x, y).
inline GridResult golden_box(std::span<const uavmob::GroundPosition> members, double theta_deg, double h_min,
                             double x0, double x1, double y0, double y1) {
  auto value_at = [&](double x, double y) { return center_value(members, x, y, theta_deg, h_min); };
  auto best_y = [&](double x) { return golden_min([&](double y) { return value_at(x, y); }, y0, y1); };
  const double x = golden_min([&](double xx) { return value_at(xx, best_y(xx)); }, x0, x1);
  const double y = best_y(x);
  return {x, y, value_at(x, y)};
}

/// 1 m grid over the members' bounding box, then golden-section refinement
/// around the best node and over the whole box; the best point wins.
inline GridResult grid_center(std::span<const uavmob::GroundPosition> members, double theta_deg, double h_min,
                              double step = 1.0) {
  double x0 = members[0].x, x1 = x0, y0 = members[0].y, y1 = y0;
  for (const auto& m : members) {
    x0 = std::min(x0, m.x);
    x1 = std::max(x1, m.x);
    y0 = std::min(y0, m.y);
    y1 = std::max(y1, m.y);
  }
  GridResult best{x0, y0, std::numeric_limits<double>::infinity()};
  for (double x = x0; x <= x1 + step; x += step) {
    for (double y = y0; y <= y1 + step; y += step) {
      const double v = center_value(members, x, y, theta_deg, h_min);
      if (v < best.value) best = {x, y, v};
    }
  }
  const double w = 8.0 * step;
  for (const auto& r : {golden_box(members, theta_deg, h_min, best.x - w, best.x + w, best.y - w, best.y + w),
                        golden_box(members, theta_deg, h_min, x0, x1, y0, y1)}) {
    if (r.value < best.value) best = r;
  }
  return best;
}

}  // namespace oracle
