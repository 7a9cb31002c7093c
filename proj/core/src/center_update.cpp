#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "uavmob/clustering.hpp"

namespace uavmob::clustering {
namespace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm_sq(Vec2 a) { return dot(a, a); }

constexpr std::size_t kMaxHullForEnumeration = 40;

void check_angle(double theta_min_deg) {
  if (!(theta_min_deg > 0.0 && theta_min_deg < 90.0)) {
    throw std::domain_error("center update: theta_min must lie in (0, 90) degrees");
  }
}

// Andrew's monotone chain; collinear and duplicate points are dropped.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Reduced objective G(p) = |p - c|^2 + T * max(r0^2, max_i |p - v_i|^2); the
// cluster objective equals n * G(p) plus a constant.
struct Reduced {
  Vec2 centroid;
  double t = 0.0;    // tan^2(theta_min)
  double r0sq = 0.0; // (h_min / tan(theta_min))^2
  const std::vector<Vec2>* hull = nullptr;

  double farthest_sq(Vec2 p) const {
    double m = 0.0;
    for (const Vec2& v : *hull) m = std::max(m, norm_sq(p - v));
    return m;
  }
  double operator()(Vec2 p) const { return norm_sq(p - centroid) + t * std::max(r0sq, farthest_sq(p)); }
};

Vec2 minimize_by_enumeration(const Reduced& g) {
  const auto& hull = *g.hull;
  const Vec2 c = g.centroid;
  const double t = g.t;
  const double r0 = std::sqrt(g.r0sq);

  Vec2 best = c;
  double best_value = g(c);
  auto offer = [&](Vec2 p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return;
    const double v = g(p);
    if (v < best_value) {
      best_value = v;
      best = p;
    }
  };

  const std::size_t h = hull.size();
  for (std::size_t a = 0; a < h; ++a) {
    const Vec2 va = hull[a];
    offer((1.0 / (1.0 + t)) * (c + t * va));
    if (r0 > 0.0) {
      const Vec2 dir = c - va;
      const double len = std::sqrt(norm_sq(dir));
      if (len > 0.0) offer(va + (r0 / len) * dir);
    }
    for (std::size_t b = a + 1; b < h; ++b) {
      const Vec2 vb = hull[b];
      const Vec2 ab = vb - va;
      const double len_sq = norm_sq(ab);
      const double len = std::sqrt(len_sq);
      const Vec2 mid = 0.5 * (va + vb);
      const Vec2 normal{-ab.y / len, ab.x / len};
      offer(mid + (dot(normal, c - mid) / (1.0 + t)) * normal);
      if (r0 > 0.0 && 4.0 * g.r0sq >= len_sq) {
        const double off = std::sqrt(g.r0sq - 0.25 * len_sq);
        offer(mid + off * normal);
        offer(mid - off * normal);
      }
      for (std::size_t k = b + 1; k < h; ++k) {
        const Vec2 ac = hull[k] - va;
        const double den = 2.0 * cross(ab, ac);
        if (den == 0.0) continue;
        const double ab2 = len_sq;
        const double ac2 = norm_sq(ac);
        const Vec2 rel{(ac.y * ab2 - ab.y * ac2) / den, (ab.x * ac2 - ac.x * ab2) / den};
        offer(va + rel);
      }
    }
  }
  return best;
}

template <class F>
double golden_min(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// G is jointly convex, so y -> min_x G(x, y) is convex as well.
Vec2 minimize_by_golden_section(const Reduced& g) {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const Vec2& v : *g.hull) {
    x_lo = std::min(x_lo, v.x);
    x_hi = std::max(x_hi, v.x);
    y_lo = std::min(y_lo, v.y);
    y_hi = std::max(y_hi, v.y);
  }
  constexpr double kTol = 1e-7;
  auto inner = [&](double y) { return golden_min([&](double x) { return g({x, y}); }, x_lo, x_hi, kTol); };
  const double y = golden_min([&](double yy) { return g({inner(yy), yy}); }, y_lo, y_hi, kTol);
  return {inner(y), y};
}

}  // namespace

double center_objective(std::span<const GroundPosition> members, const UavPosition& center) {
  double sum = 0.0;
  for (const auto& m : members) sum += slant_distance_sq(m, center);
  return sum;
}

UavPosition update_center(std::span<const GroundPosition> members, double theta_min_deg, double h_min) {
  if (members.empty()) throw std::invalid_argument("update_center: cluster has no members");
  check_angle(theta_min_deg);
  if (!(h_min >= 0.0)) throw std::invalid_argument("update_center: h_min must be >= 0");

  const double tan_theta = std::tan(deg_to_rad(theta_min_deg));
  std::vector<Vec2> points;
  points.reserve(members.size());
  Vec2 centroid;
  for (const auto& m : members) {
    points.push_back({m.x, m.y});
    centroid = centroid + Vec2{m.x, m.y};
  }
  centroid = (1.0 / static_cast<double>(members.size())) * centroid;
  const std::vector<Vec2> hull = convex_hull(points);

  Reduced g;
  g.centroid = centroid;
  g.t = tan_theta * tan_theta;
  g.r0sq = (h_min / tan_theta) * (h_min / tan_theta);
  g.hull = &hull;

  const Vec2 p = hull.size() <= kMaxHullForEnumeration ? minimize_by_enumeration(g) : minimize_by_golden_section(g);
  const double h = std::max(h_min, tan_theta * std::sqrt(g.farthest_sq(p)));
  return {p.x, p.y, h};
}

double QcqpData::objective(const Vec3& s) const {
  double v = r_o;
  for (int a = 0; a < 3; ++a) {
    v += Q_o[a] * s[a];
    for (int b = 0; b < 3; ++b) v += 0.5 * s[a] * P_o[a][b] * s[b];
  }
  return v;
}

double QcqpData::constraint(std::size_t i, const Vec3& s) const {
  double v = r_i[i];
  for (int a = 0; a < 3; ++a) {
    v += Q_i[i][a] * s[a];
    for (int b = 0; b < 3; ++b) v += 0.5 * s[a] * P_i[a][b] * s[b];
  }
  return v;
}

QcqpData build_qcqp(std::span<const GroundPosition> members, double theta_min_deg) {
  check_angle(theta_min_deg);
  const double n = static_cast<double>(members.size());
  const double s = std::sin(deg_to_rad(theta_min_deg));
  QcqpData q;
  q.omega = 1.0 - 1.0 / (s * s);
  for (int a = 0; a < 3; ++a) q.P_o[a][a] = 2.0 * n;
  // The constraint is dx^2 + dy^2 + omega h^2 <= 0, so the h entry carries 2 * omega.
  q.P_i[0][0] = 2.0;
  q.P_i[1][1] = 2.0;
  q.P_i[2][2] = 2.0 * q.omega;
  for (const auto& m : members) {
    q.Q_o[0] -= 2.0 * m.x;
    q.Q_o[1] -= 2.0 * m.y;
    q.r_o += m.x * m.x + m.y * m.y;
    q.Q_i.push_back({-2.0 * m.x, -2.0 * m.y, 0.0});
    q.r_i.push_back(m.x * m.x + m.y * m.y);
  }
  return q;
}

namespace {

// Euclidean projection onto {lambda >= 0, sum(lambda) <= cap}.
void project_capped_simplex(std::vector<double>& lambda, double cap) {
  double sum = 0.0;
  for (double& l : lambda) {
    l = std::max(l, 0.0);
    sum += l;
  }
  if (sum <= cap) return;
  std::vector<double> sorted(lambda);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    const double candidate = (running - cap) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || sorted[k + 1] <= candidate) {
      shift = candidate;
      break;
    }
  }
  for (double& l : lambda) l = std::max(l - shift, 0.0);
}

struct DualPoint {
  QcqpData::Vec3 s{};   // argmin of the Lagrangian (h = 0 since Q_h = 0)
  double value = 0.0;   // g(lambda)
  std::vector<double> gradient;
};

DualPoint evaluate_dual(const QcqpData& q, const std::vector<double>& lambda) {
  const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  QcqpData::Vec3 p_diag{};
  QcqpData::Vec3 big_q = q.Q_o;
  double r = q.r_o;
  for (int a = 0; a < 3; ++a) p_diag[a] = q.P_o[a][a] + total * q.P_i[a][a];
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (int a = 0; a < 3; ++a) big_q[a] += lambda[i] * q.Q_i[i][a];
    r += lambda[i] * q.r_i[i];
  }
  DualPoint out;
  out.value = r;
  // On the PSD boundary P_hh = 0 and Q_h = 0, so the h block drops out.
  for (int a = 0; a < 2; ++a) {
    out.s[a] = -big_q[a] / p_diag[a];
    out.value -= 0.5 * big_q[a] * big_q[a] / p_diag[a];
  }
  out.s[2] = 0.0;
  out.gradient.resize(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) out.gradient[i] = q.constraint(i, out.s);
  return out;
}

}  // namespace

DualCenterResult update_center_dual(std::span<const GroundPosition> members, double theta_min_deg,
                                    const DualOptions& options) {
  if (members.empty()) throw std::invalid_argument("update_center_dual: cluster has no members");
  const QcqpData q = build_qcqp(members, theta_min_deg);
  const std::size_t n = members.size();
  // P_hh = 2n + 2 omega sum(lambda) >= 0.
  const double cap = static_cast<double>(n) / -q.omega;

  double spread = 0.0;
  for (const auto& a : members) {
    for (const auto& b : members) spread = std::max(spread, ground_distance_sq(a, b));
  }
  double lipschitz = std::max(1e-12, spread);

  std::vector<double> lambda(n, 0.0);
  std::vector<double> previous = lambda;
  std::vector<double> probe = lambda;
  std::vector<double> next(n);
  double momentum = 1.0;
  DualCenterResult result;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const DualPoint at_probe = evaluate_dual(q, probe);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) next[i] = probe[i] + at_probe.gradient[i] / lipschitz;
      project_capped_simplex(next, cap);
      const DualPoint at_next = evaluate_dual(q, next);
      double linear = 0.0;
      double quad = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = next[i] - probe[i];
        linear += at_probe.gradient[i] * d;
        quad += d * d;
      }
      if (at_next.value >= at_probe.value + linear - 0.5 * lipschitz * quad - 1e-12 * std::abs(at_probe.value)) break;
      lipschitz *= 2.0;
    }
    double step = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      step = std::max(step, std::abs(next[i] - previous[i]));
      scale = std::max(scale, std::abs(next[i]));
    }
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    for (std::size_t i = 0; i < n; ++i) {
      probe[i] = next[i] + ((momentum - 1.0) / next_momentum) * (next[i] - previous[i]);
    }
    momentum = next_momentum;
    previous = next;
    if (step <= options.step_tolerance * (1.0 + scale)) {
      result.converged = true;
      ++it;
      break;
    }
  }

  const DualPoint final_point = evaluate_dual(q, previous);
  result.lambda = previous;
  result.dual_value = final_point.value;
  result.iterations = it;
  const double total = std::accumulate(previous.begin(), previous.end(), 0.0);
  const bool boundary = cap - total <= 1e-9 * cap;
  result.status = boundary ? DualStatus::kBoundary : DualStatus::kInterior;

  const double tan_theta = std::tan(deg_to_rad(theta_min_deg));
  double farthest = 0.0;
  for (const auto& m : members) {
    farthest = std::max(farthest, ground_distance_sq(m, {final_point.s[0], final_point.s[1]}));
  }
  result.recovered = {final_point.s[0], final_point.s[1], tan_theta * std::sqrt(farthest)};
  result.center = boundary ? update_center(members, theta_min_deg, 0.0)
                           : UavPosition{final_point.s[0], final_point.s[1], final_point.s[2]};
  return result;
}

}  // namespace uavmob::clustering
