#include "uavmob/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "uavmob/errors.hpp"

namespace uavmob::ot {
namespace {

constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

// Consecutive degenerate pivots tolerated under Dantzig pricing before
// switching to Bland's rule until the next nondegenerate pivot.
constexpr int kDegenerateLimit = 32;

struct Arc {
  int from = 0;
  int to = 0;
  double cost = 0.0;
  std::int64_t flow = 0;
  std::int64_t upper = kUnbounded;
  bool artificial = false;
};

// Two-phase primal network simplex over supply nodes [0, R), demand nodes
// [R, R + C) and a root node R + C joined to every node by an artificial arc.
// Phase one minimizes artificial flow; phase two pins artificial arcs to zero
// capacity so they can only leave the basis, which keeps big-M constants out
// of the potentials.
class NetworkSimplex {
 public:
  explicit NetworkSimplex(const TransportProblem& problem)
      : rows_(static_cast<int>(problem.rows())),
        cols_(static_cast<int>(problem.cols())),
        root_(rows_ + cols_),
        nodes_(rows_ + cols_ + 1) {
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) {
        if (!problem.admissible(i, j)) continue;
        arcs_.push_back({i, rows_ + j, problem.costs(i, j)});
        real_index_.push_back({i, j});
      }
    }
    real_count_ = static_cast<int>(arcs_.size());
    for (int i = 0; i < rows_; ++i) {
      arcs_.push_back({i, root_, 0.0, problem.supplies[i], kUnbounded, true});
    }
    for (int j = 0; j < cols_; ++j) {
      arcs_.push_back({root_, rows_ + j, 0.0, problem.demands[j], kUnbounded, true});
    }

    basic_.assign(arcs_.size(), 0);
    tree_adj_.assign(nodes_, {});
    for (int a = real_count_; a < static_cast<int>(arcs_.size()); ++a) {
      basic_[a] = 1;
      tree_adj_[arcs_[a].from].push_back(a);
      tree_adj_[arcs_[a].to].push_back(a);
    }
    parent_.assign(nodes_, -1);
    pred_.assign(nodes_, -1);
    depth_.assign(nodes_, 0);
    potential_.assign(nodes_, 0.0);
    queue_.reserve(nodes_);

    double max_cost = problem.max_abs_cost();
    epsilon_ = 1e-12 * (1.0 + max_cost) * std::max(1, nodes_ / 16);
  }

  TransportPlan solve(const TransportProblem& problem) {
    // Phase one: unit cost on artificial arcs, zero on real arcs.
    for (int a = 0; a < static_cast<int>(arcs_.size()); ++a) {
      costs_.push_back(arcs_[a].artificial ? 1.0 : 0.0);
    }
    rebuild_tree();
    run(1e-9);

    std::vector<std::size_t> stranded;
    for (int i = 0; i < rows_; ++i) {
      if (arcs_[real_count_ + i].flow > 0) stranded.push_back(static_cast<std::size_t>(i));
    }
    if (!stranded.empty()) {
      throw InfeasibleError(
          fmt::format("transportation problem infeasible: supply nodes [{}] cannot be routed",
                      fmt::join(stranded, ", ")),
          std::move(stranded));
    }

    // Phase two.
    for (int a = 0; a < static_cast<int>(arcs_.size()); ++a) {
      if (arcs_[a].artificial) {
        costs_[a] = 0.0;
        arcs_[a].upper = 0;
      } else {
        costs_[a] = arcs_[a].cost;
      }
    }
    rebuild_tree();
    run(epsilon_);

    TransportPlan plan;
    plan.flow = Matrix<std::int64_t>(problem.rows(), problem.cols(), 0);
    for (int a = 0; a < real_count_; ++a) {
      const auto [i, j] = real_index_[a];
      plan.flow(i, j) = arcs_[a].flow;
    }
    double objective = 0.0;
    for (std::size_t i = 0; i < problem.rows(); ++i) {
      for (std::size_t j = 0; j < problem.cols(); ++j) {
        if (plan.flow(i, j) != 0) objective += problem.costs(i, j) * static_cast<double>(plan.flow(i, j));
      }
    }
    plan.objective = objective;
    plan.row_potentials.assign(potential_.begin(), potential_.begin() + rows_);
    plan.col_potentials.assign(potential_.begin() + rows_, potential_.begin() + rows_ + cols_);
    plan.pivots = pivots_;
    return plan;
  }

 private:
  double reduced_cost(int a) const {
    return costs_[a] + potential_[arcs_[a].from] - potential_[arcs_[a].to];
  }

  bool eligible(int a) const { return !basic_[a] && arcs_[a].upper > 0; }

  void run(double tolerance) {
    int degenerate_run = 0;
    bool bland = false;
    const int arc_count = static_cast<int>(arcs_.size());
    for (;;) {
      int entering = -1;
      double best = -tolerance;
      for (int a = 0; a < arc_count; ++a) {
        if (!eligible(a)) continue;
        const double rc = reduced_cost(a);
        if (rc < best) {
          entering = a;
          if (bland) break;
          best = rc;
        }
      }
      if (entering < 0) return;

      const bool degenerate = pivot(entering);
      ++pivots_;
      if (degenerate) {
        if (++degenerate_run >= kDegenerateLimit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  // Pushes flow around the cycle closed by `entering`; returns true when the
  // pivot moved zero flow.
  bool pivot(int entering) {
    const int u = arcs_[entering].from;
    const int v = arcs_[entering].to;

    int a = u;
    int b = v;
    while (a != b) {
      if (depth_[a] > depth_[b]) {
        a = parent_[a];
      } else if (depth_[b] > depth_[a]) {
        b = parent_[b];
      } else {
        a = parent_[a];
        b = parent_[b];
      }
    }
    const int join = a;

    std::int64_t delta = residual(entering, true);
    int leaving = entering;
    auto consider = [&](int arc, bool forward) {
      const std::int64_t r = residual(arc, forward);
      if (r < delta || (r == delta && arc < leaving)) {
        delta = r;
        leaving = arc;
      }
    };
    // Cycle orientation: u -> v along `entering`, v up to join, join down to u.
    for (int w = v; w != join; w = parent_[w]) consider(pred_[w], arcs_[pred_[w]].from == w);
    for (int w = u; w != join; w = parent_[w]) consider(pred_[w], arcs_[pred_[w]].to == w);

    if (delta == kUnbounded) throw std::logic_error("network simplex: unbounded cycle");

    if (delta > 0) {
      arcs_[entering].flow += delta;
      for (int w = v; w != join; w = parent_[w]) {
        Arc& arc = arcs_[pred_[w]];
        arc.flow += (arc.from == w) ? delta : -delta;
      }
      for (int w = u; w != join; w = parent_[w]) {
        Arc& arc = arcs_[pred_[w]];
        arc.flow += (arc.to == w) ? delta : -delta;
      }
    }

    if (leaving != entering) {
      basic_[leaving] = 0;
      basic_[entering] = 1;
      detach(arcs_[leaving].from, leaving);
      detach(arcs_[leaving].to, leaving);
      tree_adj_[arcs_[entering].from].push_back(entering);
      tree_adj_[arcs_[entering].to].push_back(entering);
      rebuild_tree();
    }
    return delta == 0;
  }

  std::int64_t residual(int arc, bool forward) const {
    const Arc& a = arcs_[arc];
    if (!forward) return a.flow;
    return a.upper == kUnbounded ? kUnbounded : a.upper - a.flow;
  }

  void detach(int node, int arc) {
    auto& adj = tree_adj_[node];
    adj.erase(std::find(adj.begin(), adj.end(), arc));
  }

  void rebuild_tree() {
    queue_.clear();
    queue_.push_back(root_);
    parent_[root_] = -1;
    pred_[root_] = -1;
    depth_[root_] = 0;
    potential_[root_] = 0.0;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int node = queue_[head];
      for (int a : tree_adj_[node]) {
        if (a == pred_[node]) continue;
        const Arc& arc = arcs_[a];
        const int child = arc.from == node ? arc.to : arc.from;
        parent_[child] = node;
        pred_[child] = a;
        depth_[child] = depth_[node] + 1;
        // Basic arcs have zero reduced cost: pi(to) = pi(from) + cost.
        potential_[child] =
            arc.from == node ? potential_[node] + costs_[a] : potential_[node] - costs_[a];
        queue_.push_back(child);
      }
    }
  }

  int rows_;
  int cols_;
  int root_;
  int nodes_;
  int real_count_ = 0;
  double epsilon_ = 0.0;
  std::size_t pivots_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::pair<int, int>> real_index_;
  std::vector<double> costs_;
  std::vector<char> basic_;
  std::vector<std::vector<int>> tree_adj_;
  std::vector<int> parent_;
  std::vector<int> pred_;
  std::vector<int> depth_;
  std::vector<double> potential_;
  std::vector<int> queue_;
};

void validate(const TransportProblem& problem) {
  if (problem.supplies.size() != problem.rows() || problem.demands.size() != problem.cols()) {
    throw std::invalid_argument("transport problem: supply/demand sizes do not match cost matrix");
  }
  for (auto s : problem.supplies) {
    if (s < 0) throw std::invalid_argument("transport problem: negative supply");
  }
  for (auto d : problem.demands) {
    if (d < 0) throw std::invalid_argument("transport problem: negative demand");
  }
  for (std::size_t i = 0; i < problem.rows(); ++i) {
    for (std::size_t j = 0; j < problem.cols(); ++j) {
      const double c = problem.costs(i, j);
      if (c != kForbidden && !std::isfinite(c)) {
        throw std::invalid_argument(fmt::format("transport problem: cost ({}, {}) is not finite", i, j));
      }
    }
  }
  if (!problem.balanced()) throw std::invalid_argument("transport problem: supplies and demands are not balanced");
}

}  // namespace

bool TransportProblem::balanced() const {
  const auto s = std::accumulate(supplies.begin(), supplies.end(), std::int64_t{0});
  const auto d = std::accumulate(demands.begin(), demands.end(), std::int64_t{0});
  return s == d;
}

double TransportProblem::max_abs_cost() const {
  double m = 0.0;
  for (double c : costs.data()) {
    if (c != kForbidden) m = std::max(m, std::abs(c));
  }
  return m;
}

TransportPlan solve_transportation(const TransportProblem& problem) {
  validate(problem);
  NetworkSimplex simplex(problem);
  return simplex.solve(problem);
}

CertificateReport verify_certificate(const TransportPlan& plan, const TransportProblem& problem) {
  CertificateReport report;
  const double tol = 1e-9 * (1.0 + problem.max_abs_cost());
  report.tolerance = tol;

  if (plan.flow.rows() != problem.rows() || plan.flow.cols() != problem.cols() ||
      plan.row_potentials.size() != problem.rows() || plan.col_potentials.size() != problem.cols()) {
    report.marginals_ok = false;
    report.failures.push_back("plan dimensions do not match problem");
    return report;
  }

  for (std::size_t i = 0; i < problem.rows(); ++i) {
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < problem.cols(); ++j) sum += plan.flow(i, j);
    if (sum != problem.supplies[i]) {
      report.marginals_ok = false;
      report.failures.push_back(fmt::format("marginal: row {} ships {} but supplies {}", i, sum, problem.supplies[i]));
    }
  }
  for (std::size_t j = 0; j < problem.cols(); ++j) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < problem.rows(); ++i) sum += plan.flow(i, j);
    if (sum != problem.demands[j]) {
      report.marginals_ok = false;
      report.failures.push_back(fmt::format("marginal: column {} receives {} but demands {}", j, sum, problem.demands[j]));
    }
  }

  double primal = 0.0;
  for (std::size_t i = 0; i < problem.rows(); ++i) {
    for (std::size_t j = 0; j < problem.cols(); ++j) {
      const std::int64_t z = plan.flow(i, j);
      if (z < 0) {
        report.support_ok = false;
        report.failures.push_back(fmt::format("support: negative flow {} on ({}, {})", z, i, j));
      }
      if (!problem.admissible(i, j)) {
        if (z != 0) {
          report.support_ok = false;
          report.failures.push_back(fmt::format("support: flow {} on forbidden arc ({}, {})", z, i, j));
        }
        continue;
      }
      const double gap = plan.col_potentials[j] - plan.row_potentials[i] - problem.costs(i, j);
      if (gap > tol) {
        report.dual_feasible = false;
        report.failures.push_back(fmt::format("dual: phi({}) - xi({}) exceeds cost by {:.3e}", j, i, gap));
      }
      if (z > 0) {
        primal += problem.costs(i, j) * static_cast<double>(z);
        if (std::abs(gap) > tol) {
          report.slackness_ok = false;
          report.failures.push_back(fmt::format("slackness: arc ({}, {}) carries {} with gap {:.3e}", i, j, z, gap));
        }
      }
    }
  }

  double dual = 0.0;
  for (std::size_t j = 0; j < problem.cols(); ++j) dual += plan.col_potentials[j] * static_cast<double>(problem.demands[j]);
  for (std::size_t i = 0; i < problem.rows(); ++i) dual -= plan.row_potentials[i] * static_cast<double>(problem.supplies[i]);
  report.primal = primal;
  report.dual = dual;

  const auto mass = std::accumulate(problem.supplies.begin(), problem.supplies.end(), std::int64_t{0});
  const double objective_tol = tol * (1.0 + static_cast<double>(mass));
  if (std::abs(primal - plan.objective) > objective_tol) {
    report.objective_ok = false;
    report.failures.push_back(fmt::format("objective: stated {} but plan costs {}", plan.objective, primal));
  }
  if (std::abs(primal - dual) > objective_tol) {
    report.objective_ok = false;
    report.failures.push_back(fmt::format("objective: primal {} differs from dual {}", primal, dual));
  }
  return report;
}

SemiAssignment solve_semi_assignment(const Matrix<double>& costs,
                                     const std::vector<std::int64_t>& capacities,
                                     const Matrix<char>& forbidden) {
  const std::size_t rows = costs.rows();
  const std::size_t cols = costs.cols();
  if (capacities.size() != cols || forbidden.rows() != rows || forbidden.cols() != cols) {
    throw std::invalid_argument("semi-assignment: shape mismatch");
  }
  std::int64_t total_capacity = 0;
  for (auto c : capacities) {
    if (c < 0) throw std::invalid_argument("semi-assignment: negative capacity");
    total_capacity += c;
  }
  if (total_capacity < static_cast<std::int64_t>(rows)) {
    throw InfeasibleError(fmt::format("semi-assignment: total capacity {} is below row count {}", total_capacity, rows));
  }

  std::vector<std::size_t> isolated;
  for (std::size_t i = 0; i < rows; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < cols && !any; ++j) any = !forbidden(i, j);
    if (!any) isolated.push_back(i);
  }
  if (!isolated.empty()) {
    throw InfeasibleError(fmt::format("semi-assignment: rows [{}] have no admissible column", fmt::join(isolated, ", ")),
                          std::move(isolated));
  }

  const std::int64_t spare = total_capacity - static_cast<std::int64_t>(rows);
  const std::size_t slack_rows = spare > 0 ? 1 : 0;
  TransportProblem problem;
  problem.costs = Matrix<double>(rows + slack_rows, cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      problem.costs(i, j) = forbidden(i, j) ? kForbidden : costs(i, j);
    }
  }
  problem.supplies.assign(rows, 1);
  if (slack_rows) problem.supplies.push_back(spare);
  problem.demands = capacities;

  TransportPlan plan;
  try {
    plan = solve_transportation(problem);
  } catch (const InfeasibleError& e) {
    std::vector<std::size_t> stranded;
    for (auto i : e.indices()) {
      if (i < rows) stranded.push_back(i);
    }
    throw InfeasibleError(fmt::format("semi-assignment: rows [{}] cannot be placed within capacity", fmt::join(stranded, ", ")),
                          std::move(stranded));
  }

  SemiAssignment result;
  result.column_of_row.assign(rows, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (plan.flow(i, j) == 1) {
        result.column_of_row[i] = j;
        result.cost += costs(i, j);
        break;
      }
    }
  }
  return result;
}

}  // namespace uavmob::ot
