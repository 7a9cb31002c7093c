#pragma once

// Exact integer transportation solver (network simplex on the bipartite
// supply/demand graph) returning Kantorovich dual potentials as an optimality
// certificate. Used for the capacitated device-to-UAV assignment and for
// matching UAVs to new cluster centers.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "uavmob/matrix.hpp"

namespace uavmob::ot {

/// Cost value marking an arc as absent from the transport graph.
inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

struct TransportProblem {
  Matrix<double> costs;  // rows = supply nodes, cols = demand nodes
  std::vector<std::int64_t> supplies;
  std::vector<std::int64_t> demands;

  std::size_t rows() const { return costs.rows(); }
  std::size_t cols() const { return costs.cols(); }
  bool admissible(std::size_t i, std::size_t j) const { return costs(i, j) != kForbidden; }
  bool balanced() const;
  /// Largest |cost| over admissible arcs (0 if none).
  double max_abs_cost() const;
};

struct TransportPlan {
  Matrix<std::int64_t> flow;
  double objective = 0.0;
  std::vector<double> row_potentials;  // xi over supply nodes
  std::vector<double> col_potentials;  // phi over demand nodes
  std::size_t pivots = 0;
};

/// Minimum-cost integer plan for a balanced problem. Forbidden arcs never
/// enter the basis. Potentials satisfy phi(l) - xi(k) <= E_kl on admissible
/// arcs with equality wherever flow is positive.
///
/// Throws std::invalid_argument on malformed input (shape, negative mass,
/// unbalanced, non-finite admissible cost) and InfeasibleError listing the
/// supply nodes whose mass cannot be routed.
TransportPlan solve_transportation(const TransportProblem& problem);

struct CertificateReport {
  bool marginals_ok = true;
  bool support_ok = true;  // nonnegative, nothing on forbidden arcs
  bool dual_feasible = true;
  bool slackness_ok = true;
  bool objective_ok = true;  // stated objective == primal == dual
  double primal = 0.0;
  double dual = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> failures;

  bool ok() const {
    return marginals_ok && support_ok && dual_feasible && slackness_ok && objective_ok;
  }
};

/// Checks primal feasibility, dual feasibility and complementary slackness
/// with tolerance 1e-9 * (1 + max|cost|). Never throws on a bad plan; every
/// failure is reported.
CertificateReport verify_certificate(const TransportPlan& plan, const TransportProblem& problem);

struct SemiAssignment {
  std::vector<std::size_t> column_of_row;
  double cost = 0.0;
};

/// Assigns every row (unit supply) to one column, with column j receiving at
/// most capacities[j] rows; `forbidden(i, j)` removes arc (i, j). A zero-cost
/// slack node absorbs unused capacity. Throws InfeasibleError naming the rows
/// that cannot be placed.
SemiAssignment solve_semi_assignment(const Matrix<double>& costs,
                                     const std::vector<std::int64_t>& capacities,
                                     const Matrix<char>& forbidden);

}  // namespace uavmob::ot
