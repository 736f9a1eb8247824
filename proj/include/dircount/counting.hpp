// Directional word counting: exact counts of length-n paths with a
// prescribed straightened occurrence vector (big-integer dynamic
// programming), their leading-order estimates assembled from the growth
// indicator, Perron eigendata and lattice normalizations, the global count
// estimate, a weighted-moment diagnostic for the Gaussian regime, and
// ratio/fit reports along a ray of feasible lengths.

#ifndef DIRCOUNT_COUNTING_HPP
#define DIRCOUNT_COUNTING_HPP

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "dircount/exact.hpp"
#include "dircount/graph.hpp"
#include "dircount/lattice.hpp"

namespace dircount {

// A directional counting request: among the length-n paths from 'from' to
// 'to', how many have straightened occurrence vector equal to 'target'.
// Straightened means offset-corrected: target = P(w) - offset(to) +
// offset(from), which is always a flow-conserving integer vector. In sofic
// mode the target lives in label space and prescribes the pushforward of the
// straightened occurrence instead.
struct CountQuery {
  int from = 0;
  int to = 0;
  long long length = 0;
  std::vector<Int> target;  // |A| entries (finite type) or |B| (sofic)
  bool sofic = false;
  // Skip the phase/flow screening rules and run the exact sweep anyway
  // (whenever its box is well-formed); the sweep then answers literally.
  bool force = false;
};

// Outcome of the feasibility pre-screen. Infeasible queries are answers (the
// exact count is zero), not errors; 'reason' is a stable one-word token:
//   "phase"    the phases of the endpoints forbid paths of this length,
//   "length"   the target's coordinate sum does not match the length,
//   "negative" the de-straightened target has a negative coordinate,
//   "flow"     the target does not conserve flow at some vertex.
// When feasible, dp_target is the de-straightened box corner the dynamic
// program aims for: the plain occurrence (or label-count) vector admissible
// words must realize; entrywise nonnegative with coordinate sum = length.
struct Feasibility {
  bool feasible = false;
  std::string reason;
  // De-straightened nonnegative box target for the exact sweep. Filled
  // whenever the box is well-formed (nonnegative, summing to the length),
  // even if the phase or flow rule rejects the query.
  std::vector<Int> dp_target;
};

// Natural logarithm of a positive big integer, stable far beyond the range
// of double.
double log_integer(const Int& v);

Feasibility screen_query(const DirectedGraph& g, const LatticeFrame& frame,
                         const CountQuery& query);

// Exact count by dense dynamic programming over (vertex, partial occurrence)
// states inside the box [0, dp_target]. Big-integer arithmetic throughout:
// the result is exact or the call throws, never approximate. Throws
// BudgetError when the state space would exceed the memory cap (the
// DIRCOUNT_BUDGET_MB environment variable, default 512). Work scales with
// the box volume times the length, so keep targets within reason.
Int count_exact(const DirectedGraph& g, const LatticeFrame& frame,
                const CountQuery& query);

// Leading-order estimate of the same count:
//   (2 pi n)^(-dim/2) * sigma^(-1) * e^(psi) *
//       p * e^(<theta, offset(to) - offset(from)>) * phi(to) * f(from)
// where psi is the growth indicator of the target, theta the optimal weight
// vector (normalized so the leading eigenvalue is 1), phi/f the left/right
// Perron vectors at theta with <phi, f> = 1, dim the fluctuation-lattice
// rank (finite type) or its label-space image rank (sofic), and sigma the
// corresponding variance factor. 'refused' is set, with a reason, when the
// estimate is outside its domain: infeasible query, growth indicator equal
// to -infinity or not positive, or a direction on the cone boundary where
// the optimal weights run off to infinity.
struct Prediction {
  bool refused = true;
  std::string reason;
  double value = 0.0;      // exp(log_value); infinity when out of range
  double log_value = 0.0;  // assembled in log space, safe for huge counts
  double psi_value = 0.0;
  double sigma = 1.0;
  int dimension = 0;
  Eigen::VectorXd theta;
};

// Direction-level ingredients of the estimate, reusable along a ray: the
// growth indicator of the base direction, the variance factor, the
// fluctuation dimension, and the endpoint constant
//   p * e^(<theta, offset(to) - offset(from)>) * phi(to) * f(from).
struct PredictionContext {
  bool refused = true;
  std::string reason;
  double psi_unit = 0.0;  // growth indicator of the base direction
  double sigma = 1.0;
  int dimension = 0;
  double constant = 0.0;
  Eigen::VectorXd theta;
};

PredictionContext make_prediction_context(const DirectedGraph& g,
                                          const LatticeFrame& frame,
                                          const Eigen::VectorXd& direction,
                                          int from, int to, bool sofic);

// The endpoint constant above for caller-supplied optimal weights with unit
// leading eigenvalue. Replacing theta by theta plus a potential difference
// leaves the value unchanged; tests rely on that invariance.
double leading_constant(const DirectedGraph& g, const LatticeFrame& frame,
                        const Eigen::VectorXd& theta, int from, int to);

// Assembles the estimate for the target scale * direction at the given
// length (the growth indicator scales linearly, everything else is fixed).
Prediction predict_from_context(const PredictionContext& ctx,
                                long long length, double scale);

// Estimate for a single query (context built at the query's own target).
Prediction count_predicted(const DirectedGraph& g, const LatticeFrame& frame,
                           const CountQuery& query);

// Leading-order estimate of the total number of length-n paths from q:
//   p * e^(delta * n) * (sum of phi over the phase class reachable from q in
//   n steps) * f(q), with phi/f the Perron vectors at the balanced weight
// vector delta * 1.
double global_count_predicted(const DirectedGraph& g, long long n, int q);

// Weighted-moment diagnostic for the Gaussian regime at a weight vector with
// unit leading eigenvalue: sums e^(-<theta, P(w)>) * h(P(w)) over all
// length-n paths from q by moment propagation (no enumeration), for
// h = 1, identity, and outer square. Reports
//   total_mass        the weighted number of paths,
//   mass_prediction   its leading-order value p * <phi, phase class> * f(q),
//   first_moment      (1/n) * weighted sum of (P(w) - n x),   -> 0
//   second_moment     mass-normalized weighted covariance of
//                     (P(w) - n x)/sqrt(n) in the coordinates of an
//                     orthonormal basis of the fluctuation subspace,
//   gaussian_covariance  the same-coordinates restriction of the
//                     log-eigenvalue Hessian, the limit of second_moment.
struct CltReport {
  double total_mass = 0.0;
  double mass_prediction = 0.0;
  Eigen::VectorXd first_moment;
  Eigen::MatrixXd second_moment;
  Eigen::MatrixXd gaussian_covariance;
};

CltReport clt_diagnostic(const DirectedGraph& g, const Eigen::VectorXd& theta,
                         int q, long long n);

// One length along a ray: the exact count, the estimate, and their ratio
// (NaN when the estimate is refused).
struct ConvergenceRow {
  long long length = 0;
  Int exact;
  double predicted = 0.0;
  double ratio = 0.0;
};

// Ratio table along the ray m * target, m = 1, 2, ..., restricted to the
// requested lengths, plus least-squares fits of
//   log(exact) = intercept + rate * n + exponent * log(n)
// over the rows with positive exact count. 'rate' should approach the
// growth indicator per unit length (reported as psi_rate) and 'exponent'
// should approach -dim/2.
struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double fitted_rate = 0.0;
  double fitted_exponent = 0.0;
  bool fit_valid = false;
  double psi_rate = 0.0;
  double sigma = 1.0;
  int dimension = 0;
};

// Lengths n <= max_length realizable along the ray: n = m * <1, target> +
// (phase(to) - phase(from)) for integer m >= 1 with the de-straightened
// target nonnegative. The feasible lengths form an arithmetic progression;
// callers need not know the period or the lattice constraints.
std::vector<long long> feasible_lengths(const DirectedGraph& g,
                                        const LatticeFrame& frame,
                                        const CountQuery& base,
                                        long long max_length);

ConvergenceReport convergence_report(const DirectedGraph& g,
                                     const LatticeFrame& frame,
                                     const CountQuery& base,
                                     const std::vector<long long>& lengths);

}  // namespace dircount

#endif  // DIRCOUNT_COUNTING_HPP
