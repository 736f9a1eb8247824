// Weighted transfer operators on V = R^Q: for a weight vector theta in R^A,
// L_theta[q][q'] = sum of e^{-theta_a} over edges a from q to q'. Perron
// eigendata, complex spectral radii, and the leading-order approximation of
// matrix-power entries.

#ifndef DIRCOUNT_TRANSFER_HPP
#define DIRCOUNT_TRANSFER_HPP

#include <Eigen/Dense>

#include "dircount/graph.hpp"

namespace dircount {

// Per-edge weights e^{-theta_a}; throws SolverError if any weight leaves the
// double range (overflow to infinity or underflow to zero).
Eigen::VectorXd edge_weights(const DirectedGraph& g,
                             const Eigen::VectorXd& theta);

Eigen::MatrixXd transfer_matrix(const DirectedGraph& g,
                                const Eigen::VectorXd& theta);

Eigen::MatrixXcd transfer_matrix_complex(const DirectedGraph& g,
                                         const Eigen::VectorXcd& theta);

// Perron eigendata of an irreducible nonnegative transfer matrix:
//   lambda      spectral radius (simple, positive),
//   right       f > 0 with L f = lambda f,
//   left        phi > 0 with L^T phi = lambda phi, normalized so that
//               <phi, 1> = 1 and then <phi, right> = 1,
//   gap         largest non-peripheral |mu| divided by lambda (0 if none),
//   peripheral  number of eigenvalues with |mu| >= lambda (1 - 1e-9); equals
//               the graph period for irreducible matrices.
struct PerronData {
  double lambda = 0.0;
  Eigen::VectorXd right;
  Eigen::VectorXd left;
  double gap = 0.0;
  int peripheral = 1;
};

// Requires a strongly connected graph. Eigenvalue located by iteration with
// two-sided ratio bounds certified to relative width 'tol'; the full spectrum
// (for gap/peripheral) uses a dense solver up to 64 vertices and falls back
// to bound-only data beyond. Throws SolverError if the iteration budget is
// exhausted before certification.
PerronData perron_data(const DirectedGraph& g, const Eigen::VectorXd& theta,
                       double tol = 1e-12, int max_iterations = 100000);

// Spectral radius of the complex-weighted transfer matrix (dense solver;
// limited to 64 vertices).
double spectral_radius_complex(const DirectedGraph& g,
                               const Eigen::VectorXcd& theta);

// Leading-order value of (L_theta^n)[q][q']: zero when the phases forbid a
// length-n path, and p * lambda^n * right(q) * left(q') otherwise.
double power_asymptotics(const PerronData& pd, const PeriodData& period,
                         int n, int q, int q_prime);

}  // namespace dircount

#endif  // DIRCOUNT_TRANSFER_HPP
