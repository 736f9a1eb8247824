// First and second derivatives of log lambda(theta): the frequency vector
// x_theta, the decomposition of a direction into scaling + coboundary +
// balanced parts, and the Hessian as a positive semidefinite form whose
// kernel is exactly the scaling/coboundary subspace.

#ifndef DIRCOUNT_SPECTRAL_HPP
#define DIRCOUNT_SPECTRAL_HPP

#include <Eigen/Dense>

#include "dircount/graph.hpp"
#include "dircount/transfer.hpp"

namespace dircount {

// Discrete gradient: (nabla g)(a) = g(goal a) - g(source a).
Eigen::VectorXd nabla(const DirectedGraph& g,
                      const Eigen::VectorXd& vertex_function);

// |A| x |Q| matrix of nabla: row a equals e_{goal a} - e_{source a}.
Eigen::MatrixXd nabla_matrix(const DirectedGraph& g);

// Orthonormal basis (columns, |A| x r) of the orthogonal complement of
// span{1} + range(nabla): the directions along which log lambda actually
// curves. Rank decisions use a fixed 1e-10 threshold.
Eigen::MatrixXd transverse_basis(const DirectedGraph& g);

// Perron data together with the negated gradient of log lambda:
// x(a) = left(source a) * e^{-theta_a} * right(goal a) / lambda, which is a
// probability vector on edges; d log lambda(theta)[xi] = -<x, xi>.
struct GradientData {
  Eigen::VectorXd theta;
  Eigen::VectorXd weights;  // e^{-theta_a}
  PerronData perron;
  Eigen::VectorXd x;
};

GradientData grad_lambda(const DirectedGraph& g, const Eigen::VectorXd& theta);

// xi = c * 1 + nabla(potential) + balanced, with potential(base) = 0 and the
// balanced part satisfying, at every vertex q,
//   sum_{a leaving q} e^{-theta_a} * balanced(a) * right(goal a) = 0.
struct BalancedParts {
  double c = 0.0;
  Eigen::VectorXd potential;
  Eigen::VectorXd balanced;
};

// Factors the (theta-dependent) decomposition once and applies it to many
// directions.
class BalanceSolver {
 public:
  BalanceSolver(const DirectedGraph& g, const GradientData& data,
                int base_vertex = 0);

  BalancedParts decompose(const Eigen::VectorXd& xi) const;

 private:
  const DirectedGraph* graph_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd right_;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
  int base_;
};

BalancedParts balanced_decompose(const DirectedGraph& g,
                                 const GradientData& data,
                                 const Eigen::VectorXd& xi,
                                 int base_vertex = 0);

// Hessian of log lambda at theta as a symmetric |A| x |A| matrix: positive
// semidefinite, kernel spanned by 1 and the coboundaries, positive definite
// on the transverse subspace.
struct HessianForm {
  Eigen::MatrixXd matrix;
};

HessianForm hessian_log_lambda(const DirectedGraph& g,
                               const GradientData& data);

}  // namespace dircount

#endif  // DIRCOUNT_SPECTRAL_HPP
