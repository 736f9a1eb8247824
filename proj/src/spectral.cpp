#include "dircount/spectral.hpp"

#include <Eigen/SVD>

#include "dircount/errors.hpp"

namespace dircount {

namespace {

constexpr double kRankThreshold = 1e-10;

}  // namespace

Eigen::VectorXd nabla(const DirectedGraph& g,
                      const Eigen::VectorXd& vertex_function) {
  if (vertex_function.size() != g.vertex_count())
    throw SolverError("vertex function length does not match the graph");
  Eigen::VectorXd out(g.edge_count());
  for (int a = 0; a < g.edge_count(); ++a)
    out[a] = vertex_function[g.goal[a]] - vertex_function[g.source[a]];
  return out;
}

Eigen::MatrixXd nabla_matrix(const DirectedGraph& g) {
  Eigen::MatrixXd n =
      Eigen::MatrixXd::Zero(g.edge_count(), g.vertex_count());
  for (int a = 0; a < g.edge_count(); ++a) {
    n(a, g.goal[a]) += 1.0;
    n(a, g.source[a]) -= 1.0;
  }
  return n;
}

Eigen::MatrixXd transverse_basis(const DirectedGraph& g) {
  const int na = g.edge_count();
  Eigen::MatrixXd span(na, 1 + g.vertex_count());
  span.col(0) = Eigen::VectorXd::Ones(na);
  span.rightCols(g.vertex_count()) = nabla_matrix(g);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      span, Eigen::ComputeFullU | Eigen::ComputeThinV);
  double scale = svd.singularValues().size() > 0
                     ? svd.singularValues()[0]
                     : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > kRankThreshold * std::max(scale, 1.0))
      ++rank;
  return svd.matrixU().rightCols(na - rank);
}

GradientData grad_lambda(const DirectedGraph& g,
                         const Eigen::VectorXd& theta) {
  GradientData data;
  data.theta = theta;
  data.weights = edge_weights(g, theta);
  data.perron = perron_data(g, theta);
  data.x.resize(g.edge_count());
  for (int a = 0; a < g.edge_count(); ++a) {
    data.x[a] = data.perron.left[g.source[a]] * data.weights[a] *
                data.perron.right[g.goal[a]] / data.perron.lambda;
  }
  return data;
}

BalanceSolver::BalanceSolver(const DirectedGraph& g, const GradientData& data,
                             int base_vertex)
    : graph_(&g),
      weights_(data.weights),
      right_(data.perron.right),
      base_(base_vertex) {
  const int nq = g.vertex_count();
  if (base_vertex < 0 || base_vertex >= nq)
    throw SolverError("decomposition base vertex is not in the graph");

  // Unknowns: the scaling coefficient c, then potential values at every
  // vertex except the base. Column for c is lambda * right; the column for
  // potential(q) is (L - lambda) applied to right(q) * e_q.
  Eigen::MatrixXd l = transfer_matrix(g, data.theta);
  const double lambda = data.perron.lambda;
  Eigen::MatrixXd system(nq, nq);
  system.col(0) = lambda * right_;
  int col = 1;
  for (int q = 0; q < nq; ++q) {
    if (q == base_) continue;
    Eigen::VectorXd column = l.col(q) * right_[q];
    column[q] -= lambda * right_[q];
    system.col(col++) = column;
  }
  lu_.compute(system);
  if (!lu_.isInvertible())
    throw SolverError("balanced decomposition system is singular");
}

BalancedParts BalanceSolver::decompose(const Eigen::VectorXd& xi) const {
  const DirectedGraph& g = *graph_;
  if (xi.size() != g.edge_count())
    throw SolverError("direction length does not match the edge count");
  const int nq = g.vertex_count();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nq);
  for (int a = 0; a < g.edge_count(); ++a)
    rhs[g.source[a]] += weights_[a] * xi[a] * right_[g.goal[a]];

  Eigen::VectorXd solution = lu_.solve(rhs);

  BalancedParts parts;
  parts.c = solution[0];
  parts.potential = Eigen::VectorXd::Zero(nq);
  int col = 1;
  for (int q = 0; q < nq; ++q) {
    if (q == base_) continue;
    parts.potential[q] = solution[col++];
  }
  parts.balanced = xi - parts.c * Eigen::VectorXd::Ones(g.edge_count()) -
                   nabla(g, parts.potential);
  return parts;
}

BalancedParts balanced_decompose(const DirectedGraph& g,
                                 const GradientData& data,
                                 const Eigen::VectorXd& xi, int base_vertex) {
  return BalanceSolver(g, data, base_vertex).decompose(xi);
}

HessianForm hessian_log_lambda(const DirectedGraph& g,
                               const GradientData& data) {
  const int na = g.edge_count();
  BalanceSolver solver(g, data);

  // Columns of the projection onto the balanced subspace along
  // span{1} + coboundaries; the Hessian is its pullback of diag(x).
  Eigen::MatrixXd projection(na, na);
  for (int a = 0; a < na; ++a) {
    projection.col(a) =
        solver.decompose(Eigen::VectorXd::Unit(na, a)).balanced;
  }
  Eigen::MatrixXd h =
      projection.transpose() * data.x.asDiagonal() * projection;
  HessianForm form;
  form.matrix = 0.5 * (h + h.transpose());
  return form;
}

}  // namespace dircount
