#include "dircount/transfer.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <vector>

#include "dircount/errors.hpp"

namespace dircount {

namespace {

constexpr int kDenseLimit = 64;
constexpr double kPeripheralBand = 1e-9;

}  // namespace

Eigen::VectorXd edge_weights(const DirectedGraph& g,
                             const Eigen::VectorXd& theta) {
  if (theta.size() != g.edge_count())
    throw SolverError("weight vector length does not match the edge count");
  Eigen::VectorXd w(g.edge_count());
  for (int a = 0; a < g.edge_count(); ++a) {
    w[a] = std::exp(-theta[a]);
    if (!std::isfinite(w[a]) || w[a] == 0.0)
      throw SolverError("edge weight e^-theta leaves the double range");
  }
  return w;
}

Eigen::MatrixXd transfer_matrix(const DirectedGraph& g,
                                const Eigen::VectorXd& theta) {
  Eigen::VectorXd w = edge_weights(g, theta);
  Eigen::MatrixXd m =
      Eigen::MatrixXd::Zero(g.vertex_count(), g.vertex_count());
  for (int a = 0; a < g.edge_count(); ++a) m(g.source[a], g.goal[a]) += w[a];
  return m;
}

Eigen::MatrixXcd transfer_matrix_complex(const DirectedGraph& g,
                                         const Eigen::VectorXcd& theta) {
  if (theta.size() != g.edge_count())
    throw SolverError("weight vector length does not match the edge count");
  Eigen::MatrixXcd m =
      Eigen::MatrixXcd::Zero(g.vertex_count(), g.vertex_count());
  for (int a = 0; a < g.edge_count(); ++a) {
    std::complex<double> w = std::exp(-theta[a]);
    if (!std::isfinite(std::abs(w)) || std::abs(w) == 0.0)
      throw SolverError("edge weight e^-theta leaves the double range");
    m(g.source[a], g.goal[a]) += w;
  }
  return m;
}

namespace {

// Power iteration with a positive diagonal shift (which makes the matrix
// primitive without moving the Perron vector), certified by the two-sided
// ratio bounds min_i (Lv)_i / v_i <= lambda <= max_i (Lv)_i / v_i that hold
// for every positive v.
struct IterationResult {
  double lambda;
  Eigen::VectorXd vector;
};

IterationResult certified_power_iteration(const Eigen::MatrixXd& m, double tol,
                                          int max_iterations) {
  const int n = static_cast<int>(m.rows());
  const double shift = std::max(1.0, m.rowwise().sum().maxCoeff());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd image = m * v;
    double low = std::numeric_limits<double>::infinity();
    double high = 0.0;
    for (int i = 0; i < n; ++i) {
      double ratio = image[i] / v[i];
      low = std::min(low, ratio);
      high = std::max(high, ratio);
    }
    double mid = 0.5 * (low + high);
    if (high - low <= tol * std::max(mid, std::numeric_limits<double>::min()))
      return {mid, v};
    v = (image + shift * v);
    v /= v.lpNorm<1>();
  }
  throw SolverError(
      "eigenvector iteration did not certify the requested tolerance within "
      "the iteration budget");
}

// Vertex potential u that balances the weighted adjacency matrix: conjugating
// by diag(e^{u(q)}) — equivalently, shifting the weight exponents by the
// coboundary of u — equalizes row and column sums. Conjugation is a
// similarity, so the spectrum is untouched while the diagonal shift in the
// power iteration stops being dominated by a single oversized row when the
// raw weights span many orders of magnitude. Computed with Osborne sweeps in
// log space so the potential exists even where the raw weights themselves
// overflow.
Eigen::VectorXd balancing_potential(const DirectedGraph& g,
                                    const Eigen::VectorXd& theta) {
  const int nq = g.vertex_count();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(nq);
  if (nq < 2) return u;  // a single vertex cannot be rescaled against itself

  auto log_sum_exp = [](const std::vector<double>& terms) {
    double top = -std::numeric_limits<double>::infinity();
    for (double t : terms) top = std::max(top, t);
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - top);
    return top + std::log(sum);
  };

  for (int sweep = 0; sweep < 60; ++sweep) {
    double worst = 0.0;
    for (int q = 0; q < nq; ++q) {
      std::vector<double> out_terms, in_terms;
      for (int a = 0; a < g.edge_count(); ++a) {
        if (g.source[a] == g.goal[a]) continue;  // loops are conjugation-fixed
        if (g.source[a] == q)
          out_terms.push_back(-theta[a] + u[q] - u[g.goal[a]]);
        if (g.goal[a] == q)
          in_terms.push_back(-theta[a] + u[g.source[a]] - u[q]);
      }
      if (out_terms.empty() || in_terms.empty()) continue;
      double adjust = 0.5 * (log_sum_exp(in_terms) - log_sum_exp(out_terms));
      u[q] += adjust;
      worst = std::max(worst, std::abs(adjust));
    }
    if (worst < 0.125) break;
  }
  return u;
}

}  // namespace

PerronData perron_data(const DirectedGraph& g, const Eigen::VectorXd& theta,
                       double tol, int max_iterations) {
  require_connected(g);

  // Solve on the balanced (similar) matrix and map the eigenvectors back
  // through the diagonal conjugation afterwards.
  Eigen::VectorXd u = balancing_potential(g, theta);
  Eigen::VectorXd gauged = theta;
  for (int a = 0; a < g.edge_count(); ++a)
    gauged[a] += u[g.goal[a]] - u[g.source[a]];
  Eigen::MatrixXd m = transfer_matrix(g, gauged);

  IterationResult right = certified_power_iteration(m, tol, max_iterations);
  IterationResult left =
      certified_power_iteration(m.transpose(), tol, max_iterations);

  PerronData pd;
  pd.lambda = right.lambda;
  pd.right = right.vector.cwiseProduct((-u).array().exp().matrix());
  pd.left = left.vector.cwiseProduct(u.array().exp().matrix());
  if (!std::isfinite(pd.lambda) || pd.lambda <= 0.0)
    throw SolverError("leading eigenvalue is not a positive finite number");

  pd.left /= pd.left.sum();
  pd.right /= pd.left.dot(pd.right);
  if (!pd.left.allFinite() || !pd.right.allFinite())
    throw SolverError("eigenvector entries leave the double range");

  if (g.vertex_count() <= kDenseLimit) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    double radius = 0.0;
    for (int i = 0; i < solver.eigenvalues().size(); ++i)
      radius = std::max(radius, std::abs(solver.eigenvalues()[i]));
    int peripheral = 0;
    double inner = 0.0;
    for (int i = 0; i < solver.eigenvalues().size(); ++i) {
      double mag = std::abs(solver.eigenvalues()[i]);
      if (mag >= radius * (1.0 - kPeripheralBand))
        ++peripheral;
      else
        inner = std::max(inner, mag);
    }
    pd.peripheral = peripheral;
    pd.gap = inner / pd.lambda;
  } else {
    pd.peripheral = compute_period(g).p;
    pd.gap = std::numeric_limits<double>::quiet_NaN();
  }
  return pd;
}

double spectral_radius_complex(const DirectedGraph& g,
                               const Eigen::VectorXcd& theta) {
  if (g.vertex_count() > kDenseLimit)
    throw SolverError(
        "complex spectral radius uses a dense solver limited to 64 vertices");
  Eigen::MatrixXcd m = transfer_matrix_complex(g, theta);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  double radius = 0.0;
  for (int i = 0; i < solver.eigenvalues().size(); ++i)
    radius = std::max(radius, std::abs(solver.eigenvalues()[i]));
  return radius;
}

double power_asymptotics(const PerronData& pd, const PeriodData& period,
                         int n, int q, int q_prime) {
  const int p = period.p;
  if (((period.phase[q_prime] - period.phase[q] - n) % p + p) % p != 0)
    return 0.0;
  return p * std::pow(pd.lambda, n) * pd.right[q] * pd.left[q_prime];
}

}  // namespace dircount
