#include "dircount/growth.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "dircount/errors.hpp"
#include "dircount/spectral.hpp"
#include "dircount/transfer.hpp"

namespace dircount {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Thresholds for classifying a minimization that never settles: a genuine
// boundary optimum walks to infinity while the objective flattens out; an
// unbounded objective keeps dropping along an escape ray. The escape distance
// is chosen so that boundary plateaus (which flatten out around distance 40)
// stay well inside it, while iterates up to twice the distance keep every
// weight e^-theta inside the double range, so the walk towards the
// certificate never stalls on unrepresentable candidates.
constexpr double kBoundaryDistance = 30.0;
constexpr double kBoundaryGradient = 1e-6;
constexpr double kUnboundedDistance = 300.0;
constexpr double kUnboundedDrop = 1e3;

struct ReducedMinimization {
  Eigen::VectorXd point;   // coordinates in the reduced basis
  double value = 0.0;
  bool converged = false;
  bool boundary = false;
  bool unbounded = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

struct Evaluation {
  double value;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// Damped Newton with backtracking on a smooth convex objective given in
// reduced coordinates. Terminates on gradient norm relative to scale_hint
// (the objective and its gradient inherit the magnitude of the direction
// being minimized over, so an absolute test would sit below the noise floor
// of the certified eigendata for large directions), on a flat plateau with a
// small gradient (marked as a boundary optimum when the iterate has walked
// far out), or on certified unbounded descent.
ReducedMinimization minimize_convex(
    int dim, const std::function<Evaluation(const Eigen::VectorXd&)>& eval,
    const std::function<double(const Eigen::VectorXd&)>& value_only,
    double tol, int max_iterations, double scale_hint) {
  ReducedMinimization out;
  out.point = Eigen::VectorXd::Zero(dim);

  Eigen::VectorXd s = out.point;
  double previous = kInf;
  int flat_steps = 0;

  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    // Distance is certified before evaluating: derivatives may not even be
    // computable out where the escape certificate already holds.
    if (s.lpNorm<Eigen::Infinity>() > kUnboundedDistance) {
      out.point = s;
      out.unbounded = true;
      return out;
    }
    Evaluation e = eval(s);
    out.value = e.value;
    out.gradient_norm = e.gradient.lpNorm<Eigen::Infinity>();

    if (out.gradient_norm <= tol * scale_hint) {
      out.point = s;
      out.converged = true;
      return out;
    }
    if (e.value < -kUnboundedDrop * scale_hint) {
      out.point = s;
      out.unbounded = true;
      return out;
    }
    if (std::abs(previous - e.value) <= 1e-13 * (1.0 + std::abs(e.value)))
      ++flat_steps;
    else
      flat_steps = 0;
    if (flat_steps >= 3 && out.gradient_norm <= kBoundaryGradient) {
      // The objective has been flat to machine precision for several steps
      // while the gradient is already tiny: we are at the optimum up to the
      // accuracy of the eigendata. Far-out iterates indicate an infimum
      // attained only in the limit (a face of the domain).
      out.point = s;
      out.converged = true;
      out.boundary = s.lpNorm<Eigen::Infinity>() >= kBoundaryDistance;
      return out;
    }
    previous = e.value;

    Eigen::VectorXd step;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(e.hessian);
    if (ldlt.info() == Eigen::Success) step = -ldlt.solve(e.gradient);
    if (ldlt.info() != Eigen::Success || step.dot(e.gradient) >= 0.0)
      step = -e.gradient;

    // Near-singular curvature (an escape ray) makes the Newton step
    // arbitrarily long; cap it so accepted iterates stay evaluable. The
    // escape certificate fires well inside the capped range.
    const double reach = 2.0 * kUnboundedDistance;
    double length = step.lpNorm<Eigen::Infinity>();
    if (length > reach) step *= reach / length;

    double t = 1.0;
    double directional = e.gradient.dot(step);
    bool moved = false;
    for (int halving = 0; halving < 60; ++halving) {
      double candidate = value_only(s + t * step);
      if (std::isfinite(candidate) &&
          candidate <= e.value + 1e-4 * t * directional) {
        s += t * step;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) {
      if (out.gradient_norm > kBoundaryGradient)
        throw SolverError(
            "growth optimization stalled before reaching a certificate");
      // No descent at machine precision with a tiny gradient: this is the
      // optimum up to the accuracy of the eigendata.
      out.point = s;
      out.converged = true;
      out.boundary = s.lpNorm<Eigen::Infinity>() >= kBoundaryDistance;
      return out;
    }
  }
  throw SolverError(
      "growth optimization did not converge within the iteration budget");
}

}  // namespace

bool omega_contains(const DirectedGraph& g, const Eigen::VectorXd& theta) {
  return perron_data(g, theta).lambda <= 1.0;
}

double delta_g(const DirectedGraph& g) {
  return std::log(perron_data(g, Eigen::VectorXd::Zero(g.edge_count())).lambda);
}

Eigen::VectorXd x_g(const DirectedGraph& g) {
  double delta = delta_g(g);
  return grad_lambda(g, Eigen::VectorXd::Constant(g.edge_count(), delta)).x;
}

Eigen::MatrixXd label_incidence(const DirectedGraph& g) {
  if (!g.labelled())
    return Eigen::MatrixXd::Identity(g.edge_count(), g.edge_count());
  Eigen::MatrixXd pi =
      Eigen::MatrixXd::Zero(g.edge_count(), g.label_count());
  for (int a = 0; a < g.edge_count(); ++a) pi(a, g.label[a]) = 1.0;
  return pi;
}

GrowthProfile psi(const DirectedGraph& g, const Eigen::VectorXd& x,
                  double tol, int max_iterations) {
  require_connected(g);
  if (x.size() != g.edge_count())
    throw UsageError("direction length does not match the edge count");

  GrowthProfile profile;
  profile.psi = -kInf;

  // Negative coordinates put the direction outside every occurrence cone.
  if ((x.array() < 0).any()) return profile;

  const double total = x.sum();
  const double scale = x.lpNorm<Eigen::Infinity>();
  double delta = delta_g(g);

  if (total == 0.0) {
    // The zero direction: the infimum of <theta, 0> is exactly zero.
    profile.psi = 0.0;
    profile.finite = true;
    profile.converged = true;
    profile.theta_star = Eigen::VectorXd::Constant(g.edge_count(), delta);
    return profile;
  }

  // Unless x is a circulation (inflow equals outflow at every vertex), the
  // objective is linear and unbounded along some coboundary direction.
  Eigen::VectorXd imbalance = nabla_matrix(g).transpose() * x;
  if (imbalance.lpNorm<Eigen::Infinity>() > 1e-9 * std::max(scale, 1.0))
    return profile;

  Eigen::MatrixXd basis = transverse_basis(g);
  const int r = static_cast<int>(basis.cols());
  Eigen::VectorXd theta0 = Eigen::VectorXd::Constant(g.edge_count(), delta);

  if (r == 0) {
    // Everything is scaling plus coboundary: the objective is constant.
    profile.psi = total * delta;
    profile.finite = true;
    profile.converged = true;
    profile.theta_star = theta0;
    return profile;
  }

  auto lift = [&](const Eigen::VectorXd& s) -> Eigen::VectorXd {
    return theta0 + basis * s;
  };
  auto value_only = [&](const Eigen::VectorXd& s) -> double {
    try {
      Eigen::VectorXd theta = lift(s);
      return theta.dot(x) + total * std::log(perron_data(g, theta).lambda);
    } catch (const SolverError&) {
      return kInf;  // weights outside double range: reject this step
    }
  };
  auto eval = [&](const Eigen::VectorXd& s) -> Evaluation {
    Eigen::VectorXd theta = lift(s);
    GradientData data = grad_lambda(g, theta);
    Evaluation e;
    e.value = theta.dot(x) + total * std::log(data.perron.lambda);
    e.gradient = basis.transpose() * (x - total * data.x);
    try {
      e.hessian = total * basis.transpose() *
                  hessian_log_lambda(g, data).matrix * basis;
    } catch (const SolverError&) {
      // Curvature is not computable this far out; fall back to a gradient
      // step, which is all an escape ray needs.
      e.hessian = Eigen::MatrixXd::Identity(s.size(), s.size());
    }
    return e;
  };

  ReducedMinimization result =
      minimize_convex(r, eval, value_only, tol, max_iterations, 1.0 + total);

  profile.iterations = result.iterations;
  profile.gradient_norm = result.gradient_norm;
  if (result.unbounded) return profile;  // outside the occurrence cone

  Eigen::VectorXd theta = lift(result.point);
  double lambda = perron_data(g, theta).lambda;
  profile.theta_star =
      theta + std::log(lambda) * Eigen::VectorXd::Ones(g.edge_count());
  profile.psi = result.value;
  profile.finite = true;
  // In a strongly connected graph a circulation with all-positive
  // coordinates decomposes into cycles covering every edge, so it lies in
  // the relative interior of the cone and the infimum is attained at a
  // finite point; a vanishing coordinate puts it on a face, where the
  // infimum is only approached in the limit.
  profile.boundary = result.boundary || x.minCoeff() == 0.0;
  profile.converged = result.converged;
  return profile;
}

SoficGrowthProfile psi_sofic(const DirectedGraph& g, const Eigen::VectorXd& y,
                             double tol, int max_iterations) {
  require_connected(g);
  const int nb = g.labelled() ? g.label_count() : g.edge_count();
  if (y.size() != nb)
    throw UsageError("direction length does not match the label count");

  SoficGrowthProfile profile;
  profile.psi = -kInf;

  if ((y.array() < 0).any()) return profile;

  const double total = y.sum();
  double delta = delta_g(g);
  Eigen::MatrixXd pi = label_incidence(g);

  if (total == 0.0) {
    profile.psi = 0.0;
    profile.finite = true;
    profile.converged = true;
    profile.f_star = Eigen::VectorXd::Constant(nb, delta);
    profile.attained_x = Eigen::VectorXd::Zero(g.edge_count());
    return profile;
  }

  // Split label-weight space along K = { d : pi(d) is scaling + coboundary }.
  // On K the objective is linear: it must be constant (else -infinity), and
  // the minimization runs on the orthogonal complement.
  Eigen::MatrixXd basis = transverse_basis(g);
  Eigen::MatrixXd reduced_map = basis.transpose() * pi;  // r x |B|

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      reduced_map, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double top = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-10 * std::max(top, 1.0)) ++rank;
  Eigen::MatrixXd complement = svd.matrixV().leftCols(rank);  // K-perp
  Eigen::MatrixXd kernel = svd.matrixV().rightCols(nb - rank);

  // Linear-defect test on K: direction d with pi(d) = c*1 + coboundary moves
  // the objective by <d, y> - total * c per unit step.
  Eigen::MatrixXd span(g.edge_count(), 1 + g.vertex_count());
  span.col(0) = Eigen::VectorXd::Ones(g.edge_count());
  span.rightCols(g.vertex_count()) = nabla_matrix(g);
  for (int j = 0; j < kernel.cols(); ++j) {
    Eigen::VectorXd d = kernel.col(j);
    Eigen::VectorXd coeffs =
        span.colPivHouseholderQr().solve(pi * d);
    double c = coeffs[0];
    if (std::abs(d.dot(y) - total * c) > 1e-9 * std::max(total, 1.0))
      return profile;
  }

  Eigen::VectorXd f0 = Eigen::VectorXd::Constant(nb, delta);

  if (rank == 0) {
    profile.psi = total * delta;
    profile.finite = true;
    profile.converged = true;
    profile.f_star = f0;
    profile.attained_x =
        total * grad_lambda(g, pi * f0).x;
    return profile;
  }

  auto lift = [&](const Eigen::VectorXd& s) -> Eigen::VectorXd {
    return f0 + complement * s;
  };
  auto value_only = [&](const Eigen::VectorXd& s) -> double {
    try {
      Eigen::VectorXd f = lift(s);
      return f.dot(y) + total * std::log(perron_data(g, pi * f).lambda);
    } catch (const SolverError&) {
      return kInf;  // weights outside double range: reject this step
    }
  };
  auto eval = [&](const Eigen::VectorXd& s) -> Evaluation {
    Eigen::VectorXd f = lift(s);
    GradientData data = grad_lambda(g, pi * f);
    Evaluation e;
    e.value = f.dot(y) + total * std::log(data.perron.lambda);
    e.gradient =
        complement.transpose() * (y - total * pi.transpose() * data.x);
    try {
      e.hessian = total * complement.transpose() * pi.transpose() *
                  hessian_log_lambda(g, data).matrix * pi * complement;
    } catch (const SolverError&) {
      // Curvature is not computable this far out; fall back to a gradient
      // step, which is all an escape ray needs.
      e.hessian = Eigen::MatrixXd::Identity(s.size(), s.size());
    }
    return e;
  };

  ReducedMinimization result = minimize_convex(rank, eval, value_only, tol,
                                               max_iterations, 1.0 + total);

  profile.iterations = result.iterations;
  profile.gradient_norm = result.gradient_norm;
  if (result.unbounded) return profile;

  Eigen::VectorXd f = lift(result.point);
  GradientData data = grad_lambda(g, pi * f);
  profile.f_star =
      f + std::log(data.perron.lambda) * Eigen::VectorXd::Ones(nb);
  profile.attained_x = total * data.x;
  profile.psi = result.value;
  profile.finite = true;
  // A (near-)vanishing coordinate of the attained direction means the
  // optimum sits on a face of the cone and is only approached in the limit.
  profile.boundary = result.boundary ||
                     profile.attained_x.minCoeff() <= 1e-9 * (1.0 + total);
  profile.converged = result.converged;
  return profile;
}

}  // namespace dircount
