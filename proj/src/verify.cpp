#include "dircount/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "dircount/counting.hpp"
#include "dircount/errors.hpp"
#include "dircount/exact.hpp"
#include "dircount/growth.hpp"
#include "dircount/lattice.hpp"
#include "dircount/spectral.hpp"
#include "dircount/transfer.hpp"

namespace dircount {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vec(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out + "]";
}

std::string fmt_ints(const std::vector<Int>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += v[i].get_str();
  }
  return out + "]";
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int size, double lo,
                              double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = dist(rng);
  return v;
}

// Number of length-n paths q -> q2, by exact integer matrix powers.
Int path_count(const DirectedGraph& g, int n, int q, int q2) {
  const int nq = g.vertex_count();
  std::vector<Int> power(static_cast<size_t>(nq) * nq, 0);
  for (int v = 0; v < nq; ++v) power[static_cast<size_t>(v) * nq + v] = 1;
  std::vector<Int> adj(static_cast<size_t>(nq) * nq, 0);
  for (int a = 0; a < g.edge_count(); ++a)
    adj[static_cast<size_t>(g.source[a]) * nq + g.goal[a]] += 1;
  std::vector<Int> next(static_cast<size_t>(nq) * nq);
  for (int step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), Int(0));
    for (int i = 0; i < nq; ++i)
      for (int k = 0; k < nq; ++k) {
        const Int& pik = power[static_cast<size_t>(i) * nq + k];
        if (pik == 0) continue;
        for (int j = 0; j < nq; ++j)
          next[static_cast<size_t>(i) * nq + j] +=
              pik * adj[static_cast<size_t>(k) * nq + j];
      }
    power.swap(next);
  }
  return power[static_cast<size_t>(q) * nq + q2];
}

Int total_words(const DirectedGraph& g, int n, int q) {
  Int total = 0;
  for (int q2 = 0; q2 < g.vertex_count(); ++q2)
    total += path_count(g, n, q, q2);
  return total;
}

double log_int(const Int& v) {
  signed long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
}

// Largest n <= cap with at most 'budget' words over all endpoint pairs.
int pick_sweep_length(const DirectedGraph& g, int cap, double budget) {
  int best = 1;
  for (int n = 1; n <= cap; ++n) {
    Int total = 0;
    for (int q = 0; q < g.vertex_count(); ++q) total += total_words(g, n, q);
    if (total > Int(0) && log_int(total) > std::log(budget)) break;
    best = n;
  }
  return best;
}

using Suite = void (*)(const DirectedGraph&, std::mt19937_64&, int,
                       PropertyResult&);

void fail(PropertyResult& r, const std::string& reproducer) {
  if (r.pass) {
    r.pass = false;
    r.detail = reproducer;
  }
}

// --- perron-certificate ----------------------------------------------------
// The reported eigenvalue is pinched between the smallest and largest
// coordinate ratio of L f / f, and both eigenvector residuals vanish.
void suite_perron(const DirectedGraph& g, std::mt19937_64& rng,
                  int, PropertyResult& r) {
  for (int probe = 0; probe < 10; ++probe) {
    Eigen::VectorXd theta =
        probe == 0 ? Eigen::VectorXd::Zero(g.edge_count())
                   : random_vector(rng, g.edge_count(), -2.0, 2.0);
    PerronData pd = perron_data(g, theta);
    Eigen::MatrixXd L = transfer_matrix(g, theta);
    Eigen::VectorXd lf = L * pd.right;
    Eigen::VectorXd married = lf.cwiseQuotient(pd.right);
    double lo = married.minCoeff(), hi = married.maxCoeff();
    ++r.checks;
    if (!(lo <= pd.lambda * (1 + 1e-12) && pd.lambda * (1 - 1e-12) <= hi &&
          (hi - lo) <= 1e-9 * pd.lambda))
      fail(r, "ratio bounds [" + fmt(lo) + ", " + fmt(hi) +
                  "] do not certify lambda = " + fmt(pd.lambda) +
                  " at theta = " + fmt_vec(theta));
    double res_right = (lf - pd.lambda * pd.right).cwiseAbs().maxCoeff();
    double res_left =
        (L.transpose() * pd.left - pd.lambda * pd.left).cwiseAbs().maxCoeff();
    ++r.checks;
    if (res_right > 1e-9 * pd.lambda * pd.right.maxCoeff() ||
        res_left > 1e-9 * pd.lambda * pd.left.maxCoeff())
      fail(r, "eigenvector residuals " + fmt(res_right) + " / " +
                  fmt(res_left) + " at theta = " + fmt_vec(theta));
    ++r.checks;
    if (std::abs(pd.left.sum() - 1.0) > 1e-10 ||
        std::abs(pd.left.dot(pd.right) - 1.0) > 1e-10)
      fail(r, "eigenvector normalization broken at theta = " + fmt_vec(theta));
  }
}

// --- documented-values -----------------------------------------------------
void suite_documented(const DirectedGraph& g, std::mt19937_64&,
                      int, PropertyResult& r) {
  if (g.expected.empty()) {
    r.detail = "skipped: the graph document records no reference values";
    return;
  }
  for (const auto& [key, value] : g.expected) {
    ++r.checks;
    if (key == "delta") {
      double delta = delta_g(g);
      if (std::abs(delta - value) > 1e-8 * (1.0 + std::abs(value)))
        fail(r, "recorded delta = " + fmt(value) +
                    " but recomputation gives " + fmt(delta));
    } else if (key == "period") {
      int p = compute_period(g).p;
      if (static_cast<double>(p) != value)
        fail(r, "recorded period = " + fmt(value) +
                    " but recomputation gives " + std::to_string(p));
    } else {
      fail(r, "unknown reference key '" + key + "'");
    }
  }
}

// --- gradient-check --------------------------------------------------------
void suite_gradient(const DirectedGraph& g, std::mt19937_64& rng,
                    int, PropertyResult& r) {
  const int na = g.edge_count();
  for (int probe = 0; probe < 6; ++probe) {
    Eigen::VectorXd theta = random_vector(rng, na, -1.5, 1.5);
    GradientData data = grad_lambda(g, theta);
    const double h = 1e-5;
    for (int a = 0; a < na; ++a) {
      Eigen::VectorXd lo = theta, hi = theta;
      lo[a] -= h;
      hi[a] += h;
      double numeric = (std::log(perron_data(g, hi).lambda) -
                        std::log(perron_data(g, lo).lambda)) /
                       (2 * h);
      ++r.checks;
      if (std::abs(numeric + data.x[a]) > 1e-6 * (1.0 + std::abs(data.x[a])))
        fail(r, "gradient coordinate " + g.edge_names[a] + " analytic " +
                    fmt(-data.x[a]) + " vs numeric " + fmt(numeric) +
                    " at theta = " + fmt_vec(theta));
    }
  }
}

// --- hessian-structure -----------------------------------------------------
void suite_hessian(const DirectedGraph& g, std::mt19937_64& rng,
                   int, PropertyResult& r) {
  const int na = g.edge_count();
  const int nq = g.vertex_count();
  for (int probe = 0; probe < 5; ++probe) {
    Eigen::VectorXd theta = random_vector(rng, na, -1.5, 1.5);
    Eigen::MatrixXd H = hessian_log_lambda(g, grad_lambda(g, theta)).matrix;
    const double scale = 1.0 + H.cwiseAbs().maxCoeff();
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(na);
    ++r.checks;
    if (std::abs(ones.dot(H * ones)) > 1e-9 * scale)
      fail(r, "curvature does not vanish along the uniform direction at "
              "theta = " +
                  fmt_vec(theta));
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXd xi = random_vector(rng, nq, -1.0, 1.0);
      Eigen::VectorXd grad = nabla(g, xi);
      ++r.checks;
      if (std::abs(grad.dot(H * grad)) > 1e-9 * scale * (1 + grad.squaredNorm()))
        fail(r, "curvature does not vanish along a potential difference; "
                "theta = " +
                    fmt_vec(theta) + ", potential = " + fmt_vec(xi));
    }
    Eigen::MatrixXd B = transverse_basis(g);
    if (B.cols() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B.transpose() * H *
                                                         B);
      ++r.checks;
      if (eig.eigenvalues().minCoeff() <= 0.0)
        fail(r, "curvature not positive on the fluctuation space at theta = " +
                    fmt_vec(theta));
    }
  }
}

// --- gauge-moves ------------------------------------------------------------
// Adding a potential difference leaves the eigenvalue and direction alone;
// adding c to every coordinate scales the eigenvalue by e^{-c}.
void suite_gauge(const DirectedGraph& g, std::mt19937_64& rng,
                 int, PropertyResult& r) {
  const int na = g.edge_count();
  for (int probe = 0; probe < 8; ++probe) {
    Eigen::VectorXd theta = random_vector(rng, na, -1.5, 1.5);
    Eigen::VectorXd xi = random_vector(rng, g.vertex_count(), -1.0, 1.0);
    double c = random_vector(rng, 1, -0.7, 0.7)[0];
    GradientData base = grad_lambda(g, theta);
    Eigen::VectorXd moved_theta =
        theta + nabla(g, xi) + Eigen::VectorXd::Constant(na, c);
    GradientData moved = grad_lambda(g, moved_theta);
    ++r.checks;
    if (std::abs(moved.perron.lambda - base.perron.lambda * std::exp(-c)) >
        1e-9 * base.perron.lambda * std::exp(-c))
      fail(r, "eigenvalue not equivariant under the gauge move; theta = " +
                  fmt_vec(theta) + ", potential = " + fmt_vec(xi) +
                  ", shift = " + fmt(c));
    ++r.checks;
    if ((moved.x - base.x).cwiseAbs().maxCoeff() > 1e-8)
      fail(r, "direction moved under a gauge move; theta = " + fmt_vec(theta) +
                  ", potential = " + fmt_vec(xi) + ", shift = " + fmt(c));
  }
}

// --- duality-stationarity ---------------------------------------------------
// For theta normalized to a unit eigenvalue, the growth indicator at the
// gradient direction equals <theta, x>: the optimization is tight exactly at
// its stationary points.
void suite_duality(const DirectedGraph& g, std::mt19937_64& rng,
                   int, PropertyResult& r) {
  for (int probe = 0; probe < 8; ++probe) {
    Eigen::VectorXd theta0 = random_vector(rng, g.edge_count(), -1.0, 1.0);
    double shift = std::log(perron_data(g, theta0).lambda);
    Eigen::VectorXd theta =
        theta0 + Eigen::VectorXd::Constant(g.edge_count(), shift);
    GradientData data = grad_lambda(g, theta);
    GrowthProfile profile = psi(g, data.x);
    ++r.checks;
    if (!profile.finite || !profile.converged ||
        std::abs(profile.psi - theta.dot(data.x)) >
            1e-6 * (1.0 + std::abs(profile.psi)))
      fail(r, "growth indicator " + fmt(profile.psi) +
                  " differs from the tight bound " + fmt(theta.dot(data.x)) +
                  " at x = " + fmt_vec(data.x));
  }
}

// --- straightening-exact ----------------------------------------------------
// Straightened occurrence vectors are exactly orthogonal to every potential
// difference, and their coordinate sum is the length minus the offset drift.
void suite_straightening(const DirectedGraph& g, std::mt19937_64&,
                         int threads, PropertyResult& r) {
  LatticeFrame frame = build_lattice_frame(g);
  const int nq = g.vertex_count();
  const int na = g.edge_count();
  const int n_max = pick_sweep_length(g, 6, 50000.0);
  for (int q = 0; q < nq; ++q) {
    for (int q2 = 0; q2 < nq; ++q2) {
      std::vector<Int> shift = offset_shift(frame, q, q2);
      Int drift = 0;
      for (const Int& s : shift) drift += s;
      for (int n = 0; n <= n_max; ++n) {
        for (const Word& w : enumerate_paths(g, n, q, q2, threads)) {
          std::vector<long long> occ = occurrence(w, g);
          std::vector<Int> x(static_cast<size_t>(na));
          Int coordinate_sum = 0;
          for (int a = 0; a < na; ++a) {
            x[static_cast<size_t>(a)] =
                Int(static_cast<long>(occ[static_cast<size_t>(a)])) -
                shift[static_cast<size_t>(a)];
            coordinate_sum += x[static_cast<size_t>(a)];
          }
          ++r.checks;
          if (coordinate_sum + drift != Int(n))
            fail(r, "coordinate sum off for a length-" + std::to_string(n) +
                        " path " + g.vertex_names[q] + " -> " +
                        g.vertex_names[q2] + ", x = " + fmt_ints(x));
          for (int v = 0; v < nq; ++v) {
            Int dot = 0;
            for (int a = 0; a < na; ++a) {
              if (g.goal[a] == v) dot += x[static_cast<size_t>(a)];
              if (g.source[a] == v) dot -= x[static_cast<size_t>(a)];
            }
            ++r.checks;
            if (dot != 0)
              fail(r, "straightened vector not orthogonal to the potential "
                      "difference at vertex " +
                          g.vertex_names[v] + ", x = " + fmt_ints(x));
          }
        }
      }
    }
  }
}

// --- dp-enumeration ---------------------------------------------------------
void suite_dp(const DirectedGraph& g, std::mt19937_64&, int threads,
              PropertyResult& r) {
  LatticeFrame frame = build_lattice_frame(g);
  const int nq = g.vertex_count();
  const int n_max = pick_sweep_length(g, 7, 100000.0);
  for (int n = 0; n <= n_max; ++n) {
    for (int q = 0; q < nq; ++q) {
      for (int q2 = 0; q2 < nq; ++q2) {
        std::vector<Int> shift = offset_shift(frame, q, q2);
        std::map<std::vector<Int>, long long> buckets;
        for (const Word& w : enumerate_paths(g, n, q, q2, threads)) {
          std::vector<long long> occ = occurrence(w, g);
          std::vector<Int> x(occ.size());
          for (size_t i = 0; i < occ.size(); ++i)
            x[i] = Int(static_cast<long>(occ[i])) - shift[i];
          ++buckets[x];
        }
        Int total = 0;
        for (const auto& [x, count] : buckets) {
          CountQuery query;
          query.from = q;
          query.to = q2;
          query.length = n;
          query.target = x;
          ++r.checks;
          if (count_exact(g, frame, query) != Int(static_cast<long>(count)))
            fail(r, "count mismatch for " + g.vertex_names[q] + " -> " +
                        g.vertex_names[q2] + ", length " + std::to_string(n) +
                        ", target " + fmt_ints(x));
          total += static_cast<long>(count);
        }
        ++r.checks;
        if (total != path_count(g, n, q, q2))
          fail(r, "bucket totals disagree with matrix powers at length " +
                      std::to_string(n));
      }
    }
  }
}

// --- fiber-sums -------------------------------------------------------------
void suite_fibers(const DirectedGraph& g, std::mt19937_64&,
                  int threads, PropertyResult& r) {
  if (!g.labelled()) {
    r.detail = "skipped: the graph carries no labelling";
    return;
  }
  LatticeFrame frame = build_lattice_frame(g);
  const int nq = g.vertex_count();
  const int n_max = pick_sweep_length(g, 7, 100000.0);
  for (int n = 0; n <= n_max; ++n) {
    for (int q = 0; q < nq; ++q) {
      for (int q2 = 0; q2 < nq; ++q2) {
        std::vector<Int> shift = offset_shift(frame, q, q2);
        std::map<std::vector<Int>, Int> fibers;
        for (const Word& w : enumerate_paths(g, n, q, q2, threads)) {
          std::vector<long long> occ = occurrence(w, g);
          std::vector<Int> y(static_cast<size_t>(g.label_count()), 0);
          for (size_t a = 0; a < occ.size(); ++a)
            y[static_cast<size_t>(g.label[a])] +=
                Int(static_cast<long>(occ[a])) - shift[a];
          fibers[y] += 1;
        }
        for (const auto& [y, count] : fibers) {
          CountQuery query;
          query.from = q;
          query.to = q2;
          query.length = n;
          query.target = y;
          query.sofic = true;
          ++r.checks;
          if (count_exact(g, frame, query) != count)
            fail(r, "label count differs from its fiber sum for " +
                        g.vertex_names[q] + " -> " + g.vertex_names[q2] +
                        ", length " + std::to_string(n) + ", target " +
                        fmt_ints(y));
        }
      }
    }
  }
}

// --- prediction-gauge -------------------------------------------------------
void suite_prediction_gauge(const DirectedGraph& g, std::mt19937_64& rng,
                            int, PropertyResult& r) {
  if (is_cyclic(g)) {
    r.detail = "skipped: a cyclic graph has no positive-growth direction";
    return;
  }
  LatticeFrame frame = build_lattice_frame(g);
  Eigen::VectorXd x = x_g(g);
  GrowthProfile profile = psi(g, x);
  if (!profile.finite || !profile.converged) {
    fail(r, "growth solve failed at the maximizing direction " + fmt_vec(x));
    return;
  }
  Eigen::MatrixXd H =
      hessian_log_lambda(g, grad_lambda(g, profile.theta_star)).matrix;
  double sigma = variance_factor(H, frame.fluctuation_lattice);
  const int nq = std::min(g.vertex_count(), 6);
  for (int probe = 0; probe < 20; ++probe) {
    Eigen::VectorXd xi = random_vector(rng, g.vertex_count(), -1.0, 1.0);
    Eigen::VectorXd moved = profile.theta_star + nabla(g, xi);
    ++r.checks;
    if (std::abs(moved.dot(x) - profile.theta_star.dot(x)) > 1e-8)
      fail(r, "growth value moved under the gauge move, potential = " +
                  fmt_vec(xi));
    Eigen::MatrixXd H2 = hessian_log_lambda(g, grad_lambda(g, moved)).matrix;
    double sigma2 = variance_factor(H2, frame.fluctuation_lattice);
    ++r.checks;
    if (std::abs(sigma2 - sigma) > 1e-8 * sigma)
      fail(r, "variance factor moved under the gauge move, potential = " +
                  fmt_vec(xi));
    for (int from = 0; from < nq; ++from) {
      for (int to = 0; to < nq; ++to) {
        double base = leading_constant(g, frame, profile.theta_star, from, to);
        double after = leading_constant(g, frame, moved, from, to);
        ++r.checks;
        if (std::abs(after - base) > 1e-8 * std::abs(base))
          fail(r, "endpoint constant moved under the gauge move (" +
                      g.vertex_names[from] + " -> " + g.vertex_names[to] +
                      "), potential = " + fmt_vec(xi));
      }
    }
  }
}

// --- growth-series ----------------------------------------------------------
// Word counts discounted slightly above the growth rate shrink; discounted
// slightly below, they blow up. Pins delta as the radius of convergence.
void suite_series(const DirectedGraph& g, std::mt19937_64&,
                  int, PropertyResult& r) {
  double delta = delta_g(g);
  if (delta <= 1e-9) {
    r.detail = "skipped: the growth rate vanishes";
    return;
  }
  const int p = compute_period(g).p;
  std::vector<int> lengths = {10 * p, 20 * p, 30 * p};
  for (double factor : {1.1, 0.9}) {
    double t = factor * delta;
    std::vector<double> log_terms;
    for (int n : lengths)
      log_terms.push_back(log_int(total_words(g, n, 0)) - t * n);
    for (size_t i = 1; i < log_terms.size(); ++i) {
      ++r.checks;
      bool ok = factor > 1.0 ? log_terms[i] < log_terms[i - 1]
                             : log_terms[i] > log_terms[i - 1];
      if (!ok)
        fail(r, "discounted word series not monotone at discount " + fmt(t) +
                    ", lengths " + std::to_string(lengths[i - 1]) + " and " +
                    std::to_string(lengths[i]));
    }
  }
}

}  // namespace

VerifyReport run_property_sweeps(const DirectedGraph& g, unsigned long seed,
                                 int threads) {
  if (threads < 1) throw UsageError("thread count must be at least 1");
  require_connected(g);
  const std::pair<const char*, Suite> suites[] = {
      {"perron-certificate", suite_perron},
      {"documented-values", suite_documented},
      {"gradient-check", suite_gradient},
      {"hessian-structure", suite_hessian},
      {"gauge-moves", suite_gauge},
      {"duality-stationarity", suite_duality},
      {"straightening-exact", suite_straightening},
      {"dp-enumeration", suite_dp},
      {"fiber-sums", suite_fibers},
      {"prediction-gauge", suite_prediction_gauge},
      {"growth-series", suite_series},
  };
  VerifyReport report;
  for (const auto& [name, suite] : suites) {
    // Each suite draws from its own stream so adding checks to one suite
    // never shifts another suite's probes.
    std::mt19937_64 rng(seed ^ std::hash<std::string>{}(name));
    PropertyResult result;
    result.name = name;
    suite(g, rng, threads, result);
    report.all_pass = report.all_pass && result.pass;
    report.total_checks += result.checks;
    report.results.push_back(std::move(result));
  }
  return report;
}

}  // namespace dircount
