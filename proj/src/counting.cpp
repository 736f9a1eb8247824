#include "dircount/counting.hpp"

#include <gmp.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dircount/errors.hpp"
#include "dircount/growth.hpp"
#include "dircount/spectral.hpp"
#include "dircount/transfer.hpp"

namespace dircount {

double log_integer(const Int& v) {
  signed long exp2 = 0;
  double mantissa = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  return std::log(mantissa) + std::log(2.0) * static_cast<double>(exp2);
}

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

long long budget_bytes() {
  const char* env = std::getenv("DIRCOUNT_BUDGET_MB");
  long long mb = 512;
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    long long parsed = std::strtoll(env, &end, 10);
    if (end == env || *end != '\0' || parsed <= 0)
      throw UsageError("DIRCOUNT_BUDGET_MB must be a positive integer");
    mb = parsed;
  }
  return mb * 1024ll * 1024ll;
}

void check_endpoints(const DirectedGraph& g, int from, int to) {
  if (from < 0 || from >= g.vertex_count() || to < 0 ||
      to >= g.vertex_count())
    throw UsageError("vertex id out of range");
}

// Column index of an edge in the dynamic program: the edge itself for
// finite-type queries, its label for sofic ones.
std::vector<int> column_map(const DirectedGraph& g, bool sofic) {
  std::vector<int> col(static_cast<size_t>(g.edge_count()));
  for (int a = 0; a < g.edge_count(); ++a)
    col[static_cast<size_t>(a)] = (sofic && g.labelled()) ? g.label[a] : a;
  return col;
}

int column_count(const DirectedGraph& g, bool sofic) {
  return (sofic && g.labelled()) ? g.label_count() : g.edge_count();
}

// Pushforward of an edge-space integer vector to column space.
std::vector<Int> push_columns(const std::vector<Int>& v,
                              const std::vector<int>& col, int d) {
  std::vector<Int> out(static_cast<size_t>(d), 0);
  for (size_t a = 0; a < v.size(); ++a)
    out[static_cast<size_t>(col[a])] += v[a];
  return out;
}

}  // namespace

Feasibility screen_query(const DirectedGraph& g, const LatticeFrame& frame,
                         const CountQuery& query) {
  check_endpoints(g, query.from, query.to);
  if (query.length < 0) throw UsageError("length must be nonnegative");
  const int d = column_count(g, query.sofic);
  if (static_cast<int>(query.target.size()) != d)
    throw UsageError("target length does not match the coordinate count");

  Feasibility out;

  std::vector<Int> shift = offset_shift(frame, query.from, query.to);
  std::vector<Int> box = query.sofic
                             ? push_columns(shift, column_map(g, true), d)
                             : std::move(shift);
  Int sum = 0;
  bool nonnegative = true;
  for (int i = 0; i < d; ++i) {
    box[static_cast<size_t>(i)] += query.target[static_cast<size_t>(i)];
    sum += box[static_cast<size_t>(i)];
    nonnegative = nonnegative && box[static_cast<size_t>(i)] >= 0;
  }
  const bool well_formed = nonnegative && sum == Int(static_cast<long>(query.length));
  // A well-formed box is reported even when a later rule rejects the query,
  // so callers that bypass the screen still know what to sweep.
  if (well_formed) out.dp_target = std::move(box);

  const int p = frame.period.p;
  long long residue =
      (query.length - (frame.period.phase[static_cast<size_t>(query.to)] -
                       frame.period.phase[static_cast<size_t>(query.from)])) %
      p;
  if (residue < 0) residue += p;
  if (residue != 0) {
    out.reason = "phase";
    return out;
  }

  if (!query.sofic) {
    // A realizable straightened target always conserves flow at every vertex.
    std::vector<Int> divergence(static_cast<size_t>(g.vertex_count()), 0);
    for (int a = 0; a < g.edge_count(); ++a) {
      divergence[static_cast<size_t>(g.goal[a])] +=
          query.target[static_cast<size_t>(a)];
      divergence[static_cast<size_t>(g.source[a])] -=
          query.target[static_cast<size_t>(a)];
    }
    for (const Int& defect : divergence)
      if (defect != 0) {
        out.reason = "flow";
        return out;
      }
  }

  if (!well_formed) {
    out.reason = sum != Int(static_cast<long>(query.length)) ? "length"
                                                             : "negative";
    return out;
  }

  out.feasible = true;
  return out;
}

Int count_exact(const DirectedGraph& g, const LatticeFrame& frame,
                const CountQuery& query) {
  Feasibility screen = screen_query(g, frame, query);
  // With 'force' the phase and flow rules are skipped and the sweep runs
  // whenever the de-straightened box exists; it then reports the literal
  // dynamic-programming answer (zero, when the screen was right).
  if (!screen.feasible && (!query.force || screen.dp_target.empty()))
    return 0;

  const int nq = g.vertex_count();
  const int d = column_count(g, query.sofic);
  const std::vector<int> col = column_map(g, query.sofic);

  std::vector<long long> target(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i)
    target[static_cast<size_t>(i)] =
        screen.dp_target[static_cast<size_t>(i)].get_si();

  // Box volume and memory cap. Roughly 64 bytes per big-integer slot for
  // counts of this size; two layers of |Q| * volume slots.
  double volume = 1.0;
  for (int i = 0; i < d; ++i)
    volume *= static_cast<double>(target[static_cast<size_t>(i)] + 1);
  double bytes = 2.0 * nq * volume * 64.0;
  if (bytes > static_cast<double>(budget_bytes()))
    throw BudgetError(
        "state space needs about " +
        std::to_string(static_cast<long long>(bytes / (1024.0 * 1024.0)) + 1) +
        " MB; raise DIRCOUNT_BUDGET_MB to allow it");

  size_t nstates = 1;
  std::vector<size_t> stride(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    stride[static_cast<size_t>(i)] = nstates;
    nstates *= static_cast<size_t>(target[static_cast<size_t>(i)] + 1);
  }

  std::vector<Int> cur(nstates * static_cast<size_t>(nq), 0);
  std::vector<Int> next(nstates * static_cast<size_t>(nq), 0);
  cur[static_cast<size_t>(query.from)] = 1;  // state 0: nothing consumed yet

  std::vector<long long> digit(static_cast<size_t>(d), 0);
  for (long long step = 0; step < query.length; ++step) {
    std::fill(digit.begin(), digit.end(), 0);
    long long digit_sum = 0;
    for (size_t s = 0; s < nstates; ++s) {
      // Only states whose consumed total equals the step can hold paths.
      if (digit_sum == step) {
        const Int* base = &cur[s * static_cast<size_t>(nq)];
        for (int v = 0; v < nq; ++v) {
          if (base[v] == 0) continue;
          for (int a : g.out_edges[static_cast<size_t>(v)]) {
            const int c = col[static_cast<size_t>(a)];
            if (digit[static_cast<size_t>(c)] >=
                target[static_cast<size_t>(c)])
              continue;
            next[(s + stride[static_cast<size_t>(c)]) *
                     static_cast<size_t>(nq) +
                 static_cast<size_t>(g.goal[a])] += base[v];
          }
        }
      }
      for (int i = 0; i < d; ++i) {  // odometer increment
        if (digit[static_cast<size_t>(i)] < target[static_cast<size_t>(i)]) {
          ++digit[static_cast<size_t>(i)];
          ++digit_sum;
          break;
        }
        digit_sum -= digit[static_cast<size_t>(i)];
        digit[static_cast<size_t>(i)] = 0;
      }
    }
    cur.swap(next);
    for (Int& c : next) c = 0;
  }

  return cur[(nstates - 1) * static_cast<size_t>(nq) +
             static_cast<size_t>(query.to)];
}

double leading_constant(const DirectedGraph& g, const LatticeFrame& frame,
                        const Eigen::VectorXd& theta, int from, int to) {
  check_endpoints(g, from, to);
  if (theta.size() != g.edge_count())
    throw UsageError("weight vector length does not match the edge count");
  PerronData pd = perron_data(g, theta);
  if (std::abs(pd.lambda - 1.0) > 1e-6)
    throw UsageError(
        "the endpoint constant requires weights with unit leading eigenvalue");
  Eigen::VectorXd shift = offset_shift_double(frame, from, to);
  return frame.period.p * std::exp(theta.dot(shift)) * pd.left[to] *
         pd.right[from];
}

PredictionContext make_prediction_context(const DirectedGraph& g,
                                          const LatticeFrame& frame,
                                          const Eigen::VectorXd& direction,
                                          int from, int to, bool sofic) {
  check_endpoints(g, from, to);
  PredictionContext ctx;

  Eigen::VectorXd theta;
  double value = 0.0;
  if (!sofic) {
    GrowthProfile profile = psi(g, direction);
    if (!profile.finite) {
      ctx.reason = "the growth indicator is negative infinity here";
      return ctx;
    }
    if (!profile.converged)
      throw SolverError("growth optimization did not converge");
    if (profile.psi <= 0.0) {
      ctx.reason = "the growth indicator is not positive here";
      return ctx;
    }
    if (profile.boundary) {
      ctx.reason = "the direction lies on a face of the growth cone";
      return ctx;
    }
    theta = profile.theta_star;
    value = profile.psi;
    ctx.dimension = frame.r;
    HessianForm form = hessian_log_lambda(g, grad_lambda(g, theta));
    ctx.sigma = variance_factor(form.matrix, frame.fluctuation_lattice);
  } else {
    SoficGrowthProfile profile = psi_sofic(g, direction);
    if (!profile.finite) {
      ctx.reason = "the growth indicator is negative infinity here";
      return ctx;
    }
    if (!profile.converged)
      throw SolverError("growth optimization did not converge");
    if (profile.psi <= 0.0) {
      ctx.reason = "the growth indicator is not positive here";
      return ctx;
    }
    if (profile.boundary) {
      ctx.reason = "the direction lies on a face of the growth cone";
      return ctx;
    }
    theta = label_incidence(g) * profile.f_star;
    value = profile.psi;
    LabelLattice image = label_fluctuation_lattice(g, frame);
    ctx.dimension = image.s;
    HessianForm form = hessian_log_lambda(g, grad_lambda(g, theta));
    ctx.sigma = variance_factor(label_form(g, form.matrix), image.basis);
  }

  ctx.constant = leading_constant(g, frame, theta, from, to);
  ctx.theta = std::move(theta);
  ctx.psi_unit = value;
  ctx.refused = false;
  return ctx;
}

Prediction predict_from_context(const PredictionContext& ctx,
                                long long length, double scale) {
  Prediction out;
  if (ctx.refused) {
    out.reason = ctx.reason;
    return out;
  }
  if (length < 1) {
    out.reason = "length";
    return out;
  }
  out.refused = false;
  out.psi_value = scale * ctx.psi_unit;
  out.sigma = ctx.sigma;
  out.dimension = ctx.dimension;
  out.theta = ctx.theta;
  out.log_value = -0.5 * ctx.dimension *
                      std::log(2.0 * kPi * static_cast<double>(length)) -
                  std::log(ctx.sigma) + out.psi_value +
                  std::log(ctx.constant);
  out.value = std::exp(out.log_value);
  return out;
}

Prediction count_predicted(const DirectedGraph& g, const LatticeFrame& frame,
                           const CountQuery& query) {
  Feasibility screen = screen_query(g, frame, query);
  if (!screen.feasible) {
    Prediction out;
    out.reason = screen.reason;
    return out;
  }
  Eigen::VectorXd direction(query.target.size());
  for (size_t i = 0; i < query.target.size(); ++i)
    direction[static_cast<Eigen::Index>(i)] = query.target[i].get_d();
  PredictionContext ctx = make_prediction_context(
      g, frame, direction, query.from, query.to, query.sofic);
  return predict_from_context(ctx, query.length, 1.0);
}

double global_count_predicted(const DirectedGraph& g, long long n, int q) {
  check_endpoints(g, q, q);
  if (n < 0) throw UsageError("length must be nonnegative");
  require_connected(g);
  const double delta = delta_g(g);
  Eigen::VectorXd theta =
      Eigen::VectorXd::Constant(g.edge_count(), delta);
  PerronData pd = perron_data(g, theta);
  PeriodData period = compute_period(g);
  const int want =
      static_cast<int>((period.phase[static_cast<size_t>(q)] + n) % period.p);
  double mass = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (period.phase[static_cast<size_t>(v)] == want) mass += pd.left[v];
  return period.p * std::exp(delta * static_cast<double>(n)) * mass *
         pd.right[q];
}

CltReport clt_diagnostic(const DirectedGraph& g, const Eigen::VectorXd& theta,
                         int q, long long n) {
  check_endpoints(g, q, q);
  if (n < 1) throw UsageError("length must be positive");
  if (n > 1000000)
    throw BudgetError("moment propagation is capped at length 1000000");
  if (theta.size() != g.edge_count())
    throw UsageError("weight vector length does not match the edge count");

  GradientData data = grad_lambda(g, theta);
  if (std::abs(data.perron.lambda - 1.0) > 1e-8)
    throw UsageError(
        "the diagnostic requires weights with unit leading eigenvalue");

  const int nq = g.vertex_count();
  const int na = g.edge_count();

  // Weighted moment propagation: per end vertex, the sums over paths from q
  // of weight * (1, occurrence, occurrence outer square).
  std::vector<double> m0(static_cast<size_t>(nq), 0.0);
  std::vector<Eigen::VectorXd> m1(static_cast<size_t>(nq),
                                  Eigen::VectorXd::Zero(na));
  std::vector<Eigen::MatrixXd> m2(static_cast<size_t>(nq),
                                  Eigen::MatrixXd::Zero(na, na));
  m0[static_cast<size_t>(q)] = 1.0;

  std::vector<double> n0(static_cast<size_t>(nq));
  std::vector<Eigen::VectorXd> n1(static_cast<size_t>(nq));
  std::vector<Eigen::MatrixXd> n2(static_cast<size_t>(nq));
  for (long long step = 0; step < n; ++step) {
    for (int v = 0; v < nq; ++v) {
      n0[static_cast<size_t>(v)] = 0.0;
      n1[static_cast<size_t>(v)] = Eigen::VectorXd::Zero(na);
      n2[static_cast<size_t>(v)] = Eigen::MatrixXd::Zero(na, na);
    }
    for (int v = 0; v < nq; ++v) {
      if (m0[static_cast<size_t>(v)] == 0.0 &&
          m1[static_cast<size_t>(v)].isZero(0.0))
        continue;
      for (int a : g.out_edges[static_cast<size_t>(v)]) {
        const int v2 = g.goal[a];
        const double w = data.weights[a];
        n0[static_cast<size_t>(v2)] += w * m0[static_cast<size_t>(v)];
        n1[static_cast<size_t>(v2)] += w * m1[static_cast<size_t>(v)];
        n1[static_cast<size_t>(v2)][a] += w * m0[static_cast<size_t>(v)];
        n2[static_cast<size_t>(v2)] += w * m2[static_cast<size_t>(v)];
        n2[static_cast<size_t>(v2)].col(a) += w * m1[static_cast<size_t>(v)];
        n2[static_cast<size_t>(v2)].row(a) +=
            w * m1[static_cast<size_t>(v)].transpose();
        n2[static_cast<size_t>(v2)](a, a) += w * m0[static_cast<size_t>(v)];
      }
    }
    m0.swap(n0);
    m1.swap(n1);
    m2.swap(n2);
  }

  double t0 = 0.0;
  Eigen::VectorXd t1 = Eigen::VectorXd::Zero(na);
  Eigen::MatrixXd t2 = Eigen::MatrixXd::Zero(na, na);
  for (int v = 0; v < nq; ++v) {
    t0 += m0[static_cast<size_t>(v)];
    t1 += m1[static_cast<size_t>(v)];
    t2 += m2[static_cast<size_t>(v)];
  }
  if (t0 <= 0.0) throw SolverError("the weighted path mass vanished");

  const double dn = static_cast<double>(n);
  const Eigen::VectorXd& x = data.x;

  CltReport report;
  report.total_mass = t0;
  report.first_moment = (t1 - dn * t0 * x) / dn;
  Eigen::MatrixXd centered = t2 - dn * (x * t1.transpose()) -
                             dn * (t1 * x.transpose()) +
                             dn * dn * t0 * (x * x.transpose());
  Eigen::MatrixXd basis = transverse_basis(g);
  report.second_moment =
      basis.transpose() * (centered / (dn * t0)) * basis;
  report.gaussian_covariance =
      basis.transpose() * hessian_log_lambda(g, data).matrix * basis;

  PeriodData period = compute_period(g);
  const int want =
      static_cast<int>((period.phase[static_cast<size_t>(q)] + n) % period.p);
  double mass = 0.0;
  for (int v = 0; v < nq; ++v)
    if (period.phase[static_cast<size_t>(v)] == want)
      mass += data.perron.left[v];
  report.mass_prediction = period.p * mass * data.perron.right[q];
  return report;
}

namespace {

// Coordinate sum of the de-straightened target along the ray at multiplier
// m, i.e. the word length the query prescribes.
long long ray_length(const Int& direction_sum, const Int& shift_sum,
                     long long m) {
  Int n = direction_sum * static_cast<long>(m) + shift_sum;
  return n.get_si();
}

}  // namespace

std::vector<long long> feasible_lengths(const DirectedGraph& g,
                                        const LatticeFrame& frame,
                                        const CountQuery& base,
                                        long long max_length) {
  check_endpoints(g, base.from, base.to);
  const int d = column_count(g, base.sofic);
  if (static_cast<int>(base.target.size()) != d)
    throw UsageError("target length does not match the coordinate count");

  Int direction_sum = 0;
  for (const Int& c : base.target) direction_sum += c;
  if (direction_sum <= 0)
    throw UsageError("ray direction must have positive coordinate sum");

  std::vector<Int> shift = offset_shift(frame, base.from, base.to);
  Int shift_sum = 0;
  for (const Int& c : shift) shift_sum += c;

  std::vector<long long> lengths;
  for (long long m = 1;; ++m) {
    long long n = ray_length(direction_sum, shift_sum, m);
    if (n > max_length) break;
    if (n < 1) continue;
    CountQuery query = base;
    query.length = n;
    for (Int& c : query.target) c *= static_cast<long>(m);
    if (screen_query(g, frame, query).feasible) lengths.push_back(n);
  }
  return lengths;
}

ConvergenceReport convergence_report(const DirectedGraph& g,
                                     const LatticeFrame& frame,
                                     const CountQuery& base,
                                     const std::vector<long long>& lengths) {
  check_endpoints(g, base.from, base.to);
  const int d = column_count(g, base.sofic);
  if (static_cast<int>(base.target.size()) != d)
    throw UsageError("target length does not match the coordinate count");

  Int direction_sum = 0;
  for (const Int& c : base.target) direction_sum += c;
  if (direction_sum <= 0)
    throw UsageError("ray direction must have positive coordinate sum");

  std::vector<Int> shift = offset_shift(frame, base.from, base.to);
  Int shift_sum = 0;
  for (const Int& c : shift) shift_sum += c;

  Eigen::VectorXd direction(base.target.size());
  for (size_t i = 0; i < base.target.size(); ++i)
    direction[static_cast<Eigen::Index>(i)] = base.target[i].get_d();
  PredictionContext ctx = make_prediction_context(
      g, frame, direction, base.from, base.to, base.sofic);

  ConvergenceReport report;
  report.sigma = ctx.sigma;
  report.dimension = ctx.dimension;
  report.psi_rate =
      ctx.refused ? kNan : ctx.psi_unit / direction_sum.get_d();

  for (long long n : lengths) {
    Int numerator = Int(static_cast<long>(n)) - shift_sum;
    Int m_exact, remainder;
    mpz_fdiv_qr(m_exact.get_mpz_t(), remainder.get_mpz_t(),
                numerator.get_mpz_t(), direction_sum.get_mpz_t());
    if (remainder != 0 || m_exact < 1)
      throw UsageError("length " + std::to_string(n) +
                       " is not on the requested ray");
    long long m = m_exact.get_si();

    CountQuery query = base;
    query.length = n;
    for (Int& c : query.target) c *= static_cast<long>(m);

    ConvergenceRow row;
    row.length = n;
    row.exact = count_exact(g, frame, query);
    Prediction pred =
        predict_from_context(ctx, n, static_cast<double>(m));
    row.predicted = pred.refused ? kNan : pred.value;
    row.ratio = (!pred.refused && row.exact > 0)
                    ? std::exp(log_integer(row.exact) - pred.log_value)
                    : kNan;
    report.rows.push_back(std::move(row));
  }

  // Least squares for log(exact) = intercept + rate * n + exponent * log n
  // over the rows with a positive exact count.
  std::vector<std::pair<double, double>> points;
  for (const ConvergenceRow& row : report.rows)
    if (row.exact > 0)
      points.emplace_back(static_cast<double>(row.length), log_integer(row.exact));
  if (points.size() >= 3) {
    Eigen::MatrixXd a(points.size(), 3);
    Eigen::VectorXd b(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
      a(static_cast<Eigen::Index>(i), 0) = 1.0;
      a(static_cast<Eigen::Index>(i), 1) = points[i].first;
      a(static_cast<Eigen::Index>(i), 2) = std::log(points[i].first);
      b[static_cast<Eigen::Index>(i)] = points[i].second;
    }
    Eigen::VectorXd fit = a.colPivHouseholderQr().solve(b);
    report.fitted_rate = fit[1];
    report.fitted_exponent = fit[2];
    report.fit_valid = true;
  }
  return report;
}

}  // namespace dircount
