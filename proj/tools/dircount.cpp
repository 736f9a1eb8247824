// Command-line front end. All numerics live in the library; this file only
// parses flags, routes to library calls, and renders reports as text, JSON,
// or CSV. JSON output is deterministic: fixed field order, floats printed
// with 17 significant digits, so equal configurations give equal bytes.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dircount/counting.hpp"
#include "dircount/errors.hpp"
#include "dircount/graph.hpp"
#include "dircount/growth.hpp"
#include "dircount/lattice.hpp"
#include "dircount/spectral.hpp"
#include "dircount/transfer.hpp"
#include "dircount/verify.hpp"

namespace {

using dircount::CountQuery;
using dircount::DirectedGraph;
using dircount::Int;
using dircount::LatticeFrame;
using dircount::UsageError;

const char kUsage[] =
    R"(dircount — directional word counts of a directed graph's path language

usage: dircount COMMAND --graph PATH [flags]

commands
  analyze   connectivity, period and phases, growth rate, maximizing
            direction, fluctuation dimensions, endpoint normalizer table
  psi       growth indicator for one direction (edge space, or label space
            on a labelled graph)
  count     exact and estimated word counts for an occurrence target;
            with --lengths, a convergence report along the target's ray
  verify    randomized property sweeps over the library's core identities

flags
  --graph PATH        graph document (JSON; required)
  --direction CSV     real direction, comma-separated, document edge order
  --target CSV        integer occurrence target, document edge order
                      (label order when its size matches a labelled
                      graph's alphabet)
  --from NAME         start vertex (name or index)
  --to NAME           end vertex (name or index)
  --length N          word length for a single count
  --lengths A:B[:S]   length window for a ray report; without S the
                      feasible progression inside [A, B] is auto-detected
  --format F          text | json | csv   (csv: count reports only)
  --tol X             optimizer tolerance for psi (default 1e-10)
  --seed N            seed for verify's random probes (default 42)
  --threads N         worker threads for path enumeration (default: cores)
  --force             count: run the exact sweep even if the screen says
                      no path can hit the target

environment
  DIRCOUNT_BUDGET_MB  memory cap for the exact sweep (default 512)

exit codes
  0 success (an exact count of zero is a success)
  1 usage error        2 graph validation error
  3 solver failure     4 budget exceeded
)";

// ---------------------------------------------------------------------------
// Formatting helpers.

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string json_number(double v) {
  return std::isfinite(v) ? fmt17(v) : "null";
}

// Tiny insertion-ordered JSON object builder.
class JsonObject {
 public:
  void raw(const std::string& key, const std::string& value) {
    body_ += first_ ? "" : ", ";
    first_ = false;
    body_ += "\"" + json_escape(key) + "\": " + value;
  }
  void str(const std::string& key, const std::string& value) {
    raw(key, "\"" + json_escape(value) + "\"");
  }
  void num(const std::string& key, double value) {
    raw(key, json_number(value));
  }
  void integer(const std::string& key, long long value) {
    raw(key, std::to_string(value));
  }
  void big(const std::string& key, const Int& value) {
    raw(key, value.get_str());
  }
  void boolean(const std::string& key, bool value) {
    raw(key, value ? "true" : "false");
  }
  std::string stringify() const { return "{" + body_ + "}"; }

 private:
  std::string body_;
  bool first_ = true;
};

std::string json_array_num(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out += (i ? ", " : "") + json_number(v[i]);
  return out + "]";
}

std::string json_array_big(const std::vector<Int>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i)
    out += (i ? ", " : "") + v[i].get_str();
  return out + "]";
}

std::string json_array_str(const std::vector<std::string>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i)
    out += (i ? ", " : "") + ("\"" + json_escape(v[i]) + "\"");
  return out + "]";
}

std::string json_array_int(const std::vector<int>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i)
    out += (i ? ", " : "") + std::to_string(v[i]);
  return out + "]";
}

std::string text_vector(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out += (i ? ", " : "") + fmt17(v[i]);
  return out + "]";
}

std::string text_ints(const std::vector<Int>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i)
    out += (i ? ", " : "") + v[i].get_str();
  return out + "]";
}

// CSV cell for a double; non-finite prints as nan so columns stay parseable.
std::string csv_num(double v) { return std::isfinite(v) ? fmt17(v) : "nan"; }

// ---------------------------------------------------------------------------
// Flag parsing.

struct Options {
  std::string command;
  std::string graph_path;
  std::vector<double> direction;
  bool has_direction = false;
  std::vector<long long> target;
  bool has_target = false;
  std::string from, to;
  long long length = 0;
  bool has_length = false;
  long long window_lo = 0, window_hi = 0, window_step = 0;
  bool has_window = false, has_step = false;
  std::string format = "text";
  double tol = 1e-10;
  unsigned long seed = 42;
  int threads = 0;
  bool force = false;
};

long long parse_integer(const std::string& text, const std::string& flag) {
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE)
    throw UsageError(flag + " expects an integer, got '" + text + "'");
  return v;
}

double parse_real(const std::string& text, const std::string& flag) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw UsageError(flag + " expects a number, got '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.push_back("");
  return parts;
}

Options parse_options(int argc, char** argv) {
  Options opt;
  if (argc < 2) throw UsageError("a command is required; see --help");
  std::string first = argv[1];
  if (first == "--help" || first == "-h") {
    std::fputs(kUsage, stdout);
    std::exit(0);
  }
  opt.command = first;
  if (opt.command != "analyze" && opt.command != "psi" &&
      opt.command != "count" && opt.command != "verify")
    throw UsageError("unknown command '" + opt.command +
                     "'; expected analyze, psi, count, or verify");

  auto next_value = [&](int& i, const std::string& flag,
                        const std::string& inline_value,
                        bool has_inline) -> std::string {
    if (has_inline) return inline_value;
    if (i + 1 >= argc) throw UsageError(flag + " needs a value");
    return argv[++i];
  };

  for (int i = 2; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--help" || arg == "-h") {
      std::fputs(kUsage, stdout);
      std::exit(0);
    }
    if (arg == "--force") {
      opt.force = true;
      continue;
    }
    std::string flag = arg, inline_value;
    bool has_inline = false;
    if (auto eq = arg.find('='); eq != std::string::npos) {
      flag = arg.substr(0, eq);
      inline_value = arg.substr(eq + 1);
      has_inline = true;
    }
    std::string value;
    if (flag == "--graph") {
      opt.graph_path = next_value(i, flag, inline_value, has_inline);
    } else if (flag == "--direction") {
      value = next_value(i, flag, inline_value, has_inline);
      opt.direction.clear();
      for (const std::string& part : split(value, ','))
        opt.direction.push_back(parse_real(part, flag));
      opt.has_direction = true;
    } else if (flag == "--target") {
      value = next_value(i, flag, inline_value, has_inline);
      opt.target.clear();
      for (const std::string& part : split(value, ','))
        opt.target.push_back(parse_integer(part, flag));
      opt.has_target = true;
    } else if (flag == "--from") {
      opt.from = next_value(i, flag, inline_value, has_inline);
    } else if (flag == "--to") {
      opt.to = next_value(i, flag, inline_value, has_inline);
    } else if (flag == "--length") {
      opt.length =
          parse_integer(next_value(i, flag, inline_value, has_inline), flag);
      opt.has_length = true;
    } else if (flag == "--lengths") {
      value = next_value(i, flag, inline_value, has_inline);
      std::vector<std::string> parts = split(value, ':');
      if (parts.size() != 2 && parts.size() != 3)
        throw UsageError("--lengths expects A:B or A:B:STEP, got '" + value +
                         "'");
      opt.window_lo = parse_integer(parts[0], flag);
      opt.window_hi = parse_integer(parts[1], flag);
      if (parts.size() == 3) {
        opt.window_step = parse_integer(parts[2], flag);
        if (opt.window_step < 1) throw UsageError("--lengths step must be >= 1");
        opt.has_step = true;
      }
      if (opt.window_lo < 0 || opt.window_hi < opt.window_lo)
        throw UsageError("--lengths window must satisfy 0 <= A <= B");
      opt.has_window = true;
    } else if (flag == "--format") {
      opt.format = next_value(i, flag, inline_value, has_inline);
      if (opt.format != "text" && opt.format != "json" && opt.format != "csv")
        throw UsageError("--format must be text, json, or csv");
    } else if (flag == "--tol") {
      opt.tol = parse_real(next_value(i, flag, inline_value, has_inline), flag);
      if (!(opt.tol > 0)) throw UsageError("--tol must be positive");
    } else if (flag == "--seed") {
      opt.seed = static_cast<unsigned long>(
          parse_integer(next_value(i, flag, inline_value, has_inline), flag));
    } else if (flag == "--threads") {
      long long t =
          parse_integer(next_value(i, flag, inline_value, has_inline), flag);
      if (t < 1) throw UsageError("--threads must be at least 1");
      opt.threads = static_cast<int>(t);
    } else {
      throw UsageError("unknown flag '" + flag + "'; see --help");
    }
  }
  if (opt.graph_path.empty()) throw UsageError("--graph is required");
  if (opt.threads == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    opt.threads = hw == 0 ? 1 : static_cast<int>(hw);
  }
  if (opt.format == "csv" && opt.command != "count")
    throw UsageError("--format csv is only available for count reports");
  return opt;
}

// ---------------------------------------------------------------------------
// Shared lookups.

int resolve_vertex(const DirectedGraph& g, const std::string& name,
                   const std::string& flag) {
  if (name.empty()) throw UsageError(flag + " is required for this command");
  int id = g.vertex_id(name);
  if (id >= 0) return id;
  bool digits = !name.empty();
  for (char c : name) digits = digits && c >= '0' && c <= '9';
  if (digits) {
    long long index = parse_integer(name, flag);
    if (index >= 0 && index < g.vertex_count()) return static_cast<int>(index);
  }
  std::string known;
  for (const std::string& v : g.vertex_names)
    known += (known.empty() ? "" : ", ") + v;
  throw UsageError(flag + ": unknown vertex '" + name + "' (vertices: " +
                   known + ")");
}

// A direction/target of label-alphabet size addresses the label space on a
// labelled graph; edge-space size addresses the edge space. Ties go to the
// label space (the two readings agree there up to letter order).
bool wants_label_space(const DirectedGraph& g, size_t size,
                       const std::string& flag) {
  if (g.labelled() && size == static_cast<size_t>(g.label_count()))
    return true;
  if (size == static_cast<size_t>(g.edge_count())) return false;
  std::string expect = std::to_string(g.edge_count()) + " (edge order)";
  if (g.labelled())
    expect += " or " + std::to_string(g.label_count()) + " (label order)";
  throw UsageError(flag + " has " + std::to_string(size) +
                   " coordinates; expected " + expect);
}

DirectedGraph load_graph(const std::string& path) {
  DirectedGraph g = dircount::parse_graph_file(path);
  dircount::require_connected(g);
  return g;
}

// ---------------------------------------------------------------------------
// analyze

int cmd_analyze(const Options& opt) {
  DirectedGraph g = load_graph(opt.graph_path);
  dircount::PeriodData period = dircount::compute_period(g);
  bool cyclic = dircount::is_cyclic(g);
  double delta = dircount::delta_g(g);
  Eigen::VectorXd xg = dircount::x_g(g);
  LatticeFrame frame = dircount::build_lattice_frame(g);
  int s = -1;
  if (g.labelled())
    s = dircount::label_fluctuation_lattice(g, frame).s;

  std::vector<std::vector<Int>> normalizer;
  for (int q = 0; q < g.vertex_count(); ++q)
    normalizer.push_back(dircount::offset(frame, q));

  if (opt.format == "json") {
    JsonObject out;
    out.str("command", "analyze");
    out.str("graph", opt.graph_path);
    out.integer("vertices", g.vertex_count());
    out.integer("edges", g.edge_count());
    out.raw("labels", g.labelled() ? std::to_string(g.label_count()) : "null");
    out.raw("vertex_names", json_array_str(g.vertex_names));
    out.raw("edge_names", json_array_str(g.edge_names));
    if (g.labelled()) out.raw("label_names", json_array_str(g.label_names));
    out.boolean("connected", true);
    out.integer("period", period.p);
    out.raw("phases", json_array_int(period.phase));
    out.boolean("cyclic", cyclic);
    out.num("delta", delta);
    out.raw("x_g", json_array_num(xg));
    out.integer("r", frame.r);
    out.raw("s", g.labelled() ? std::to_string(s) : "null");
    std::string table = "[";
    for (size_t q = 0; q < normalizer.size(); ++q)
      table += (q ? ", " : "") + json_array_big(normalizer[q]);
    out.raw("normalizer", table + "]");
    std::cout << out.stringify() << "\n";
    return 0;
  }

  std::cout << "graph        " << opt.graph_path << "\n";
  std::cout << "vertices     " << g.vertex_count() << "\n";
  std::cout << "edges        " << g.edge_count() << "\n";
  if (g.labelled()) std::cout << "labels       " << g.label_count() << "\n";
  std::cout << "connected    yes\n";
  std::cout << "period       " << period.p << "\n";
  std::cout << "cyclic       " << (cyclic ? "yes" : "no") << "\n";
  std::cout << "delta        " << fmt17(delta) << "\n";
  std::cout << "x_g          " << text_vector(xg) << "\n";
  std::cout << "r            " << frame.r << "\n";
  if (g.labelled()) std::cout << "s            " << s << "\n";
  for (int q = 0; q < g.vertex_count(); ++q)
    std::cout << "normalizer " << g.vertex_names[static_cast<size_t>(q)]
              << "  " << text_ints(normalizer[static_cast<size_t>(q)]) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// psi

int cmd_psi(const Options& opt) {
  if (!opt.has_direction)
    throw UsageError("psi needs --direction (comma-separated reals)");
  DirectedGraph g = load_graph(opt.graph_path);
  bool label_space = wants_label_space(g, opt.direction.size(), "--direction");
  Eigen::VectorXd x(static_cast<Eigen::Index>(opt.direction.size()));
  for (size_t i = 0; i < opt.direction.size(); ++i)
    x[static_cast<Eigen::Index>(i)] = opt.direction[i];

  double value = 0.0;
  bool finite = false, boundary = false, converged = false;
  int iterations = 0;
  double residual = 0.0;
  Eigen::VectorXd optimizer;
  if (label_space) {
    dircount::SoficGrowthProfile profile = dircount::psi_sofic(g, x, opt.tol);
    value = profile.psi;
    finite = profile.finite;
    boundary = profile.boundary;
    converged = profile.converged;
    iterations = profile.iterations;
    residual = profile.gradient_norm;
    optimizer = profile.f_star;
  } else {
    dircount::GrowthProfile profile = dircount::psi(g, x, opt.tol);
    value = profile.psi;
    finite = profile.finite;
    boundary = profile.boundary;
    converged = profile.converged;
    iterations = profile.iterations;
    residual = profile.gradient_norm;
    optimizer = profile.theta_star;
  }
  if (finite && !converged)
    throw dircount::SolverError(
        "growth optimization did not converge: residual " + fmt17(residual) +
        " after " + std::to_string(iterations) + " iterations");

  std::string certificate;
  if (!finite)
    certificate = iterations == 0
                      ? "rejected by the conservation screen: no occurrence "
                        "vector of any word points this way"
                      : "an unbounded improvement direction was certified "
                        "after " + std::to_string(iterations) + " iterations";

  if (opt.format == "json") {
    JsonObject out;
    out.str("command", "psi");
    out.str("graph", opt.graph_path);
    out.str("space", label_space ? "label" : "edge");
    out.raw("direction", json_array_num(x));
    out.raw("psi", finite ? json_number(value) : "\"-infinity\"");
    out.boolean("finite", finite);
    out.boolean("boundary", boundary);
    if (finite) {
      out.raw("theta_star", json_array_num(optimizer));
      out.num("stationarity_residual", residual);
      out.integer("iterations", iterations);
    } else {
      out.str("certificate", certificate);
    }
    std::cout << out.stringify() << "\n";
    return 0;
  }

  std::cout << "space        " << (label_space ? "label" : "edge") << "\n";
  std::cout << "direction    " << text_vector(x) << "\n";
  std::cout << "psi          " << (finite ? fmt17(value) : "-infinity")
            << "\n";
  if (finite) {
    std::cout << "boundary     " << (boundary ? "yes" : "no") << "\n";
    std::cout << "theta_star   " << text_vector(optimizer) << "\n";
    std::cout << "residual     " << fmt17(residual) << "\n";
    std::cout << "iterations   " << iterations << "\n";
  } else {
    std::cout << "certificate  " << certificate << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// count

std::vector<Int> to_big(const std::vector<long long>& v) {
  std::vector<Int> out;
  out.reserve(v.size());
  for (long long c : v) out.emplace_back(static_cast<long>(c));
  return out;
}

void emit_count_csv_header() {
  std::cout << "n,exact,predicted,ratio,psi,r,sigma\n";
}

void emit_count_csv_row(long long n, const Int& exact, double predicted,
                        double ratio, double psi, int r, double sigma) {
  std::cout << n << "," << exact.get_str() << "," << csv_num(predicted) << ","
            << csv_num(ratio) << "," << csv_num(psi) << "," << r << ","
            << csv_num(sigma) << "\n";
}

int count_single(const Options& opt, const DirectedGraph& g,
                 const LatticeFrame& frame, CountQuery query) {
  dircount::Feasibility screen = dircount::screen_query(g, frame, query);
  Int exact = dircount::count_exact(g, frame, query);
  dircount::Prediction pred = dircount::count_predicted(g, frame, query);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double ratio = (!pred.refused && exact > 0)
                     ? std::exp(dircount::log_integer(exact) - pred.log_value)
                     : nan;
  double predicted = pred.refused ? nan : pred.value;
  double psi_value = pred.refused ? nan : pred.psi_value;
  double sigma = pred.refused ? nan : pred.sigma;

  if (opt.format == "csv") {
    emit_count_csv_header();
    emit_count_csv_row(query.length, exact, predicted, ratio, psi_value,
                       pred.dimension, sigma);
    return 0;
  }
  if (opt.format == "json") {
    JsonObject out;
    out.str("command", "count");
    out.str("graph", opt.graph_path);
    out.str("space", query.sofic ? "label" : "edge");
    out.str("from", g.vertex_names[static_cast<size_t>(query.from)]);
    out.str("to", g.vertex_names[static_cast<size_t>(query.to)]);
    out.integer("length", query.length);
    out.raw("target", json_array_big(query.target));
    out.boolean("feasible", screen.feasible);
    out.raw("screen_reason",
            screen.feasible ? "null" : "\"" + json_escape(screen.reason) + "\"");
    out.boolean("forced", query.force);
    out.big("exact", exact);
    out.boolean("refused", pred.refused);
    out.raw("refusal_reason",
            pred.refused ? "\"" + json_escape(pred.reason) + "\"" : "null");
    out.num("predicted", predicted);
    out.num("ratio", ratio);
    out.num("psi", psi_value);
    out.raw("r", pred.refused ? "null" : std::to_string(pred.dimension));
    out.num("sigma", sigma);
    std::cout << out.stringify() << "\n";
    return 0;
  }

  std::cout << "from         " << g.vertex_names[static_cast<size_t>(query.from)]
            << "\n";
  std::cout << "to           " << g.vertex_names[static_cast<size_t>(query.to)]
            << "\n";
  std::cout << "length       " << query.length << "\n";
  std::cout << "target       " << text_ints(query.target) << "\n";
  std::cout << "feasible     "
            << (screen.feasible ? "yes" : "no (" + screen.reason + ")")
            << "\n";
  std::cout << "exact        " << exact.get_str() << "\n";
  if (pred.refused) {
    std::cout << "predicted    refused (" << pred.reason << ")\n";
  } else {
    std::cout << "predicted    " << fmt17(pred.value) << "\n";
    std::cout << "ratio        " << csv_num(ratio) << "\n";
    std::cout << "psi          " << fmt17(pred.psi_value) << "\n";
    std::cout << "r            " << pred.dimension << "\n";
    std::cout << "sigma        " << fmt17(pred.sigma) << "\n";
  }
  return 0;
}

int count_ray(const Options& opt, const DirectedGraph& g,
              const LatticeFrame& frame, CountQuery base) {
  std::vector<long long> lengths;
  if (opt.has_step) {
    for (long long n = opt.window_lo; n <= opt.window_hi; n += opt.window_step)
      lengths.push_back(n);
  } else {
    for (long long n :
         dircount::feasible_lengths(g, frame, base, opt.window_hi))
      if (n >= opt.window_lo) lengths.push_back(n);
    if (lengths.empty())
      throw UsageError(
          "no feasible lengths on this ray inside the requested window");
  }
  dircount::ConvergenceReport report =
      dircount::convergence_report(g, frame, base, lengths);

  if (opt.format == "csv") {
    emit_count_csv_header();
    for (const auto& row : report.rows) {
      double psi_here = report.psi_rate * static_cast<double>(row.length);
      emit_count_csv_row(row.length, row.exact, row.predicted, row.ratio,
                         psi_here, report.dimension, report.sigma);
    }
    return 0;
  }
  if (opt.format == "json") {
    JsonObject out;
    out.str("command", "count");
    out.str("graph", opt.graph_path);
    out.str("space", base.sofic ? "label" : "edge");
    out.str("from", g.vertex_names[static_cast<size_t>(base.from)]);
    out.str("to", g.vertex_names[static_cast<size_t>(base.to)]);
    out.raw("target", json_array_big(base.target));
    std::string rows = "[";
    for (size_t i = 0; i < report.rows.size(); ++i) {
      const auto& row = report.rows[i];
      JsonObject r;
      r.integer("n", row.length);
      r.big("exact", row.exact);
      r.num("predicted", row.predicted);
      r.num("ratio", row.ratio);
      rows += (i ? ", " : "") + r.stringify();
    }
    out.raw("rows", rows + "]");
    out.num("psi_rate", report.psi_rate);
    out.boolean("fit_valid", report.fit_valid);
    out.num("fitted_rate", report.fitted_rate);
    out.num("fitted_exponent", report.fitted_exponent);
    out.integer("r", report.dimension);
    out.num("sigma", report.sigma);
    std::cout << out.stringify() << "\n";
    return 0;
  }

  std::cout << "ray report   " << g.vertex_names[static_cast<size_t>(base.from)]
            << " -> " << g.vertex_names[static_cast<size_t>(base.to)]
            << ", target " << text_ints(base.target) << "\n";
  std::cout << "n  exact  predicted  ratio\n";
  for (const auto& row : report.rows)
    std::cout << row.length << "  " << row.exact.get_str() << "  "
              << csv_num(row.predicted) << "  " << csv_num(row.ratio) << "\n";
  std::cout << "psi_rate         " << csv_num(report.psi_rate) << "\n";
  std::cout << "fitted_rate      " << csv_num(report.fitted_rate) << "\n";
  std::cout << "fitted_exponent  " << csv_num(report.fitted_exponent) << "\n";
  std::cout << "r                " << report.dimension << "\n";
  std::cout << "sigma            " << csv_num(report.sigma) << "\n";
  return 0;
}

int cmd_count(const Options& opt) {
  if (!opt.has_target)
    throw UsageError("count needs --target (comma-separated integers)");
  if (!opt.has_length && !opt.has_window)
    throw UsageError("count needs --length N or --lengths A:B[:STEP]");
  if (opt.has_length && opt.has_window)
    throw UsageError("--length and --lengths are mutually exclusive");
  DirectedGraph g = load_graph(opt.graph_path);
  LatticeFrame frame = dircount::build_lattice_frame(g);

  CountQuery query;
  query.sofic = wants_label_space(g, opt.target.size(), "--target");
  query.from = resolve_vertex(g, opt.from, "--from");
  query.to = resolve_vertex(g, opt.to, "--to");
  query.target = to_big(opt.target);
  query.force = opt.force;
  if (opt.has_length) {
    query.length = opt.length;
    return count_single(opt, g, frame, query);
  }
  Int sum = 0;
  for (const Int& c : query.target) sum += c;
  query.length = sum.get_si();
  return count_ray(opt, g, frame, query);
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const Options& opt) {
  DirectedGraph g = load_graph(opt.graph_path);
  dircount::VerifyReport report =
      dircount::run_property_sweeps(g, opt.seed, opt.threads);

  if (opt.format == "json") {
    JsonObject out;
    out.str("command", "verify");
    out.str("graph", opt.graph_path);
    out.integer("seed", static_cast<long long>(opt.seed));
    std::string suites = "[";
    for (size_t i = 0; i < report.results.size(); ++i) {
      const auto& result = report.results[i];
      JsonObject r;
      r.str("name", result.name);
      r.boolean("pass", result.pass);
      r.integer("checks", result.checks);
      r.str("detail", result.detail);
      suites += (i ? ", " : "") + r.stringify();
    }
    out.raw("suites", suites + "]");
    out.integer("total_checks", report.total_checks);
    out.boolean("all_pass", report.all_pass);
    std::cout << out.stringify() << "\n";
  } else {
    for (const auto& result : report.results) {
      std::string status = result.pass ? "pass" : "FAIL";
      if (result.checks == 0 && result.pass) status = "skip";
      std::printf("%-22s %-5s %6d checks", result.name.c_str(),
                  status.c_str(), result.checks);
      if (!result.detail.empty()) std::printf("  %s", result.detail.c_str());
      std::printf("\n");
    }
    std::printf("total: %d checks, %s\n", report.total_checks,
                report.all_pass ? "all suites pass" : "FAILURES above");
  }
  return report.all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    Options opt = parse_options(argc, argv);
    if (opt.command == "analyze") return cmd_analyze(opt);
    if (opt.command == "psi") return cmd_psi(opt);
    if (opt.command == "count") return cmd_count(opt);
    return cmd_verify(opt);
  } catch (const dircount::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return static_cast<int>(dircount::ExitCode::solver);
  }
}
