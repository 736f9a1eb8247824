#include "dircount/lattice.hpp"

#include <cmath>
#include <queue>

#include "dircount/errors.hpp"
#include "dircount/growth.hpp"

namespace dircount {

namespace {

// Integer incidence transpose: row q, column a holds +1 if edge a ends at q,
// -1 if it starts at q (0 for a loop at q).
IMat incidence_rows(const DirectedGraph& g) {
  IMat m(g.vertex_count(), g.edge_count());
  for (int a = 0; a < g.edge_count(); ++a) {
    m.at(g.goal[a], a) += 1;
    m.at(g.source[a], a) -= 1;
  }
  return m;
}

// Exact potential of an integer potential-difference vector, pinned to zero
// at vertex 0: xi(a) = potential(goal a) - potential(source a) on every edge.
std::vector<Int> exact_potential(const DirectedGraph& g,
                                 const std::vector<Int>& xi) {
  std::vector<Int> potential(g.vertex_count());
  std::vector<bool> seen(g.vertex_count(), false);
  std::queue<int> queue;
  seen[0] = true;
  queue.push(0);
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop();
    for (int a = 0; a < g.edge_count(); ++a) {
      if (g.source[a] == q && !seen[g.goal[a]]) {
        potential[g.goal[a]] = potential[q] + xi[a];
        seen[g.goal[a]] = true;
        queue.push(g.goal[a]);
      }
      if (g.goal[a] == q && !seen[g.source[a]]) {
        potential[g.source[a]] = potential[q] - xi[a];
        seen[g.source[a]] = true;
        queue.push(g.source[a]);
      }
    }
  }
  for (int a = 0; a < g.edge_count(); ++a)
    if (potential[g.goal[a]] - potential[g.source[a]] != xi[a])
      throw SolverError(
          "vector claimed to be a potential difference is not one");
  return potential;
}

}  // namespace

LatticeFrame build_lattice_frame(const DirectedGraph& g) {
  require_connected(g);
  const int na = g.edge_count();
  const int nq = g.vertex_count();

  LatticeFrame frame;
  frame.period = compute_period(g);

  IMat rows = incidence_rows(g);

  // Integer circulations, then the integer potential-difference vectors as
  // the vectors orthogonal to every circulation (both saturated).
  IMat circulations = integer_kernel(rows);
  frame.coboundary_lattice = integer_kernel(transpose(circulations));

  // Mean-zero circulations: append the all-ones row to the conservation
  // constraints.
  IMat stacked(nq + 1, na);
  for (int q = 0; q < nq; ++q)
    for (int a = 0; a < na; ++a) stacked.at(q, a) = rows.at(q, a);
  for (int a = 0; a < na; ++a) stacked.at(nq, a) = 1;
  frame.fluctuation_lattice = integer_kernel(stacked);
  frame.r = frame.fluctuation_lattice.cols;
  if (frame.r != na - nq)
    throw SolverError("mean-zero circulation lattice has unexpected rank");

  // The wrap vector: each edge advances the phase by one; the entry is -1
  // exactly where the phase folds back to zero.
  const int p = frame.period.p;
  frame.wrap_vector.assign(na, Int(0));
  for (int a = 0; a < na; ++a) {
    Int numerator = frame.period.phase[g.goal[a]] -
                    frame.period.phase[g.source[a]] - 1;
    if (numerator % p != 0)
      throw SolverError("phase does not advance by one along an edge");
    frame.wrap_vector[a] = numerator / p;
  }

  // Section construction: fix its value on a basis of the integer lattice.
  // The first basis column is the wrap vector (sent to zero), the next
  // columns are the coboundary generators (sent to their pinned potentials),
  // and the completion columns are sent to zero as well.
  const int k = frame.coboundary_lattice.cols;
  if (k != nq - 1)
    throw SolverError("potential-difference lattice has unexpected rank");
  IMat forced(na, 1 + k);
  for (int a = 0; a < na; ++a) forced.at(a, 0) = frame.wrap_vector[a];
  for (int j = 0; j < k; ++j)
    for (int a = 0; a < na; ++a)
      forced.at(a, 1 + j) = frame.coboundary_lattice.at(a, j);
  IMat completed = complete_to_unimodular(forced);

  IMat images(nq, na);  // images of the basis columns, in basis order
  for (int j = 0; j < k; ++j) {
    std::vector<Int> xi(na);
    for (int a = 0; a < na; ++a) xi[a] = frame.coboundary_lattice.at(a, j);
    std::vector<Int> potential = exact_potential(g, xi);
    for (int q = 0; q < nq; ++q) images.at(q, 1 + j) = potential[q];
  }

  std::optional<IMat> inverse =
      to_integer(rational_inverse(rational_from(completed)));
  if (!inverse)
    throw SolverError("integer basis completion is not unimodular");
  frame.section = multiply(images, *inverse);

  // Self-check: the section sends the all-ones vector to the phases.
  for (int q = 0; q < nq; ++q) {
    Int sum = 0;
    for (int a = 0; a < na; ++a) sum += frame.section.at(q, a);
    if (sum != frame.period.phase[q])
      throw SolverError("section row sums do not reproduce the phases");
  }
  return frame;
}

std::vector<Int> offset(const LatticeFrame& frame, int q) {
  if (q < 0 || q >= frame.section.rows)
    throw UsageError("vertex index out of range");
  std::vector<Int> row(frame.section.cols);
  for (int a = 0; a < frame.section.cols; ++a) row[a] = frame.section.at(q, a);
  return row;
}

std::vector<Int> offset_shift(const LatticeFrame& frame, int q_from,
                              int q_to) {
  std::vector<Int> from = offset(frame, q_from);
  std::vector<Int> to = offset(frame, q_to);
  for (size_t a = 0; a < to.size(); ++a) to[a] -= from[a];
  return to;
}

Eigen::VectorXd offset_shift_double(const LatticeFrame& frame, int q_from,
                                    int q_to) {
  std::vector<Int> shift = offset_shift(frame, q_from, q_to);
  Eigen::VectorXd out(static_cast<int>(shift.size()));
  for (size_t a = 0; a < shift.size(); ++a)
    out[static_cast<int>(a)] = shift[a].get_d();
  return out;
}

double variance_factor(const Eigen::MatrixXd& form, const IMat& basis) {
  if (basis.cols == 0) return 1.0;
  if (form.rows() != basis.rows || form.cols() != basis.rows)
    throw UsageError("quadratic form size does not match the lattice basis");
  Eigen::MatrixXd b(basis.rows, basis.cols);
  for (int i = 0; i < basis.rows; ++i)
    for (int j = 0; j < basis.cols; ++j) b(i, j) = basis.at(i, j).get_d();
  double gram = (b.transpose() * form * b).determinant();
  double covolume = (b.transpose() * b).determinant();
  if (!(gram > 0.0) || !(covolume > 0.0))
    throw SolverError("quadratic form is not positive on the lattice");
  return std::sqrt(gram) / covolume;
}

LabelLattice label_fluctuation_lattice(const DirectedGraph& g,
                                       const LatticeFrame& frame) {
  const int nb = g.labelled() ? g.label_count() : g.edge_count();
  IMat pushforward(nb, g.edge_count());
  for (int a = 0; a < g.edge_count(); ++a)
    pushforward.at(g.labelled() ? g.label[a] : a, a) = 1;
  IMat image = multiply(pushforward, frame.fluctuation_lattice);

  ColumnEchelon echelon = column_echelon(image);
  LabelLattice out;
  out.s = echelon.rank;
  out.basis = IMat(nb, echelon.rank);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < echelon.rank; ++j)
      out.basis.at(i, j) = echelon.echelon.at(i, j);
  return out;
}

Eigen::MatrixXd label_form(const DirectedGraph& g,
                           const Eigen::MatrixXd& form) {
  Eigen::MatrixXd pi = label_incidence(g);
  if (form.rows() != pi.rows() || form.cols() != pi.rows())
    throw UsageError("quadratic form size does not match the edge count");
  return pi.transpose() * form * pi;
}

}  // namespace dircount
