// Integer-lattice layer over the edge space: the sublattices of Z^A cut out
// by the circulation and mean-zero constraints, the per-vertex straightening
// offsets that put all path occurrence vectors over a common lattice coset,
// and the Gaussian normalization factors measured against those lattices.

#ifndef DIRCOUNT_LATTICE_HPP
#define DIRCOUNT_LATTICE_HPP

#include <Eigen/Dense>
#include <vector>

#include "dircount/exact.hpp"
#include "dircount/graph.hpp"

namespace dircount {

// Exact integer data attached to the edge lattice Z^A of a connected graph.
//
//  - coboundary_lattice: integer basis of the integer potential-difference
//    vectors (value at the goal minus value at the source of each edge),
//    |A| x (|Q|-1) for a connected graph.
//  - fluctuation_lattice: integer basis of the mean-zero circulations,
//    |A| x r with r = |A| - |Q|; occurrence vectors of same-endpoint,
//    same-length paths differ exactly by this lattice.
//  - wrap_vector: the integer vector equal to -1 on edges that wrap the
//    phase back to zero and 0 elsewhere; together with the coboundary
//    lattice it spans the integer part of the subspace on which every
//    occurrence vector is determined by endpoints and length alone.
//  - section: |Q| x |A| integer matrix mapping edge vectors to vertex
//    vectors, built so that applying it to any integer vector gives an
//    integer vector, it inverts the potential-difference map (pinned to
//    zero at vertex 0), and it annihilates wrap_vector. Row q is the
//    straightening offset of vertex q.
//  - period: phase data of the graph; the row sums of the section equal the
//    phases.
struct LatticeFrame {
  IMat coboundary_lattice;
  IMat fluctuation_lattice;
  std::vector<Int> wrap_vector;
  IMat section;
  PeriodData period;
  int r = 0;
};

LatticeFrame build_lattice_frame(const DirectedGraph& g);

// Straightening offset of vertex q (row q of the section). For every path w
// from q to q', the shifted occurrence vector P(w) - offset(q') + offset(q)
// is a circulation whose coordinate sum is the length plus phase(q) minus
// phase(q'); in particular it is independent of the path's potential part.
std::vector<Int> offset(const LatticeFrame& frame, int q);

// offset(q_to) - offset(q_from), exactly and as doubles.
std::vector<Int> offset_shift(const LatticeFrame& frame, int q_from, int q_to);
Eigen::VectorXd offset_shift_double(const LatticeFrame& frame, int q_from,
                                    int q_to);

// Square root of the determinant of the quadratic form 'form' measured
// against the lattice with integer basis 'basis' (columns), normalized by
// the dual lattice: sqrt(det(B^T form B)) / det(B^T B). An empty basis
// (rank 0) gives 1. Throws SolverError when the Gram determinant is not
// positive. Unimodular basis changes leave the value unchanged.
double variance_factor(const Eigen::MatrixXd& form, const IMat& basis);

// Image of the fluctuation lattice in label space: the lattice on which
// label-count fluctuations of same-endpoint, same-length paths live. For an
// unlabelled graph the map is the identity and the image is the fluctuation
// lattice itself.
struct LabelLattice {
  IMat basis;  // |B| x s integer basis of the image lattice
  int s = 0;   // its rank
};

LabelLattice label_fluctuation_lattice(const DirectedGraph& g,
                                       const LatticeFrame& frame);

// Pushforward of an edge-space quadratic form to label space: Pi^T form Pi,
// where Pi is the 0/1 edge-to-label incidence.
Eigen::MatrixXd label_form(const DirectedGraph& g,
                           const Eigen::MatrixXd& form);

}  // namespace dircount

#endif  // DIRCOUNT_LATTICE_HPP
