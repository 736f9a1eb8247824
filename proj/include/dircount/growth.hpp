// Directional growth theory: the growth region Omega, the growth exponent,
// the growth indicator psi (a concave, 1-homogeneous function of a direction
// in edge space), its sofic analogue on label space, and the balanced
// direction realizing the global exponent.

#ifndef DIRCOUNT_GROWTH_HPP
#define DIRCOUNT_GROWTH_HPP

#include <Eigen/Dense>

#include "dircount/graph.hpp"

namespace dircount {

// Whether lambda(theta) <= 1, i.e. the weighted language stops growing.
bool omega_contains(const DirectedGraph& g, const Eigen::VectorXd& theta);

// Global growth exponent log lambda(0).
double delta_g(const DirectedGraph& g);

// psi(x) = inf_theta [ <theta, x> + <1, x> log lambda(theta) ].
//
// finite == false means psi = -infinity (x has a negative coordinate, fails
// the circulation constraint, or lies outside the cone of nonnegative
// circulations). boundary == true means the minimizing weights run to
// infinity on the edges where x vanishes; the reported value is the limit.
// theta_star is renormalized so that lambda(theta_star) = 1, which leaves
// the value unchanged and makes psi(x) = <theta_star, x>.
struct GrowthProfile {
  double psi = 0.0;
  Eigen::VectorXd theta_star;
  bool finite = false;
  bool boundary = false;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

GrowthProfile psi(const DirectedGraph& g, const Eigen::VectorXd& x,
                  double tol = 1e-10, int max_iterations = 200);

// The maximizer of psi on the simplex <1, x> = 1 (the letter frequencies of
// a typical long word); psi(x_g) equals the growth exponent.
Eigen::VectorXd x_g(const DirectedGraph& g);

// Sofic analogue on label space: psi_A(y) = inf over label weight vectors f
// of <f, y> + <1, y> log lambda(f composed with the labelling). attained_x
// is the edge direction realizing the optimum: it is nonnegative, projects
// onto y, and has psi(attained_x) = psi_A(y). Unlabelled graphs are treated
// with the identity labelling, making this a superset of psi.
struct SoficGrowthProfile {
  double psi = 0.0;
  Eigen::VectorXd f_star;
  Eigen::VectorXd attained_x;
  bool finite = false;
  bool boundary = false;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

SoficGrowthProfile psi_sofic(const DirectedGraph& g, const Eigen::VectorXd& y,
                             double tol = 1e-10, int max_iterations = 200);

// |A| x |B| 0/1 matrix with a one at (a, label(a)); identity when the graph
// carries no labelling.
Eigen::MatrixXd label_incidence(const DirectedGraph& g);

}  // namespace dircount

#endif  // DIRCOUNT_GROWTH_HPP
