#include "dircount/growth.hpp"

#include <cmath>
#include <random>

#include "dircount/errors.hpp"
#include "dircount/spectral.hpp"
#include "dircount/transfer.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace dircount;

namespace {

std::string fixture(const std::string& name) {
  return std::string(DIRCOUNT_FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("growth region membership agrees with the closed-form inequality") {
  DirectedGraph g = parse_graph_file(fixture("fibonacci.json"));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  int tested = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Eigen::VectorXd theta(3);
    theta << dist(rng), dist(rng), dist(rng);
    double margin =
        std::exp(-theta[0]) + std::exp(-theta[1] - theta[2]) - 1.0;
    if (std::abs(margin) <= 1e-9) continue;  // undecidable band
    ++tested;
    CHECK(omega_contains(g, theta) == (margin <= 0.0));
  }
  CHECK(tested > 250);
}

TEST_CASE("growth exponents of the reference graphs") {
  CHECK(delta_g(parse_graph_file(fixture("fibonacci.json"))) ==
        doctest::Approx(oracle::golden_growth_rate()).epsilon(1e-12));
  for (int k : {2, 3, 4})
    CHECK(delta_g(parse_graph_file(
              fixture("full_shift_" + std::to_string(k) + ".json"))) ==
          doctest::Approx(std::log(double(k))).epsilon(1e-12));
  CHECK(delta_g(parse_graph_file(fixture("cycle3.json"))) ==
        doctest::Approx(0.0));
  CHECK(delta_g(parse_graph_file(fixture("bipartite.json"))) ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("growth indicator matches the two-vertex closed form") {
  DirectedGraph g = parse_graph_file(fixture("fibonacci.json"));
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> dist(0.0, 10.0);

  SUBCASE("interior directions") {
    for (int trial = 0; trial < 50; ++trial) {
      double x1 = dist(rng), x2 = dist(rng);
      Eigen::VectorXd x(3);
      x << x1, x2, x2;
      GrowthProfile profile = psi(g, x);
      double expected = oracle::fibonacci_psi(x1, x2, x2);
      REQUIRE(profile.finite);
      CHECK(profile.converged);
      CHECK(profile.psi ==
            doctest::Approx(expected).epsilon(1e-8).scale(1.0));
    }
  }
  SUBCASE("boundary directions with vanishing coordinates") {
    Eigen::VectorXd x(3);
    x << 0.0, 3.0, 3.0;
    GrowthProfile profile = psi(g, x);
    REQUIRE(profile.finite);
    CHECK(profile.boundary);
    CHECK(profile.psi == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));

    x << 2.0, 0.0, 0.0;
    profile = psi(g, x);
    REQUIRE(profile.finite);
    CHECK(profile.boundary);
    CHECK(profile.psi == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  }
  SUBCASE("directions violating the circulation constraint") {
    for (int trial = 0; trial < 50; ++trial) {
      double x1 = dist(rng), x2 = dist(rng), x3 = dist(rng);
      if (std::abs(x2 - x3) < 1e-3) continue;
      Eigen::VectorXd x(3);
      x << x1, x2, x3;
      GrowthProfile profile = psi(g, x);
      CHECK(!profile.finite);
      CHECK(profile.psi == -std::numeric_limits<double>::infinity());
    }
  }
  SUBCASE("negative coordinates") {
    Eigen::VectorXd x(3);
    x << 1.0, -0.5, -0.5;
    CHECK(!psi(g, x).finite);
  }
  SUBCASE("zero direction") {
    GrowthProfile profile = psi(g, Eigen::VectorXd::Zero(3));
    CHECK(profile.finite);
    CHECK(profile.psi == 0.0);
  }
}

TEST_CASE("growth indicator of free shifts is the entropy form") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(0.0, 5.0);
  for (int k : {2, 3, 4}) {
    CAPTURE(k);
    DirectedGraph g =
        parse_graph_file(fixture("full_shift_" + std::to_string(k) + ".json"));
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> coords(k);
      for (double& c : coords) c = dist(rng);
      if (trial % 5 == 0) coords[0] = 0.0;  // exercise the boundary
      Eigen::VectorXd x =
          Eigen::Map<const Eigen::VectorXd>(coords.data(), k);
      GrowthProfile profile = psi(g, x);
      REQUIRE(profile.finite);
      CHECK(profile.psi == doctest::Approx(oracle::free_shift_psi(coords))
                               .epsilon(1e-8)
                               .scale(1.0));
    }
  }
}

TEST_CASE("two-phase graph: paired coordinates give the entropy form") {
  DirectedGraph g = parse_graph_file(fixture("bipartite.json"));
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> dist(0.1, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    double a = dist(rng), b = dist(rng);
    Eigen::VectorXd x(4);
    x << a, b, a, b;
    GrowthProfile profile = psi(g, x);
    REQUIRE(profile.finite);
    CHECK(profile.psi ==
          doctest::Approx(oracle::free_shift_psi({a, b})).epsilon(1e-8));
  }
  Eigen::VectorXd bad(4);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK(!psi(g, bad).finite);
}

TEST_CASE("normalized minimizer certifies the value") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> dist(0.0, 4.0);
  for (const char* name : {"fibonacci.json", "full_shift_3.json"}) {
    CAPTURE(name);
    DirectedGraph g = parse_graph_file(fixture(name));
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd x(g.edge_count());
      if (g.edge_count() == 3 && g.vertex_count() == 2) {
        double x1 = dist(rng), x2 = dist(rng);
        x << x1, x2, x2;
      } else {
        for (int a = 0; a < g.edge_count(); ++a) x[a] = dist(rng);
      }
      GrowthProfile profile = psi(g, x);
      REQUIRE(profile.finite);
      CHECK(perron_data(g, profile.theta_star).lambda ==
            doctest::Approx(1.0).epsilon(1e-10));
      CHECK(profile.theta_star.dot(x) ==
            doctest::Approx(profile.psi).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("dual inequality: every weight gives an upper bound") {
  DirectedGraph g = parse_graph_file(fixture("twostate_labelled.json"));
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> xdist(0.0, 3.0);
  std::uniform_real_distribution<double> tdist(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    // Random nonnegative circulation: mix the four primitive cycles.
    double c1 = xdist(rng), c2 = xdist(rng), c3 = xdist(rng), c4 = xdist(rng);
    Eigen::VectorXd x(5);
    // cycles: a1; a2; a3a4; a3a5.
    x << c1, c2, c3 + c4, c3, c4;
    GrowthProfile profile = psi(g, x);
    REQUIRE(profile.finite);
    Eigen::VectorXd theta(5);
    for (int a = 0; a < 5; ++a) theta[a] = tdist(rng);
    double upper = theta.dot(x) +
                   x.sum() * std::log(perron_data(g, theta).lambda);
    CHECK(profile.psi <= upper + 1e-8 * (1.0 + std::abs(upper)));
  }
}

TEST_CASE("homogeneity of the growth indicator") {
  DirectedGraph g = parse_graph_file(fixture("twostate_labelled.json"));
  Eigen::VectorXd x(5);
  x << 1.5, 0.7, 1.2, 0.9, 0.3;
  double base = psi(g, x).psi;
  for (double t : {0.5, 2.0, 7.0}) {
    CHECK(psi(g, t * x).psi == doctest::Approx(t * base).epsilon(1e-9));
  }
}

TEST_CASE("balanced direction attains the growth exponent") {
  for (const char* name :
       {"fibonacci.json", "bipartite.json", "twostate_labelled.json"}) {
    CAPTURE(name);
    DirectedGraph g = parse_graph_file(fixture(name));
    Eigen::VectorXd balanced = x_g(g);
    CHECK(balanced.sum() == doctest::Approx(1.0).epsilon(1e-12));
    GrowthProfile profile = psi(g, balanced);
    REQUIRE(profile.finite);
    CHECK(profile.psi == doctest::Approx(delta_g(g)).epsilon(1e-10));
  }
  DirectedGraph fib = parse_graph_file(fixture("fibonacci.json"));
  Eigen::VectorXd expected = Eigen::Map<const Eigen::VectorXd>(
      oracle::fibonacci_growth_direction().data(), 3);
  CHECK((x_g(fib) - expected).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("label-space growth indicator of the labelled two-vertex graph") {
  DirectedGraph g = parse_graph_file(fixture("fibonacci_labelled.json"));
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> dist(0.0, 8.0);

  SUBCASE("closed form on the feasible cone") {
    for (int trial = 0; trial < 40; ++trial) {
      double y2 = dist(rng);
      double y1 = y2 + dist(rng);
      SoficGrowthProfile profile = psi_sofic(g, Eigen::Vector2d(y1, y2));
      REQUIRE(profile.finite);
      CHECK(profile.psi == doctest::Approx(oracle::fibonacci_label_psi(y1, y2))
                               .epsilon(1e-8)
                               .scale(1.0));
      // The attained direction lies in the fiber over y and realizes psi_A.
      Eigen::VectorXd ax = profile.attained_x;
      REQUIRE(ax.size() == 3);
      CHECK(ax.minCoeff() > -1e-10);
      CHECK(ax[0] + ax[2] == doctest::Approx(y1).epsilon(1e-7));
      CHECK(ax[1] == doctest::Approx(y2).epsilon(1e-7));
      GrowthProfile inner = psi(g, ax.cwiseMax(0.0));
      REQUIRE(inner.finite);
      CHECK(inner.psi == doctest::Approx(profile.psi).epsilon(1e-7).scale(1.0));
    }
  }
  SUBCASE("outside the cone") {
    CHECK(!psi_sofic(g, Eigen::Vector2d(1.0, 2.0)).finite);
    CHECK(!psi_sofic(g, Eigen::Vector2d(-1.0, 0.5)).finite);
  }
  SUBCASE("zero direction") {
    SoficGrowthProfile profile = psi_sofic(g, Eigen::Vector2d(0.0, 0.0));
    CHECK(profile.finite);
    CHECK(profile.psi == 0.0);
  }
}

TEST_CASE("label-space growth indicator with a forced letter balance") {
  DirectedGraph g = parse_graph_file(fixture("bipartite_labelled.json"));
  SUBCASE("finite only when outgoing letters match the returns") {
    SoficGrowthProfile good = psi_sofic(g, Eigen::Vector3d(3.0, 2.0, 1.0));
    REQUIRE(good.finite);
    CHECK(good.psi ==
          doctest::Approx(oracle::free_shift_psi({2.0, 1.0})).epsilon(1e-8));
    CHECK(!psi_sofic(g, Eigen::Vector3d(2.0, 2.0, 1.0)).finite);
    CHECK(!psi_sofic(g, Eigen::Vector3d(4.0, 2.0, 1.0)).finite);
  }
}

TEST_CASE("unlabelled graphs make the label indicator collapse to psi") {
  DirectedGraph g = parse_graph_file(fixture("fibonacci.json"));
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> dist(0.2, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    double x1 = dist(rng), x2 = dist(rng);
    Eigen::VectorXd x(3);
    x << x1, x2, x2;
    CHECK(psi_sofic(g, x).psi ==
          doctest::Approx(psi(g, x).psi).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("richer labelled graph: fiber bounds and attained direction") {
  DirectedGraph g = parse_graph_file(fixture("twostate_labelled.json"));
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> dist(0, 6);
  Eigen::MatrixXd pi = label_incidence(g);
  int checked = 0;
  for (int trial = 0; trial < 60 && checked < 20; ++trial) {
    double y1 = dist(rng), y2 = dist(rng), y3 = dist(rng);
    if (y3 > y1 + y2 || y1 + y2 + y3 == 0) continue;
    Eigen::Vector3d y(y1, y2, y3);
    SoficGrowthProfile profile = psi_sofic(g, y);
    REQUIRE(profile.finite);
    ++checked;
    CHECK((pi.transpose() * profile.attained_x - y).lpNorm<Eigen::Infinity>() <
          1e-6 * (1.0 + y.lpNorm<Eigen::Infinity>()));
    // psi on integer fiber points never exceeds the label-space value.
    for (int x4 = 0; x4 <= static_cast<int>(y3); ++x4) {
      double x5 = y3 - x4;
      double x1 = y1 - x4, x2 = y2 - x5;
      if (x1 < 0 || x2 < 0) continue;
      Eigen::VectorXd x(5);
      x << x1, x2, y3, double(x4), x5;
      GrowthProfile inner = psi(g, x);
      if (!inner.finite) continue;
      CHECK(inner.psi <= profile.psi + 1e-7 * (1.0 + std::abs(profile.psi)));
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("growth argument validation") {
  DirectedGraph g = parse_graph_file(fixture("fibonacci.json"));
  CHECK_THROWS_AS(psi(g, Eigen::VectorXd::Zero(2)), UsageError);
  CHECK_THROWS_AS(psi_sofic(g, Eigen::VectorXd::Zero(5)), UsageError);
  DirectedGraph bad = parse_graph(
      R"({"vertices":["q1","q2"],
          "edges":[{"id":"a1","from":"q1","to":"q2"},
                   {"id":"a2","from":"q2","to":"q2"}]})");
  CHECK_THROWS_AS(psi(bad, Eigen::VectorXd::Zero(2)), GraphError);
}
