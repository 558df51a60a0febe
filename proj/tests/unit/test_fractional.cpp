#include "dnflow/errors.hpp"
#include "dnflow/fractional.hpp"
#include "dnflow/operators.hpp"
#include "dnflow/oracle.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace dnflow;

TEST_SUITE("fractional") {
  TEST_CASE("3 x 3 table by hand, s = 1/2, p = 2") {
    // h = 1/4, w_ij = h^2 / |x_i - x_j|^2: neighbours 1, distance 1/2 gives 1/4.
    const auto k = build_kernel(Domain::interval(3), 0.5, 2.0);
    const double table[3][3] = {{0.0, 1.0, 0.25}, {1.0, 0.0, 1.0}, {0.25, 1.0, 0.0}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(k.weight(i, j) == doctest::Approx(table[i][j]).epsilon(1e-15));
    // kappa(x) = (x^-1 + (1 - x)^-1) / 1
    CHECK(k.exterior(0) == doctest::Approx(4.0 + 4.0 / 3.0));
    CHECK(k.exterior(1) == doctest::Approx(4.0));
  }

  TEST_CASE("midpoint tail") {
    for (double s : {0.2, 0.5, 0.75}) {
      for (double p : {1.5, 2.0, 3.0}) {
        const auto k = build_kernel(Domain::interval(9), s, p);
        CHECK(k.exterior(4) == doctest::Approx(2.0 * std::pow(0.5, -p * s) / (p * s)).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("refining the grid rescales the weights by the formula") {
    const double s = 0.3, p = 2.5;
    const auto coarse = build_kernel(Domain::interval(9), s, p);   // h = 1/10
    const auto fine = build_kernel(Domain::interval(19), s, p);    // h = 1/20
    // Same physical pair (x = 0.1, 0.3): h^2 shrinks by 4, the distance is unchanged.
    CHECK(fine.weight(1, 5) == doctest::Approx(coarse.weight(0, 2) / 4.0).epsilon(1e-14));
  }

  TEST_CASE("unit spike energy") {
    const double s = 0.4;
    const auto d = Domain::interval(15);
    const auto k = build_kernel(d, s, 2.0);
    const EnergyOperator op(d, BoundaryRegime::fractional(s), 2.0);
    const int i = 6;
    Field u = Field::Zero(15);
    u[i] = 1.0;
    double pairs = 0.0;
    const double h = d.h();
    for (int j = 0; j < 15; ++j)
      if (j != i) pairs += h * h / std::pow(std::abs(d.coordinates()[i][0] - d.coordinates()[j][0]), 1.0 + 2.0 * s);
    const double expected = 0.5 * (2.0 * pairs + 2.0 * h * k.exterior(i));
    CHECK(op.energy(u, 0.0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(op.energy(Field::Zero(15), 1e-6) == 0.0);
  }

  TEST_CASE("p = 2 energy equals the matrix form") {
    gen::Rng rng(3);
    for (double s : {0.25, 0.5, 0.8}) {
      const auto d = Domain::interval(40);
      const EnergyOperator op(d, BoundaryRegime::fractional(s), 2.0);
      const auto m = assemble_linear_operator(d, BoundaryRegime::fractional(s));
      for (int trial = 0; trial < 5; ++trial) {
        const Field u = rng.field(40);
        const double quad = 0.5 * u.dot(m * u);
        CHECK(std::abs(op.energy(u, 0.0) - quad) <= 1e-12 * quad);
      }
    }
  }

  TEST_CASE("gradient against central differences, p = 2.5, s = 0.6, n = 64") {
    const auto d = Domain::interval(64);
    const EnergyOperator op(d, BoundaryRegime::fractional(0.6), 2.5);
    gen::Rng rng(8);
    for (int trial = 0; trial < 5; ++trial) {
      const Field u = rng.field(64);
      const double eps = 1e-6 * lp_norm(d, u, 2.5);
      const Field g = op.gradient(u, eps);
      Field fd(64);
      Field v = u;
      for (int i = 0; i < 64; ++i) {
        const double step = 1e-6 * std::max(1.0, std::abs(u[i]));
        v[i] = u[i] + step;
        const double up = op.energy(v, eps);
        v[i] = u[i] - step;
        const double down = op.energy(v, eps);
        v[i] = u[i];
        fd[i] = (up - down) / (2.0 * step) / d.h();
      }
      CHECK((g - fd).norm() / g.norm() <= 1e-6);
    }
  }

  TEST_CASE("kernel symmetry and errors") {
    const auto k = build_kernel(Domain::interval(11), 0.45, 1.7);
    for (int i = 0; i < 11; ++i)
      for (int j = 0; j < 11; ++j) CHECK(k.weight(i, j) == k.weight(j, i));
    CHECK_THROWS_AS(build_kernel(Domain::rectangle(3, 3, 1, 1), 0.5, 2.0), UnsupportedRegime);
    CHECK_THROWS_AS(build_kernel(Domain::interval(5), 1.0, 2.0), InvalidParameter);
  }
}
