#include "dnflow/errors.hpp"
#include "dnflow/operators.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace dnflow;

namespace {

Field sine_mode(const Domain& d, int m = 1) {
  Field u(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) u[i] = std::sin(m * M_PI * d.coordinates()[i][0]);
  return u;
}

// Central differences of the energy, divided by the cell measure.
Field fd_gradient(const EnergyOperator& op, const Field& u, double eps) {
  Field g(u.size());
  Field v = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double step = 1e-6 * std::max(1.0, std::abs(u[i]));
    v[i] = u[i] + step;
    const double up = op.energy(v, eps);
    v[i] = u[i] - step;
    const double down = op.energy(v, eps);
    v[i] = u[i];
    g[i] = (up - down) / (2.0 * step) / op.volume_weight();
  }
  return g;
}

}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("jp examples") {
    CHECK(jp(2.0, 3.0) == 4.0);
    CHECK(jp(0.0, 1.5) == 0.0);
    CHECK(jp(-2.0, 3.0) == -4.0);
    CHECK(jp(-4.0, 1.5) == doctest::Approx(-2.0));
  }

  TEST_CASE("linear ramp energy by hand, n = 3") {
    // Differences 1, 1, 1 and -3 (jump to the zero ghost at x = 1), cell width 1/4:
    // E = (1/2) * (1/4) * (1 + 1 + 1 + 9) = 1.5.
    const auto d = Domain::interval(3);
    Field u(3);
    u << 0.25, 0.5, 0.75;
    CHECK(energy(d, u, EnergyParams{2.0, 0.0}, BoundaryRegime::dirichlet()) == doctest::Approx(1.5).epsilon(1e-15));
    // Neumann drops the two boundary differences: (1/2) * (1/4) * 2.
    CHECK(energy(d, u, EnergyParams{2.0, 0.0}, BoundaryRegime::neumann()) == doctest::Approx(0.25).epsilon(1e-15));
  }

  TEST_CASE("zero field has zero energy and gradient in every regime") {
    const auto d = Domain::interval(12);
    for (const auto& r : {BoundaryRegime::dirichlet(), BoundaryRegime::robin(2.0), BoundaryRegime::neumann(),
                          BoundaryRegime::fractional(0.4)}) {
      for (double p : {1.5, 2.0, 3.0}) {
        const EnergyParams params{p, 1e-6};
        CHECK(energy(d, Field::Zero(12), params, r) == 0.0);
        CHECK(energy_gradient(d, Field::Zero(12), params, r).norm() == 0.0);
      }
    }
  }

  TEST_CASE("discrete sine mode is an eigenvector of the p = 2 gradient") {
    // Rounding of the samples is amplified by about 1 / (pi h)^2 in the second
    // difference, so a moderate grid keeps the comparison above that floor.
    const auto d = Domain::interval(99);
    const Field u = sine_mode(d);
    const Field g = energy_gradient(d, u, EnergyParams{2.0, 0.0}, BoundaryRegime::dirichlet());
    const double h = d.h();
    const double lambda = 4.0 / (h * h) * std::pow(std::sin(0.5 * M_PI * h), 2.0);
    CHECK((g - lambda * u).norm() / (lambda * u.norm()) <= 1e-12);
  }

  TEST_CASE("gradient matches central differences") {
    gen::Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
      auto c = gen::small_case(rng);
      const double p = rng.exponent();
      const EnergyOperator op(c.domain, c.regime, p);
      const Field u = rng.field(c.domain.size());
      const double eps = std::max(1e-6 * lp_norm(c.domain, u, p), p < 2.0 ? 1e-8 : 0.0);
      const Field g = op.gradient(u, eps);
      const Field fd = fd_gradient(op, u, eps);
      INFO(c.name, " p=", p, " trial ", trial);
      CHECK((g - fd).norm() / g.norm() <= 1e-6);
    }
  }

  TEST_CASE("hessian diagonal matches differences of the gradient") {
    gen::Rng rng(5);
    for (int trial = 0; trial < 12; ++trial) {
      auto c = gen::small_case(rng);
      const double p = rng.exponent();
      const EnergyOperator op(c.domain, c.regime, p);
      const Field u = rng.field(c.domain.size());
      const double eps = 1e-3;
      Field diag;
      op.hessian_diagonal(u, eps, diag);
      Field v = u;
      for (Eigen::Index i = 0; i < u.size(); i += 3) {
        const double step = 1e-6;
        v[i] = u[i] + step;
        const double up = op.gradient(v, eps)[i];
        v[i] = u[i] - step;
        const double down = op.gradient(v, eps)[i];
        v[i] = u[i];
        INFO(c.name, " p=", p, " node ", i);
        CHECK((up - down) / (2.0 * step) == doctest::Approx(diag[i]).epsilon(1e-5));
      }
    }
  }

  TEST_CASE("convexity along random chords") {
    gen::Rng rng(23);
    for (int trial = 0; trial < 60; ++trial) {
      auto c = gen::small_case(rng);
      const double p = rng.exponent();
      const EnergyOperator op(c.domain, c.regime, p);
      const Field u = rng.field(c.domain.size(), 2.0);
      const Field v = rng.field(c.domain.size());
      const double eps = 1e-6;
      const double eu = op.energy(u, eps), ev = op.energy(v, eps);
      for (double theta : {0.1, 0.37, 0.5, 0.9}) {
        const double mid = op.energy(theta * u + (1.0 - theta) * v, eps);
        INFO(c.name, " p=", p, " theta=", theta);
        CHECK(mid <= theta * eu + (1.0 - theta) * ev + 1e-12 * std::max({1.0, eu, ev}));
      }
    }
  }

  TEST_CASE("p-homogeneity without regularization") {
    gen::Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      auto c = gen::small_case(rng);
      const double p = rng.uniform(2.0, 4.0);
      const EnergyOperator op(c.domain, c.regime, p);
      const Field u = rng.field(c.domain.size());
      const double k = rng.uniform(-5.0, 5.0);
      CHECK(op.energy(k * u, 0.0) == doctest::Approx(std::pow(std::abs(k), p) * op.energy(u, 0.0)).epsilon(1e-12));
    }
  }

  TEST_CASE("Neumann energy ignores constants") {
    gen::Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
      const auto d = trial % 2 ? Domain::interval(rng.integer(4, 40)) : Domain::rectangle(5, 4, 1.0, 1.0);
      const double p = rng.exponent();
      const EnergyOperator op(d, BoundaryRegime::neumann(), p);
      const Field u = rng.field(d.size());
      const double c = rng.uniform(-10.0, 10.0);
      const Field shifted = (u.array() + c).matrix();
      CHECK(op.energy(shifted, 1e-6) == doctest::Approx(op.energy(u, 1e-6)).epsilon(1e-10));
      CHECK((op.gradient(shifted, 1e-6) - op.gradient(u, 1e-6)).norm() <= 1e-8 * op.gradient(u, 1e-6).norm());
    }
  }

  TEST_CASE("trace examples") {
    const auto sq = Domain::rectangle(99, 99, 1.0, 1.0);
    const double perimeter = trace_lp(sq, Field::Ones(sq.size()), 2.0);
    CHECK(std::abs(perimeter - 4.0) <= 2.0 * 4.0 * sq.h());
    CHECK(trace_lp(sq, Field::Zero(sq.size()), 2.0) == 0.0);

    const auto d = Domain::interval(9);
    Field u = Field::LinSpaced(9, 0.5, -2.0);
    CHECK(trace_lp(d, u, 3.0) == doctest::Approx(std::pow(0.5, 3.0) + 8.0));
  }

  TEST_CASE("Robin energy adds the boundary term") {
    const auto d = Domain::interval(20);
    const Field u = Field::Ones(20);
    const double beta = 2.5;
    const double bulk = energy(d, u, EnergyParams{3.0, 0.0}, BoundaryRegime::neumann());
    const double robin = energy(d, u, EnergyParams{3.0, 0.0}, BoundaryRegime::robin(beta));
    CHECK(robin - bulk == doctest::Approx(beta / 3.0 * trace_lp(d, u, 3.0)));
  }

  TEST_CASE("parameter and shape errors") {
    const auto d = Domain::interval(5);
    CHECK_THROWS_AS(energy(d, Field::Ones(5), EnergyParams{1.0, 1e-6}, BoundaryRegime::dirichlet()), InvalidParameter);
    CHECK_THROWS_AS(energy(d, Field::Ones(5), EnergyParams{1.5, 0.0}, BoundaryRegime::dirichlet()), InvalidParameter);
    CHECK_THROWS_AS(energy(d, Field::Ones(5), EnergyParams{2.0, 0.0}, BoundaryRegime::robin(0.0)), InvalidParameter);
    CHECK_THROWS_AS(energy(d, Field::Ones(4), EnergyParams{2.0, 0.0}, BoundaryRegime::dirichlet()), ShapeError);
    const auto sq = Domain::rectangle(4, 4, 1.0, 1.0);
    CHECK_THROWS_AS(EnergyOperator(sq, BoundaryRegime::fractional(0.5), 2.0), UnsupportedRegime);
  }
}
