#pragma once
// Small seeded generators for property tests. Each case draws from its own
// stream so a failing case can be replayed from the printed seed.

#include "dnflow/operators.hpp"

#include <random>
#include <string>

namespace gen {

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }

  double exponent() {
    // Mix the common values with arbitrary draws from (1.2, 4).
    static const double fixed[] = {1.5, 2.0, 2.5, 3.0};
    if (integer(0, 1) == 0) return fixed[integer(0, 3)];
    return uniform(1.2, 4.0);
  }

  dnflow::Field field(Eigen::Index n, double scale = 1.0) {
    dnflow::Field u(n);
    const int shape = integer(0, 2);
    const double a = uniform(-2.0, 2.0), b = uniform(1.0, 6.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = (i + 1.0) / (n + 1.0);
      double v = uniform(-1.0, 1.0);
      if (shape == 1) v = std::sin(b * x * 3.14159) + 0.1 * v;
      if (shape == 2) v = a * x + 0.3 * v;
      u[i] = scale * v;
    }
    return u;
  }
};

struct Case {
  std::string name;
  dnflow::Domain domain;
  dnflow::BoundaryRegime regime;
};

// A regime on a small domain that can host it.
inline Case small_case(Rng& r) {
  using namespace dnflow;
  switch (r.integer(0, 5)) {
    case 0: return {"interval dirichlet", Domain::interval(r.integer(5, 30)), BoundaryRegime::dirichlet()};
    case 1: return {"interval robin", Domain::interval(r.integer(5, 30)), BoundaryRegime::robin(r.uniform(0.2, 3.0))};
    case 2: return {"interval neumann", Domain::interval(r.integer(5, 30)), BoundaryRegime::neumann()};
    case 3:
      return {"interval fractional", Domain::interval(r.integer(5, 20)), BoundaryRegime::fractional(r.uniform(0.2, 0.8))};
    case 4: return {"rectangle dirichlet", Domain::rectangle(r.integer(3, 7), r.integer(3, 7), 1.0, 0.8), BoundaryRegime::dirichlet()};
    default: return {"rectangle robin", Domain::rectangle(r.integer(3, 7), r.integer(3, 7), 1.0, 1.3), BoundaryRegime::robin(1.0)};
  }
}

}  // namespace gen
