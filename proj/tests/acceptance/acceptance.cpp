// Acceptance suite: one PASS/FAIL line per criterion, details indented below it.
// Exit status is nonzero when any criterion fails.

#include "dnflow/flow.hpp"
#include "dnflow/invariants.hpp"
#include "dnflow/oracle.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

using namespace dnflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Case {
  std::string name;
  BoundaryRegime regime;
  int n;
};

// Resolutions for the sampled suites; the anchors use their own.
const std::vector<Case>& suite_cases() {
  static const std::vector<Case> cases = {
      {"dirichlet", BoundaryRegime::dirichlet(), 100},
      {"robin", BoundaryRegime::robin(1.0), 100},
      {"neumann", BoundaryRegime::neumann(), 100},
      {"fractional", BoundaryRegime::fractional(0.5), 100},
  };
  return cases;
}

const double kEpsilon = 1e-6;

struct Problem {
  Domain domain;
  EnergyOperator op;
  EnergyParams params;
  Problem(const Case& c, double p) : domain(Domain::interval(c.n)), op(domain, c.regime, p), params{p, kEpsilon} {}
};

SolverConfig solver(double grad_tol) {
  SolverConfig cfg;
  cfg.grad_tol = grad_tol;
  return cfg;
}

std::map<std::tuple<std::string, int, double, double>, EigenResult> oracle_cache;

const EigenResult& oracle(const Case& c, const Problem& pr, double grad_tol) {
  const auto key = std::make_tuple(c.name, c.n, pr.params.p, grad_tol);
  auto it = oracle_cache.find(key);
  if (it == oracle_cache.end()) it = oracle_cache.emplace(key, minimize_rayleigh(pr.op, pr.params, solver(grad_tol), 1)).first;
  return it->second;
}

std::string label(const Case& c, double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s n=%d p=%g", c.name.c_str(), c.n, p);
  return buf;
}

struct Criterion {
  std::string id;
  std::string title;
  bool passed = true;
  std::vector<std::string> lines;
  double seconds = 0.0;

  void note(const std::string& s) { lines.push_back(s); }
  void check(bool ok, const std::string& s) {
    passed = passed && ok;
    lines.push_back(std::string(ok ? "pass " : "FAIL ") + s);
  }
  void record(const CheckResult& r, const std::string& prefix) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %s worst=%.3g limit=%.3g %s", prefix.c_str(), r.name.c_str(), r.worst, r.limit,
                  r.detail.c_str());
    check(r.passed, buf);
  }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Classical first eigenvalue of -(|u'|^{p-2}u')' = lambda |u|^{p-2}u on (0, 1):
// lambda = (p - 1) pi_p^p with pi_p = 2 int_0^1 (1 - s^p)^{-1/p} ds.
double pi_p_closed(double p) { return 2.0 * M_PI / (p * std::sin(M_PI / p)); }
double pi_p_gamma(double p) { return 2.0 * std::tgamma(1.0 / p) * std::tgamma(1.0 - 1.0 / p) / p; }
// Direct quadrature; s = 1 - (1 - v)^m removes the endpoint singularity for m = 2p.
double pi_p_quadrature(double p) {
  const int n = 200000;
  const double m = 2.0 * p;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = (i + 0.5) / n;
    const double r = std::pow(1.0 - v, m);  // 1 - s
    const double s = 1.0 - r;
    const double one_minus_sp = -std::expm1(p * std::log1p(-r));
    const double ds = m * std::pow(1.0 - v, m - 1.0);
    sum += ds * std::pow(one_minus_sp, -1.0 / p);
  }
  return 2.0 * sum / n;
}

void ac1(Criterion& c) {
  const auto t0 = Clock::now();
  const Domain d = Domain::interval(199);
  const EnergyOperator op(d, BoundaryRegime::dirichlet(), 2.0);
  const EnergyParams params{2.0, kEpsilon};
  const auto lim = run_to_limit(op, Field::Ones(d.size()), params, solver(1e-9));
  const auto ref = dense_linear_reference(d, BoundaryRegime::dirichlet());
  c.seconds = seconds_since(t0);
  const double h = d.h();
  const double closed = 4.0 / (h * h) * std::pow(std::sin(0.5 * M_PI * h), 2.0);
  c.note(fmt("flow %.12g  dense %.12g  closed form %.12g  steps %ld", lim.lambda, ref.lambda, closed, lim.steps));
  c.check(std::abs(lim.lambda - ref.lambda) / ref.lambda <= 1e-6,
          fmt("flow vs dense rel %.3g <= 1e-6", std::abs(lim.lambda - ref.lambda) / ref.lambda));
  const double cont = std::abs(lim.lambda - M_PI * M_PI) / (M_PI * M_PI);
  c.check(cont <= 1e-4, fmt("flow vs pi^2 rel %.3g <= 1e-4", cont));
  c.check(c.seconds <= 10.0, fmt("runtime %.2fs <= 10s", c.seconds));
}

void ac2(Criterion& c) {
  const auto t0 = Clock::now();
  const double p = 3.0;
  const Domain d = Domain::interval(399);
  const EnergyOperator op(d, BoundaryRegime::dirichlet(), p);
  const EnergyParams params{p, kEpsilon};
  const auto cfg = solver(1e-9);
  const auto lim = run_to_limit(op, Field::Ones(d.size()), params, cfg);
  const auto eig = minimize_rayleigh(op, params, cfg, 1);
  c.seconds = seconds_since(t0);
  const double classical = (p - 1.0) * std::pow(pi_p_closed(p), p);
  const double by_gamma = (p - 1.0) * std::pow(pi_p_gamma(p), p);
  const double by_quad = (p - 1.0) * std::pow(pi_p_quadrature(p), p);
  c.note(fmt("flow %.10g  oracle %.10g  steps %ld", lim.lambda, eig.lambda, lim.steps));
  c.note(fmt("classical (p-1) pi_p^p: closed %.10g, gamma %.10g, quadrature %.10g", classical, by_gamma, by_quad));
  c.check(std::abs(by_quad - classical) / classical <= 1e-8 && std::abs(by_gamma - classical) / classical <= 1e-12,
          "classical value agrees across closed form, gamma identity and quadrature");
  const double vs_oracle = std::abs(lim.lambda - eig.lambda) / eig.lambda;
  c.check(vs_oracle <= 5e-3, fmt("flow vs oracle rel %.3g <= 5e-3", vs_oracle));
  const double vs_classical = std::abs(lim.lambda - classical) / classical;
  c.check(vs_classical <= 1e-2, fmt("flow vs classical %.6g rel %.3g <= 1e-2", classical, vs_classical));
  // The literal target 2 pi_3^3 with pi_3 = 2 pi 2^{1/3} / (3 sin(pi/3)) counts the
  // factor p - 1 twice (2^{1/3} cubed is already p - 1); reported, not asserted.
  const double literal = 2.0 * std::pow(2.0 * M_PI * std::cbrt(2.0) / (3.0 * std::sin(M_PI / 3.0)), 3.0);
  c.note(fmt("info: literal 2*pi_3^3 = %.6g, flow/literal = %.6g (= 1/(p-1) up to grid error)", literal,
             lim.lambda / literal));
  c.check(c.seconds <= 60.0, fmt("runtime %.2fs <= 60s", c.seconds));
}

struct LimitRun {
  Case c;
  double p;
  LimitResult lim;
  EigenResult eig;
};

std::vector<LimitRun> limit_runs;

void ac3(Criterion& c) {
  const auto t0 = Clock::now();
  std::vector<std::pair<Case, double>> runs;
  for (double p : {1.5, 2.0, 3.0}) {
    runs.push_back({{"dirichlet", BoundaryRegime::dirichlet(), 200}, p});
    runs.push_back({{"robin", BoundaryRegime::robin(1.0), 200}, p});
  }
  runs.push_back({{"fractional", BoundaryRegime::fractional(0.5), 200}, 2.0});
  const auto cfg = solver(1e-9);
  for (const auto& [cs, p] : runs) {
    Problem pr(cs, p);
    const auto& eig = oracle(cs, pr, 1e-9);
    auto lim = run_to_limit(pr.op, Field::Ones(pr.domain.size()), pr.params, cfg);
    if (lim.degenerate) {
      c.check(false, label(cs, p) + " degenerate limit");
      continue;
    }
    const double gap = lp_norm(pr.domain, lim.profile - eig.extremal, p);
    c.check(gap <= 1e-3, fmt("%s |profile - phi_h|_p = %.3g <= 1e-3 (steps %ld)", label(cs, p).c_str(), gap, lim.steps));
    c.record(check_sign_definite(lim.profile), label(cs, p));
    if (cs.regime.kind == RegimeKind::fractional_dirichlet) {
      const auto ref = dense_linear_reference(pr.domain, cs.regime);
      const double rel = std::abs(lim.lambda - ref.lambda) / ref.lambda;
      c.check(rel <= 1e-6, fmt("%s flow vs dense eigenvalue rel %.3g <= 1e-6", label(cs, p).c_str(), rel));
    }
    limit_runs.push_back({cs, p, std::move(lim), eig});
  }
  // Neumann: conditional on both seeds producing the same extremal direction.
  for (double p : {1.5, 2.0, 3.0}) {
    const Case cs{"neumann", BoundaryRegime::neumann(), 200};
    Problem pr(cs, p);
    const auto& eig = oracle(cs, pr, 1e-9);
    const auto other = minimize_rayleigh(pr.op, pr.params, cfg, 2);
    const double spread = std::min(lp_norm(pr.domain, other.extremal - eig.extremal, p),
                                   lp_norm(pr.domain, other.extremal + eig.extremal, p));
    if (spread > 1e-3) {
      c.note(fmt("skip %s: extremal-ratio hypothesis fails (seed spread %.3g)", label(cs, p).c_str(), spread));
      continue;
    }
    const auto lim = run_to_limit(pr.op, canonical_initial(pr.op), pr.params, cfg);
    if (lim.degenerate) {
      c.check(false, label(cs, p) + " degenerate limit");
      continue;
    }
    const double gap = std::min(lp_norm(pr.domain, lim.profile - eig.extremal, p),
                                lp_norm(pr.domain, lim.profile + eig.extremal, p));
    c.check(gap <= 1e-3, fmt("%s hypothesis holds (seed spread %.3g); min_sign |profile -+ phi_h|_p = %.3g <= 1e-3",
                             label(cs, p).c_str(), spread, gap));
  }
  c.seconds = seconds_since(t0);
}

void ac4(Criterion& c) {
  const auto t0 = Clock::now();
  const auto cfg = solver(1e-10);
  for (const auto& cs : suite_cases()) {
    for (double p : {1.5, 2.0, 3.0}) {
      Problem pr(cs, p);
      const auto& eig = oracle(cs, pr, 1e-10);
      const auto r = check_separation(pr.op, eig, 0.1 / eig.lambda, 100, pr.params, cfg, 1e-6);
      c.record(r, label(cs, p));
    }
  }
  c.seconds = seconds_since(t0);
}

void ac5(Criterion& c) {
  const auto t0 = Clock::now();
  for (const auto& cs : suite_cases()) {
    for (double p : {1.5, 2.0, 3.0}) {
      Problem pr(cs, p);
      const auto& eig = oracle(cs, pr, 1e-9);
      const double tau = 0.05 / eig.lambda;
      EvolveOptions plain;
      plain.dual = false;
      for (double tol : {1e-9, 5e-10}) {
        const auto traj = evolve(pr.op, canonical_initial(pr.op), tau, 200, pr.params, solver(tol), plain);
        for (const auto& r : check_trajectory(traj, eig.lambda, tol)) c.record(r, fmt("%s tol=%g", label(cs, p).c_str(), tol));
      }
    }
  }
  c.seconds = seconds_since(t0);
}

void ac6(Criterion& c) {
  const auto t0 = Clock::now();
  const auto cfg = solver(1e-9);
  for (const auto& cs : suite_cases()) {
    for (double p : {1.5, 2.0, 3.0}) {
      Problem pr(cs, p);
      const auto& eig = oracle(cs, pr, 1e-9);
      for (const auto& r : check_dual(pr.op, pr.params, cfg, eig, 200, 11)) c.record(r, label(cs, p));
    }
  }
  c.seconds = seconds_since(t0);
}

void ac7(Criterion& c) {
  for (const auto& run : limit_runs) {
    if (run.c.name != "dirichlet" && run.c.name != "robin") continue;
    const double gap = mu_lambda_consistency(run.lim.lambda, run.lim.mu, run.p);
    c.check(gap <= 0.02, fmt("%s lambda %.10g mu %.10g gap %.3g <= 0.02", label(run.c, run.p).c_str(), run.lim.lambda,
                             run.lim.mu, gap));
  }
}

void ac8(Criterion& c) {
  const auto t0 = Clock::now();
  const auto cfg = solver(1e-9);
  for (const auto& cs : suite_cases()) {
    for (double p : {1.5, 2.0, 3.0}) {
      Problem pr(cs, p);
      const auto& eig = oracle(cs, pr, 1e-9);
      const Field g = random_field(pr.domain, 5, false).cwiseAbs() + canonical_initial(pr.op);
      for (const auto& r : check_quotient_refinement(pr.op, g, pr.params, cfg, 0.2 / eig.lambda, 10, 3))
        c.record(r, label(cs, p));
    }
  }
  c.seconds = seconds_since(t0);
}

void ac9(Criterion& c) {
  const auto t0 = Clock::now();
  for (double p : {2.0, 3.0}) {
    const Case cs{"dirichlet", BoundaryRegime::dirichlet(), 200};
    Problem pr(cs, p);
    const auto& eig = oracle(cs, pr, 1e-9);
    EvolveOptions plain;
    plain.dual = false;
    const auto traj = evolve(pr.op, Field::Ones(pr.domain.size()), 0.05 / eig.lambda, 200, pr.params, solver(1e-9), plain);
    c.record(check_comparison(traj, eig, 1e-9), label(cs, p));
  }
  c.seconds = seconds_since(t0);
}

void ac10(Criterion& c) {
  const auto t0 = Clock::now();
  std::vector<std::pair<std::string, std::function<Domain()>>> domains = {
      {"interval n=100", [] { return Domain::interval(100); }},
      {"interval n=64", [] { return Domain::interval(64); }},
      {"rectangle 12x9", [] { return Domain::rectangle(12, 9, 1.0, 0.75); }},
  };
  Bitmap ell{8, 8, 1.0 / 9.0, std::vector<std::uint8_t>(64, 1)};
  for (int r = 0; r < 4; ++r)
    for (int col = 4; col < 8; ++col) ell.cells[r * 8 + col] = 0;
  domains.push_back({"L-shape 8x8", [ell] { return Domain::masked(ell); }});

  for (double p : {1.5, 2.0, 2.5, 3.0}) {
    const EnergyParams params{p, kEpsilon};
    for (const auto& [dname, make] : domains) {
      const Domain d = make();
      std::vector<std::pair<std::string, BoundaryRegime>> regimes = {{"dirichlet", BoundaryRegime::dirichlet()},
                                                                     {"neumann", BoundaryRegime::neumann()}};
      if (d.supports_robin()) regimes.push_back({"robin", BoundaryRegime::robin(1.0)});
      if (d.kind() == DomainKind::interval && d.size() == 64) {
        regimes = {{"fractional", BoundaryRegime::fractional(0.5)}};
        regimes.push_back({"fractional s=0.6", BoundaryRegime::fractional(0.6)});
      }
      for (const auto& [rname, regime] : regimes) {
        const EnergyOperator op(d, regime, p);
        c.record(check_gradient(op, params, 50, 3), fmt("%s %s p=%g", rname.c_str(), dname.c_str(), p));
      }
    }
  }
  c.seconds = seconds_since(t0);
}

}  // namespace

int main() {
  std::vector<std::pair<Criterion, std::function<void(Criterion&)>>> all = {
      {{"AC1", "eigenvalue anchor, linear case (1-D Dirichlet p=2 n=199)"}, ac1},
      {{"AC2", "eigenvalue anchor, nonlinear case (1-D Dirichlet p=3 n=399)"}, ac2},
      {{"AC3", "profile limit from g=1 (Neumann conditional)"}, ac3},
      {{"AC4", "separation of variables, 100 steps at grad_tol=1e-10"}, ac4},
      {{"AC5", "monotonicity suite, 200 steps, slack 10*grad_tol at grad_tol and grad_tol/2"}, ac5},
      {{"AC6", "dual Poincare suite, 200 random fields"}, ac6},
      {{"AC7", "mu-lambda consistency at default resolution"}, ac7},
      {{"AC8", "quotient refinement over three tau levels"}, ac8},
      {{"AC9", "comparison bound from g=1"}, ac9},
      {{"AC10", "energy gradient vs central differences"}, ac10},
  };
  bool all_passed = true;
  for (auto& [crit, run] : all) {
    try {
      run(crit);
    } catch (const std::exception& e) {
      crit.check(false, std::string("exception: ") + e.what());
    }
    all_passed = all_passed && crit.passed;
    std::printf("%-4s %s  %s (%.1fs)\n", crit.id.c_str(), crit.passed ? "PASS" : "FAIL", crit.title.c_str(), crit.seconds);
    for (const auto& line : crit.lines) std::printf("       %s\n", line.c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", all_passed ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all_passed ? 0 : 1;
}
