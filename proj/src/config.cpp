#include "dnflow/config.hpp"

#include "dnflow/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dnflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v, long line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ParseError(line, key, "expected a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v, long line) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError(line, key, "expected an integer, got '" + v + "'");
  return out;
}

std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed, long line) {
  for (const char* a : allowed)
    if (v == a) return v;
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ParseError(line, key, "'" + v + "' is not one of " + list);
}

using Setter = std::function<void(RunConfig&, const std::string&, long)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"domain.kind",
       [](RunConfig& c, const std::string& v, long l) {
         c.domain_kind = one_of("domain.kind", v, {"interval", "rectangle", "masked"}, l);
       }},
      {"domain.n", [](RunConfig& c, const std::string& v, long l) { c.n = to_long("domain.n", v, l); }},
      {"domain.ny", [](RunConfig& c, const std::string& v, long l) { c.ny = to_long("domain.ny", v, l); }},
      {"domain.lx", [](RunConfig& c, const std::string& v, long l) { c.lx = to_double("domain.lx", v, l); }},
      {"domain.ly", [](RunConfig& c, const std::string& v, long l) { c.ly = to_double("domain.ly", v, l); }},
      {"domain.mask", [](RunConfig& c, const std::string& v, long) { c.mask_path = v; }},
      {"p", [](RunConfig& c, const std::string& v, long l) { c.p = to_double("p", v, l); }},
      {"regime.kind",
       [](RunConfig& c, const std::string& v, long l) {
         c.regime_kind = one_of("regime.kind", v, {"dirichlet", "robin", "neumann", "fractional"}, l);
       }},
      {"regime.beta", [](RunConfig& c, const std::string& v, long l) { c.beta = to_double("regime.beta", v, l); }},
      {"regime.s", [](RunConfig& c, const std::string& v, long l) { c.s = to_double("regime.s", v, l); }},
      {"tau",
       [](RunConfig& c, const std::string& v, long l) {
         if (v == "auto")
           c.tau.reset();
         else
           c.tau = to_double("tau", v, l);
       }},
      {"steps", [](RunConfig& c, const std::string& v, long l) { c.steps = to_long("steps", v, l); }},
      {"grad_tol", [](RunConfig& c, const std::string& v, long l) { c.grad_tol = to_double("grad_tol", v, l); }},
      {"epsilon", [](RunConfig& c, const std::string& v, long l) { c.epsilon = to_double("epsilon", v, l); }},
      {"max_iters", [](RunConfig& c, const std::string& v, long l) { c.max_iters = to_long("max_iters", v, l); }},
      {"seed",
       [](RunConfig& c, const std::string& v, long l) {
         const long s = to_long("seed", v, l);
         if (s < 0) throw ParseError(l, "seed", "must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"init.kind",
       [](RunConfig& c, const std::string& v, long l) {
         c.init_kind = one_of("init.kind", v, {"constant_one", "extremal", "random", "file"}, l);
       }},
      {"init.path", [](RunConfig& c, const std::string& v, long) { c.init_path = v; }},
      {"out.dir", [](RunConfig& c, const std::string& v, long) { c.out_dir = v; }},
      {"snapshots",
       [](RunConfig& c, const std::string& v, long l) {
         c.snapshots.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           const long k = to_long("snapshots", trim(item), l);
           if (k < 0) throw ParseError(l, "snapshots", "step indices must be nonnegative");
           c.snapshots.push_back(k);
         }
       }},
      {"eigen.rel_tol",
       [](RunConfig& c, const std::string& v, long l) { c.eigen_rel_tol = to_double("eigen.rel_tol", v, l); }},
      {"eigen.max_steps",
       [](RunConfig& c, const std::string& v, long l) { c.eigen_max_steps = to_long("eigen.max_steps", v, l); }},
      {"verify.samples",
       [](RunConfig& c, const std::string& v, long l) { c.verify_samples = to_long("verify.samples", v, l); }},
      {"verify.steps",
       [](RunConfig& c, const std::string& v, long l) { c.verify_steps = to_long("verify.steps", v, l); }},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ParseError(0, key, what);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value, long line) {
  for (const auto& [name, set] : setters()) {
    if (name == key) {
      if (value.empty()) throw ParseError(line, key, "missing value");
      set(cfg, value, line);
      return;
    }
  }
  throw ParseError(line, key, "unknown key");
}

void RunConfig::validate() const {
  require(p > 1.0, "p", "p > 1 required");
  require(grad_tol > 0.0, "grad_tol", "must be positive");
  require(epsilon >= 0.0, "epsilon", "must be nonnegative");
  require(epsilon > 0.0 || p >= 2.0, "epsilon", "epsilon = 0 needs p >= 2");
  require(max_iters >= 1, "max_iters", "must be at least 1");
  require(steps >= 1, "steps", "must be at least 1");
  require(!tau || *tau > 0.0, "tau", "must be positive or auto");
  require(n >= 3, "domain.n", "at least 3 nodes required");
  require(ny == 0 || ny >= 3, "domain.ny", "at least 3 nodes required");
  require(lx > 0.0 && ly > 0.0, "domain.lx", "side lengths must be positive");
  require(domain_kind != "masked" || !mask_path.empty(), "domain.mask", "masked domains need a bitmap path");
  if (regime_kind == "robin") {
    require(domain_kind != "masked", "regime.kind", "robin is not offered on masked domains");
    require(beta > 0.0, "regime.beta", "beta > 0 required");
  }
  if (regime_kind == "fractional") {
    require(domain_kind == "interval", "regime.kind", "fractional regime needs an interval domain");
    require(s > 0.0 && s < 1.0, "regime.s", "s in (0, 1) required");
  }
  require(init_kind != "file" || !init_path.empty(), "init.path", "init.kind = file needs init.path");
  require(eigen_rel_tol > 0.0, "eigen.rel_tol", "must be positive");
  require(eigen_max_steps >= 2, "eigen.max_steps", "must be at least 2");
  require(verify_samples >= 2, "verify.samples", "must be at least 2");
  require(verify_steps >= 2, "verify.steps", "must be at least 2");
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  long line = 0;
  std::map<std::string, long> seen;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "", "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ParseError(line, "", "missing key");
    set_config_value(cfg, key, trim(text.substr(eq + 1)), line);
    seen[key] = line;
  }
  try {
    cfg.validate();
  } catch (const ParseError& e) {
    const auto it = seen.find(e.key());
    throw ParseError(it == seen.end() ? 0 : static_cast<std::size_t>(it->second), e.key(), e.message());
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  return parse_config(in);
}

Domain build_domain(const RunConfig& cfg) {
  if (cfg.domain_kind == "interval") return Domain::interval(static_cast<int>(cfg.n));
  if (cfg.domain_kind == "rectangle")
    return Domain::rectangle(static_cast<int>(cfg.n), static_cast<int>(cfg.ny ? cfg.ny : cfg.n), cfg.lx, cfg.ly);
  return Domain::masked(read_bitmap_file(cfg.mask_path));
}

BoundaryRegime build_regime(const RunConfig& cfg) {
  if (cfg.regime_kind == "robin") return BoundaryRegime::robin(cfg.beta);
  if (cfg.regime_kind == "neumann") return BoundaryRegime::neumann();
  if (cfg.regime_kind == "fractional") return BoundaryRegime::fractional(cfg.s);
  return BoundaryRegime::dirichlet();
}

EnergyParams build_params(const RunConfig& cfg) { return EnergyParams{cfg.p, cfg.epsilon}; }

SolverConfig build_solver(const RunConfig& cfg) {
  SolverConfig s;
  s.grad_tol = cfg.grad_tol;
  s.max_iters = cfg.max_iters;
  return s;
}

LimitOptions build_limit_options(const RunConfig& cfg) {
  LimitOptions o;
  o.tau = cfg.tau;
  o.rel_tol = cfg.eigen_rel_tol;
  o.max_steps = cfg.eigen_max_steps;
  return o;
}

}  // namespace dnflow
