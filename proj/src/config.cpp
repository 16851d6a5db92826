#include "philap/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "philap/timeexpr.hpp"

namespace philap {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    cfg.kv_[key] = value;
  }
  return cfg;
}

Config Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Config::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : kv_) out << k << " = " << v << "\n";
  return out.str();
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

const std::string& Config::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end())
    throw std::invalid_argument("config: missing key '" + key + "'");
  return it->second;
}

std::string Config::get_or(const std::string& key,
                           const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::number(const std::string& key) const {
  try {
    return parse_constant_expression(get(key));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config key '" + key + "': " + e.what());
  }
}

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long Config::integer(const std::string& key) const {
  const double v = number(key);
  const long r = std::lround(v);
  if (std::abs(v - static_cast<double>(r)) > 1e-9)
    throw std::invalid_argument("config key '" + key + "': expected an integer");
  return r;
}

long Config::integer_or(const std::string& key, long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::vector<double> Config::number_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key))) {
    try {
      out.push_back(parse_constant_expression(item));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

std::vector<int> Config::int_list(const std::string& key) const {
  std::vector<int> out;
  for (double v : number_list(key)) {
    const long r = std::lround(v);
    if (std::abs(v - static_cast<double>(r)) > 1e-9)
      throw std::invalid_argument("config key '" + key +
                                  "': expected integers");
    out.push_back(static_cast<int>(r));
  }
  return out;
}

void Config::set(const std::string& key, std::string value) {
  kv_[key] = std::move(value);
}

int Config::count_terms(const std::string& prefix) const {
  int count = 0;
  while (has(prefix + "." + std::to_string(count) + ".kind")) ++count;
  return count;
}

FamilyDescriptor parse_family(const Config& cfg, const std::string& prefix) {
  FamilyDescriptor d;
  d.family = cfg.get(prefix + ".family");
  d.p = cfg.number_or(prefix + ".p", 2.0);
  d.dimension = static_cast<int>(cfg.integer_or(prefix + ".dimension", 1));
  if (cfg.has(prefix + ".exponents"))
    d.exponents = cfg.number_list(prefix + ".exponents");
  if (cfg.has(prefix + ".dims")) {
    for (int v : cfg.int_list(prefix + ".dims")) d.block_dims.push_back(v);
  } else if (!d.exponents.empty()) {
    d.block_dims.assign(d.exponents.size(), 1);
  }
  return d;
}

GFunction build_gfunction(const Config& cfg, const std::string& prefix) {
  return make_family(parse_family(cfg, prefix));
}

namespace {

std::vector<int> term_coords(const Config& cfg, const std::string& key,
                             int dimension) {
  if (!cfg.has(key)) {
    std::vector<int> all(static_cast<std::size_t>(dimension));
    for (int i = 0; i < dimension; ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }
  auto coords = cfg.int_list(key);
  for (int c : coords)
    if (c < 0 || c >= dimension)
      throw std::invalid_argument("config key '" + key +
                                  "': coordinate out of range");
  return coords;
}

Vec term_vector(const Config& cfg, const std::string& key, int dimension) {
  const auto values = cfg.number_list(key);
  if (static_cast<int>(values.size()) != dimension)
    throw std::invalid_argument("config key '" + key + "': expected " +
                                std::to_string(dimension) + " entries");
  Vec v(dimension);
  for (int i = 0; i < dimension; ++i) v[i] = values[static_cast<std::size_t>(i)];
  return v;
}

SmoothSpatial power_spatial(std::vector<int> coords, double exponent) {
  if (!(exponent > 1.0))
    throw std::invalid_argument(
        "potential power term: exponent must exceed 1 for smoothness");
  auto block_norm = [coords](ConstVecRef x) {
    double s = 0.0;
    for (int c : coords) s += x[c] * x[c];
    return std::sqrt(s);
  };
  SmoothSpatial sp;
  sp.value = [block_norm, exponent](ConstVecRef x) {
    return std::pow(block_norm(x), exponent);
  };
  sp.grad = [block_norm, coords, exponent](ConstVecRef x) {
    Vec g = Vec::Zero(x.size());
    const double nb = block_norm(x);
    if (nb > 0.0) {
      const double scale = exponent * std::pow(nb, exponent - 2.0);
      for (int c : coords) g[c] = scale * x[c];
    }
    return g;
  };
  return sp;
}

}  // namespace

Potential build_potential(const Config& cfg, int dimension, double period) {
  const int count = cfg.count_terms("potential.term");
  if (count == 0)
    throw std::invalid_argument(
        "config: potential needs at least one potential.term.0.kind entry");
  std::vector<PotentialTerm> terms;
  for (int k = 0; k < count; ++k) {
    const std::string base = "potential.term." + std::to_string(k);
    const std::string kind = cfg.get(base + ".kind");
    const TimeFn coef = TimeExpr::parse(cfg.get_or(base + ".coef", "1")).fn();
    if (kind == "gfunc") {
      GFunction g = build_gfunction(cfg, base + ".phi");
      if (g.dimension() != dimension)
        throw std::invalid_argument(
            base + ": nested function dimension does not match potential");
      SmoothSpatial sp;
      sp.value = [g](ConstVecRef x) { return g.value(x); };
      sp.grad = [g](ConstVecRef x) { return g.gradient(x); };
      terms.push_back(PotentialTerm::smooth_term(coef, std::move(sp)));
    } else if (kind == "power") {
      terms.push_back(PotentialTerm::smooth_term(
          coef, power_spatial(term_coords(cfg, base + ".coords", dimension),
                              cfg.number(base + ".exponent"))));
    } else if (kind == "abs") {
      terms.push_back(PotentialTerm::abs_term(
          coef, term_coords(cfg, base + ".coords", dimension)));
    } else if (kind == "linear") {
      const Vec v = term_vector(cfg, base + ".vector", dimension);
      SmoothSpatial sp;
      sp.value = [v](ConstVecRef x) { return v.dot(x); };
      sp.grad = [v](ConstVecRef) { return v; };
      terms.push_back(PotentialTerm::smooth_term(coef, std::move(sp)));
    } else if (kind == "coord_product") {
      const auto coords = cfg.int_list(base + ".coords");
      if (coords.size() != 2)
        throw std::invalid_argument(base +
                                    ": coord_product needs two coordinates");
      const int i = coords[0], j = coords[1];
      if (i < 0 || j < 0 || i >= dimension || j >= dimension)
        throw std::invalid_argument(base + ": coordinate out of range");
      SmoothSpatial sp;
      sp.value = [i, j](ConstVecRef x) { return x[i] * x[j]; };
      sp.grad = [i, j](ConstVecRef x) {
        Vec g = Vec::Zero(x.size());
        g[i] += x[j];
        g[j] += x[i];
        return g;
      };
      terms.push_back(PotentialTerm::smooth_term(coef, std::move(sp)));
    } else if (kind == "constant") {
      SmoothSpatial sp;
      sp.value = [](ConstVecRef) { return 1.0; };
      sp.grad = [](ConstVecRef x) { return Vec::Zero(x.size()); };
      terms.push_back(PotentialTerm::smooth_term(coef, std::move(sp)));
    } else if (kind == "max_affine") {
      const int pieces = static_cast<int>(cfg.integer(base + ".pieces"));
      if (pieces < 1)
        throw std::invalid_argument(base + ": need at least one piece");
      std::vector<SmoothSpatial> parts;
      for (int j = 0; j < pieces; ++j) {
        const std::string pb = base + ".piece." + std::to_string(j);
        const Vec v = term_vector(cfg, pb + ".vector", dimension);
        const double c = cfg.number_or(pb + ".offset", 0.0);
        SmoothSpatial sp;
        sp.value = [v, c](ConstVecRef x) { return v.dot(x) + c; };
        sp.grad = [v](ConstVecRef) { return v; };
        parts.push_back(std::move(sp));
      }
      terms.push_back(PotentialTerm::max_term(coef, std::move(parts)));
    } else {
      throw std::invalid_argument(base + ": unknown kind '" + kind + "'");
    }
  }
  return Potential(dimension, std::move(terms), period);
}

ProblemSetup build_problem(const Config& cfg) {
  ProblemSetup setup(build_gfunction(cfg, "phi"));
  if (cfg.has("phi0.family")) setup.phi0 = build_gfunction(cfg, "phi0");
  setup.period = cfg.number_or("problem.period", 2.0 * kPi);
  if (!(setup.period > 0.0))
    throw std::invalid_argument("config: problem.period must be positive");
  setup.nodes = static_cast<int>(cfg.integer_or("problem.nodes", 256));
  if (cfg.count_terms("potential.term") > 0) {
    const int dim = static_cast<int>(
        cfg.integer_or("potential.dimension", setup.phi.dimension()));
    setup.F = build_potential(cfg, dim, setup.period);
    if (setup.F->dimension() != setup.phi.dimension())
      throw std::invalid_argument(
          "config: potential dimension does not match phi");
  }

  SolverOptions& s = setup.solver;
  s.restarts = static_cast<int>(cfg.integer_or("solver.restarts", s.restarts));
  s.seed = static_cast<std::uint64_t>(cfg.integer_or("solver.seed", 1));
  s.max_iterations = cfg.integer_or("solver.max_iterations", s.max_iterations);
  s.tol_action = cfg.number_or("solver.tol_action", s.tol_action);
  s.patience = static_cast<int>(cfg.integer_or("solver.patience", s.patience));
  s.tol_residual = cfg.number_or("solver.tol_residual", s.tol_residual);
  s.tol_mean = cfg.number_or("solver.tol_mean", s.tol_mean);
  s.step_a = cfg.number_or("solver.step_a", s.step_a);
  s.step_b = cfg.number_or("solver.step_b", s.step_b);
  s.multistart_radius =
      cfg.number_or("solver.multistart_radius", s.multistart_radius);
  s.smoothing_levels = static_cast<int>(
      cfg.integer_or("solver.smoothing_levels", s.smoothing_levels));
  s.smoothing_mu0 = cfg.number_or("solver.smoothing_mu0", s.smoothing_mu0);
  s.polish_iterations =
      cfg.integer_or("solver.polish_iterations", s.polish_iterations);
  s.snap_tol = cfg.number_or("solver.snap_tol", s.snap_tol);

  ProbeParams& p = setup.probes;
  p.period = setup.period;
  p.radius = cfg.number_or("probes.radius", p.radius);
  p.samples = static_cast<int>(cfg.integer_or("probes.samples", p.samples));
  p.time_samples =
      static_cast<int>(cfg.integer_or("probes.time_samples", p.time_samples));
  p.pair_samples =
      static_cast<int>(cfg.integer_or("probes.pair_samples", p.pair_samples));
  p.seed = static_cast<std::uint64_t>(cfg.integer_or("probes.seed", 2026));
  if (cfg.has("probes.radii")) p.radii = cfg.number_list("probes.radii");
  if (cfg.has("probes.pasca_block1"))
    p.pasca_block1 = cfg.int_list("probes.pasca_block1");
  if (cfg.has("probes.pasca_block2"))
    p.pasca_block2 = cfg.int_list("probes.pasca_block2");

  if (cfg.has("hypotheses.b")) {
    setup.b_text = cfg.get("hypotheses.b");
    setup.b = TimeExpr::parse(setup.b_text).fn();
  }
  if (cfg.has("hypotheses.d")) {
    setup.d_text = cfg.get("hypotheses.d");
    setup.d = TimeExpr::parse(setup.d_text).fn();
  }
  if (cfg.has("hypotheses.lambda")) setup.lambda = cfg.number("hypotheses.lambda");
  if (cfg.has("hypotheses.mu")) setup.mu = cfg.number("hypotheses.mu");
  if (cfg.has("hypotheses.pasca_p")) setup.pasca_p = cfg.number("hypotheses.pasca_p");
  if (cfg.has("hypotheses.pasca_q")) setup.pasca_q = cfg.number("hypotheses.pasca_q");
  if (cfg.has("hypotheses.pasca_alphas"))
    setup.pasca_alphas = cfg.number_list("hypotheses.pasca_alphas");
  return setup;
}

}  // namespace philap
