#include "nekmini/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "nekmini/error.hpp"

namespace nekmini {

namespace {

struct BadValue {
  std::string what;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::string t = s;
  for (auto& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_real(const std::string& s) {
  std::string v = trim(s);
  double scale = 1.0;
  if (v.size() >= 2 && v.compare(v.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    v = v.substr(0, v.size() - 2);
    if (v.empty()) return scale;
  }
  size_t used = 0;
  double x;
  try {
    x = std::stod(v, &used);
  } catch (...) {
    throw BadValue{"expected a real number, got '" + s + "'"};
  }
  if (used != v.size()) throw BadValue{"expected a real number, got '" + s + "'"};
  return x * scale;
}

long long to_int(const std::string& s) {
  const std::string v = trim(s);
  size_t used = 0;
  long long x;
  try {
    x = std::stoll(v, &used);
  } catch (...) {
    throw BadValue{"expected an integer, got '" + s + "'"};
  }
  if (used != v.size()) throw BadValue{"expected an integer, got '" + s + "'"};
  return x;
}

std::string choice(const std::string& s, std::initializer_list<const char*> allowed) {
  const std::string v = trim(s);
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return v;
    list += std::string(list.empty() ? "" : ", ") + a;
  }
  throw BadValue{"invalid value '" + v + "' (expected one of: " + list + ")"};
}

template <size_t N>
std::array<double, N> real_list(const std::string& s) {
  const auto t = tokens(s);
  std::array<double, N> out{};
  if (t.size() == 1) {
    out.fill(to_real(t[0]));
  } else if (t.size() == N) {
    for (size_t i = 0; i < N; ++i) out[i] = to_real(t[i]);
  } else {
    throw BadValue{"expected 1 or " + std::to_string(N) + " reals, got '" + s + "'"};
  }
  return out;
}

// Shortest text that reads back to the same double.
std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

template <class A>
std::string fmt_list(const A& a) {
  std::string s;
  for (size_t i = 0; i < a.size(); ++i) s += (i ? " " : "") + fmt(static_cast<double>(a[i]));
  return s;
}

BoundaryKind to_bc(const std::string& s) {
  const std::string v = choice(s, {"periodic", "dirichlet", "outflow"});
  if (v == "periodic") return BoundaryKind::periodic;
  if (v == "dirichlet") return BoundaryKind::dirichlet;
  return BoundaryKind::outflow;
}

const char* bc_name(BoundaryKind b) {
  switch (b) {
    case BoundaryKind::periodic: return "periodic";
    case BoundaryKind::dirichlet: return "dirichlet";
    case BoundaryKind::outflow: return "outflow";
  }
  return "?";
}

struct KeyDef {
  const char* key;
  const char* type;
  const char* doc;
  std::function<void(CaseConfig&, const std::string&)> set;
  std::function<std::string(const CaseConfig&)> get;
};

const std::vector<KeyDef>& keys() {
  static const std::vector<KeyDef> defs = {
      {"case.type", "flow|poisson", "Navier-Stokes run or manufactured Poisson solve.",
       [](CaseConfig& c, const std::string& v) { c.case_type = choice(v, {"flow", "poisson"}); },
       [](const CaseConfig& c) { return c.case_type; }},
      {"ranks", "int", "Number of simulated ranks.",
       [](CaseConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 1) throw BadValue{"ranks must be >= 1"};
         c.ranks = static_cast<int>(x);
       },
       [](const CaseConfig& c) { return std::to_string(c.ranks); }},
      {"seed", "int", "Seed for randomized inputs.",
       [](CaseConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_int(v)); },
       [](const CaseConfig& c) { return std::to_string(c.seed); }},
      {"mesh.origin", "real[3]", "Lower corner of the box.",
       [](CaseConfig& c, const std::string& v) { c.origin = real_list<3>(v); },
       [](const CaseConfig& c) { return fmt_list(c.origin); }},
      {"mesh.extent", "real[3]", "Box edge lengths; a `pi` suffix multiplies by pi (e.g. `2pi`).",
       [](CaseConfig& c, const std::string& v) {
         c.extent = real_list<3>(v);
         for (double x : c.extent)
           if (!(x > 0.0)) throw BadValue{"extents must be positive"};
       },
       [](const CaseConfig& c) { return fmt_list(c.extent); }},
      {"mesh.counts", "int[3]", "Elements per direction.",
       [](CaseConfig& c, const std::string& v) {
         const auto r = real_list<3>(v);
         for (int d = 0; d < 3; ++d) {
           if (r[d] < 1 || r[d] != std::floor(r[d])) throw BadValue{"element counts must be positive integers"};
           c.counts[d] = static_cast<int>(r[d]);
         }
       },
       [](const CaseConfig& c) { return fmt_list(c.counts); }},
      {"mesh.order", "int", "Polynomial order N.",
       [](CaseConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 1) throw BadValue{"mesh.order must be >= 1"};
         c.order = static_cast<int>(x);
       },
       [](const CaseConfig& c) { return std::to_string(c.order); }},
      {"mesh.bc", "bc[1|3|6]",
       "Boundary kinds (periodic, dirichlet, outflow): one for all faces, one per axis, or one per face "
       "(-x +x -y +y -z +z).",
       [](CaseConfig& c, const std::string& v) {
         const auto t = tokens(v);
         if (t.size() == 1) {
           c.bc.fill(to_bc(t[0]));
         } else if (t.size() == 3) {
           for (int d = 0; d < 3; ++d) c.bc[2 * d] = c.bc[2 * d + 1] = to_bc(t[d]);
         } else if (t.size() == 6) {
           for (int f = 0; f < 6; ++f) c.bc[f] = to_bc(t[f]);
         } else {
           throw BadValue{"mesh.bc expects 1, 3 or 6 entries"};
         }
         for (int d = 0; d < 3; ++d)
           if ((c.bc[2 * d] == BoundaryKind::periodic) != (c.bc[2 * d + 1] == BoundaryKind::periodic))
             throw BadValue{"periodic faces must come in pairs"};
       },
       [](const CaseConfig& c) {
         std::string s;
         for (int f = 0; f < 6; ++f) s += std::string(f ? " " : "") + bc_name(c.bc[f]);
         return s;
       }},
      {"mesh.deform", "none|trilinear|sine", "Smooth mapping applied to the box.",
       [](CaseConfig& c, const std::string& v) { c.deform = choice(v, {"none", "trilinear", "sine"}); },
       [](const CaseConfig& c) { return c.deform; }},
      {"mesh.deform_amplitude", "real", "Relative amplitude of the mapping.",
       [](CaseConfig& c, const std::string& v) { c.deform_amplitude = to_real(v); },
       [](const CaseConfig& c) { return fmt(c.deform_amplitude); }},
      {"partition.method", "rsb|rcb", "Element partitioner.",
       [](CaseConfig& c, const std::string& v) { c.partition = choice(v, {"rsb", "rcb"}); },
       [](const CaseConfig& c) { return c.partition; }},
      {"time.dt", "real", "Time step (required for flow cases).",
       [](CaseConfig& c, const std::string& v) {
         c.dt = to_real(v);
         if (!(c.dt > 0.0)) throw BadValue{"time.dt must be positive"};
       },
       [](const CaseConfig& c) { return fmt(c.dt); }},
      {"time.steps", "int", "Number of steps (required for flow cases).",
       [](CaseConfig& c, const std::string& v) {
         c.steps = to_int(v);
         if (c.steps < 0) throw BadValue{"time.steps must be >= 0"};
       },
       [](const CaseConfig& c) { return std::to_string(c.steps); }},
      {"time.scheme", "bdfext|char", "BDFk/EXTk or characteristics (RK4 subcycling) advection.",
       [](CaseConfig& c, const std::string& v) { c.scheme = choice(v, {"bdfext", "char"}); },
       [](const CaseConfig& c) { return c.scheme; }},
      {"time.order", "int", "Temporal order k (1..3; at most 2 with characteristics).",
       [](CaseConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 1 || x > 3) throw BadValue{"time.order must be 1, 2 or 3"};
         c.time_order = static_cast<int>(x);
       },
       [](const CaseConfig& c) { return std::to_string(c.time_order); }},
      {"time.char_substeps", "int", "Minimum RK4 substeps per characteristics interval.",
       [](CaseConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 1) throw BadValue{"time.char_substeps must be >= 1"};
         c.char_substeps = static_cast<int>(x);
       },
       [](const CaseConfig& c) { return std::to_string(c.char_substeps); }},
      {"flow.Re", "real", "Reynolds number.",
       [](CaseConfig& c, const std::string& v) {
         c.Re = to_real(v);
         if (!(c.Re > 0.0)) throw BadValue{"flow.Re must be positive"};
       },
       [](const CaseConfig& c) { return fmt(c.Re); }},
      {"flow.ic", "zero|taylor_green|file:<path>", "Initial condition.",
       [](CaseConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t.rfind("file:", 0) == 0 && t.size() > 5)
           c.ic = t;
         else
           c.ic = choice(t, {"zero", "taylor_green"});
       },
       [](const CaseConfig& c) { return c.ic; }},
      {"flow.forcing", "real[3]", "Constant body force.",
       [](CaseConfig& c, const std::string& v) { c.forcing = real_list<3>(v); },
       [](const CaseConfig& c) { return fmt_list(c.forcing); }},
      {"pressure.smoother", "jacobi|cheby_jac|asm|ras|cheby_asm|cheby_ras", "Multigrid smoother.",
       [](CaseConfig& c, const std::string& v) {
         c.smoother = choice(v, {"jacobi", "cheby_jac", "asm", "ras", "cheby_asm", "cheby_ras"});
       },
       [](const CaseConfig& c) { return c.smoother; }},
      {"pressure.cheby_degree", "int", "Chebyshev degree.",
       [](CaseConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 1) throw BadValue{"pressure.cheby_degree must be >= 1"};
         c.cheby_degree = static_cast<int>(x);
       },
       [](const CaseConfig& c) { return std::to_string(c.cheby_degree); }},
      {"pressure.precision", "64|32", "Floating-point width of the smoother.",
       [](CaseConfig& c, const std::string& v) { c.precision = std::stoi(choice(v, {"64", "32"})); },
       [](const CaseConfig& c) { return std::to_string(c.precision); }},
      {"pressure.tol", "real", "Relative residual tolerance of the pressure solve.",
       [](CaseConfig& c, const std::string& v) {
         c.pressure_tol = to_real(v);
         if (!(c.pressure_tol > 0.0)) throw BadValue{"pressure.tol must be positive"};
       },
       [](const CaseConfig& c) { return fmt(c.pressure_tol); }},
      {"pressure.max_iter", "int", "Iteration limit of the pressure solve.",
       [](CaseConfig& c, const std::string& v) { c.pressure_max_iter = static_cast<int>(to_int(v)); },
       [](const CaseConfig& c) { return std::to_string(c.pressure_max_iter); }},
      {"velocity.tol", "real", "Relative residual tolerance of the Helmholtz solves.",
       [](CaseConfig& c, const std::string& v) {
         c.velocity_tol = to_real(v);
         if (!(c.velocity_tol > 0.0)) throw BadValue{"velocity.tol must be positive"};
       },
       [](const CaseConfig& c) { return fmt(c.velocity_tol); }},
      {"velocity.max_iter", "int", "Iteration limit of the Helmholtz solves.",
       [](CaseConfig& c, const std::string& v) { c.velocity_max_iter = static_cast<int>(to_int(v)); },
       [](const CaseConfig& c) { return std::to_string(c.velocity_max_iter); }},
      {"projection.capacity", "int", "Stored solutions for pressure initial guesses (0 disables).",
       [](CaseConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 0) throw BadValue{"projection.capacity must be >= 0"};
         c.projection_capacity = static_cast<int>(x);
       },
       [](const CaseConfig& c) { return std::to_string(c.projection_capacity); }},
      {"kernel.advection.variant", "auto|blocked2d|full3d", "Dealiased advection kernel.",
       [](CaseConfig& c, const std::string& v) { c.advection_variant = choice(v, {"auto", "blocked2d", "full3d"}); },
       [](const CaseConfig& c) { return c.advection_variant; }},
      {"kernel.nq", "int", "Dealiasing points per direction (0: ceil(3(N+1)/2)).",
       [](CaseConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 0) throw BadValue{"kernel.nq must be >= 0"};
         c.nq = static_cast<int>(x);
       },
       [](const CaseConfig& c) { return std::to_string(c.nq); }},
      {"gs.latency_us", "real", "Simulated message latency.",
       [](CaseConfig& c, const std::string& v) { c.gs_latency_us = to_real(v); },
       [](const CaseConfig& c) { return fmt(c.gs_latency_us); }},
      {"gs.bandwidth_bytes_per_us", "real", "Simulated link bandwidth.",
       [](CaseConfig& c, const std::string& v) {
         c.gs_bandwidth = to_real(v);
         if (!(c.gs_bandwidth > 0.0)) throw BadValue{"bandwidth must be positive"};
       },
       [](const CaseConfig& c) { return fmt(c.gs_bandwidth); }},
      {"gs.strategy", "auto|pairwise|crystal_router|all_reduce", "Exchange strategy (auto: timed trials).",
       [](CaseConfig& c, const std::string& v) {
         c.gs_strategy = choice(v, {"auto", "pairwise", "crystal_router", "all_reduce"});
       },
       [](const CaseConfig& c) { return c.gs_strategy; }},
      {"gs.trials", "int", "Timed exchanges per strategy during autotuning.",
       [](CaseConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 1) throw BadValue{"gs.trials must be >= 1"};
         c.gs_trials = static_cast<int>(x);
       },
       [](const CaseConfig& c) { return std::to_string(c.gs_trials); }},
      {"report.window", "auto|first-last", "Steps averaged for t_step (auto: 101-200, or the second half).",
       [](CaseConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t != "auto") {
           const auto dash = t.find('-');
           if (dash == std::string::npos) throw BadValue{"report.window expects auto or first-last"};
           const auto a = to_int(t.substr(0, dash)), b = to_int(t.substr(dash + 1));
           if (a < 1 || b < a) throw BadValue{"report.window needs 1 <= first <= last"};
         }
         c.report_window = t;
       },
       [](const CaseConfig& c) { return c.report_window; }},
  };
  return defs;
}

const KeyDef* find_key(const std::string& k) {
  for (const auto& d : keys())
    if (k == d.key) return &d;
  return nullptr;
}

}  // namespace

void set_config_value(CaseConfig& cfg, const std::string& key, const std::string& value) {
  const KeyDef* d = find_key(key);
  if (!d) throw ConfigError(0, "unknown key '" + key + "'");
  try {
    d->set(cfg, value);
  } catch (const BadValue& e) {
    throw ConfigError(0, key + ": " + e.what);
  }
}

CaseConfig parse_config(const std::string& text) {
  CaseConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const KeyDef* d = find_key(key);
    if (!d) throw ConfigError(lineno, "unknown key '" + key + "'");
    if (seen.count(key)) throw ConfigError(lineno, "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(lineno, "missing value for '" + key + "'");
    try {
      d->set(cfg, value);
    } catch (const BadValue& e) {
      throw ConfigError(lineno, key + ": " + e.what);
    }
    seen[key] = lineno;
  }
  if (cfg.case_type == "flow") {
    for (const char* req : {"time.dt", "time.steps"})
      if (!seen.count(req)) throw ConfigError(0, std::string("missing required key '") + req + "'");
  }
  if (cfg.scheme == "char" && cfg.time_order > 2) {
    const int l = seen.count("time.order") ? seen["time.order"] : seen["time.scheme"];
    throw ConfigError(l, "time.scheme = char supports time.order <= 2");
  }
  return cfg;
}

CaseConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> CaseConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& d : keys()) out.emplace_back(d.key, d.get(*this));
  return out;
}

std::string config_reference() {
  const CaseConfig defaults;
  std::ostringstream o;
  o << "# Case configuration keys\n\n";
  o << "Lines are `key = value`; `#` starts a comment. Unknown keys are rejected.\n\n";
  o << "| key | type | default | description |\n|---|---|---|---|\n";
  for (const auto& d : keys()) {
    std::string def = d.get(defaults);
    if (std::string(d.key) == "time.dt" || std::string(d.key) == "time.steps") def = "(required)";
    o << "| `" << d.key << "` | " << d.type << " | `" << def << "` | " << d.doc << " |\n";
  }
  return o.str();
}

BoxSpec box_spec(const CaseConfig& cfg) {
  BoxSpec s;
  s.origin = cfg.origin;
  s.extent = cfg.extent;
  s.counts = cfg.counts;
  s.order = cfg.order;
  s.bc = cfg.bc;
  const Point3 o = cfg.origin, L = cfg.extent;
  const double a = cfg.deform_amplitude;
  if (cfg.deform == "trilinear") {
    s.deformation = [o, L, a](const Point3& p) {
      const double u = (p[0] - o[0]) / L[0], v = (p[1] - o[1]) / L[1], w = (p[2] - o[2]) / L[2];
      return Point3{p[0] + a * L[0] * v * w, p[1] + a * L[1] * u * w, p[2] + a * L[2] * u * v};
    };
  } else if (cfg.deform == "sine") {
    s.deformation = [o, L, a](const Point3& p) {
      const double pi = std::numbers::pi;
      const double u = (p[0] - o[0]) / L[0], v = (p[1] - o[1]) / L[1], w = (p[2] - o[2]) / L[2];
      const double b = a * std::sin(pi * u) * std::sin(pi * v) * std::sin(pi * w);
      return Point3{p[0] + b * L[0], p[1] + b * L[1], p[2] + b * L[2]};
    };
  }
  return s;
}

}  // namespace nekmini
