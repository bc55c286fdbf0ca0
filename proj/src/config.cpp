// SPDX-License-Identifier: Apache-2.0

#include "degenlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "degenlab/errors.hpp"
#include "degenlab/parabolic.hpp"

namespace degenlab {

using json = nlohmann::json;

std::string kind_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Elliptic: return "elliptic";
    case ProblemKind::ResolventScan: return "resolvent-scan";
    case ProblemKind::Parabolic: return "parabolic";
    case ProblemKind::Nonlinear: return "nonlinear";
    case ProblemKind::PollutantDemo: return "pollutant-demo";
  }
  return "elliptic";
}

ProblemKind kind_from_name(const std::string& name) {
  if (name == "elliptic") return ProblemKind::Elliptic;
  if (name == "resolvent-scan") return ProblemKind::ResolventScan;
  if (name == "parabolic") return ProblemKind::Parabolic;
  if (name == "nonlinear") return ProblemKind::Nonlinear;
  if (name == "pollutant-demo") return ProblemKind::PollutantDemo;
  throw SchemaError("kind", "unknown problem kind '" + name + "'");
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw SchemaError(path, what); }

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  return v;
}

const json& expect_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(join(path, item.key()), "unknown key '" + item.key() + "'");
  }
}

bool has(const json& obj, const char* key) { return obj.contains(key); }

double get_number(const json& obj, const std::string& path, const char* key) {
  if (!has(obj, key)) fail(join(path, key), "missing required number");
  if (!obj[key].is_number()) fail(join(path, key), "expected a number");
  return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!has(obj, key)) return fallback;
  if (!obj[key].is_number()) fail(join(path, key), "expected a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key) {
  if (!has(obj, key) || !obj[key].is_number_integer()) fail(join(path, key), "expected an integer");
  return obj[key].get<int>();
}

int get_int_or(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!has(obj, key)) return fallback;
  if (!obj[key].is_number_integer()) fail(join(path, key), "expected an integer");
  return obj[key].get<int>();
}

bool get_bool_or(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!has(obj, key)) return fallback;
  if (!obj[key].is_boolean()) fail(join(path, key), "expected a boolean");
  return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
  if (!has(obj, key) || !obj[key].is_string()) fail(join(path, key), "expected a string");
  return obj[key].get<std::string>();
}

std::string get_string_or(const json& obj, const std::string& path, const char* key,
                          const std::string& fallback) {
  if (!has(obj, key)) return fallback;
  if (!obj[key].is_string()) fail(join(path, key), "expected a string");
  return obj[key].get<std::string>();
}

Complex parse_complex(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(path, "complex values are [re, im] pairs");
  return {v[0].get<double>(), v[1].get<double>()};
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

double checked_alpha(double alpha, const std::string& path) {
  if (!(alpha >= 0.0 && alpha < 1.0)) fail(path, "alpha must be < 1 (and >= 0)");
  return alpha;
}

std::vector<AxisConfig> parse_axes(const json& grid, const std::string& path) {
  expect_object(grid, path);
  check_keys(grid, path, {"axes"});
  if (!has(grid, "axes")) fail(join(path, "axes"), "missing axis list");
  const json& axes = expect_array(grid["axes"], join(path, "axes"));
  if (axes.empty() || axes.size() > 3) fail(join(path, "axes"), "grid needs 1 to 3 axes");
  std::vector<AxisConfig> out;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const std::string apath = at(join(path, "axes"), i);
    expect_object(axes[i], apath);
    check_keys(axes[i], apath, {"alpha", "b", "cells"});
    AxisConfig ax;
    ax.alpha = checked_alpha(get_number_or(axes[i], apath, "alpha", 0.0), join(apath, "alpha"));
    ax.b = get_number_or(axes[i], apath, "b", 1.0);
    if (!(ax.b > 0.0)) fail(join(apath, "b"), "axis length must be positive");
    ax.cells = get_int(axes[i], apath, "cells");
    if (ax.cells < 2) fail(join(apath, "cells"), "need at least 2 cells");
    out.push_back(ax);
  }
  return out;
}

std::vector<Complex> parse_coeff_list(const json& arr, const std::string& path, std::size_t expected) {
  std::vector<Complex> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_complex(arr[i], at(path, i)));
  if (out.size() != expected) fail(path, "expected " + std::to_string(expected) + " coefficients");
  return out;
}

BCAxisConfig parse_bc_axis(const json& v, const std::string& path) {
  expect_object(v, path);
  BCAxisConfig bc;
  if (has(v, "type")) {
    check_keys(v, path, {"type"});
    bc.type = get_string(v, path, "type");
    if (bc.type != "dirichlet" && bc.type != "neumann" && bc.type != "periodic")
      fail(join(path, "type"), "unknown boundary condition type '" + bc.type + "'");
    return bc;
  }
  check_keys(v, path, {"m", "alpha_coeffs", "beta_coeffs"});
  bc.type = "custom";
  if (!has(v, "m") || !v["m"].is_array() || v["m"].size() != 2)
    fail(join(path, "m"), "expected the order pair [m1, m2]");
  for (int j = 0; j < 2; ++j) {
    if (!v["m"][static_cast<std::size_t>(j)].is_number_integer())
      fail(join(path, "m"), "orders must be integers");
    bc.m[static_cast<std::size_t>(j)] = v["m"][static_cast<std::size_t>(j)].get<int>();
    if (bc.m[static_cast<std::size_t>(j)] != 0 && bc.m[static_cast<std::size_t>(j)] != 1)
      fail(join(path, "m"), "orders must be 0 or 1");
  }
  for (const char* key : {"alpha_coeffs", "beta_coeffs"}) {
    if (!has(v, key) || !v[key].is_array() || v[key].size() != 2)
      fail(join(path, key), "expected two coefficient lists");
  }
  for (int j = 0; j < 2; ++j) {
    const auto expected = static_cast<std::size_t>(bc.m[static_cast<std::size_t>(j)] + 1);
    bc.alpha_coeffs[static_cast<std::size_t>(j)] = parse_coeff_list(
        v["alpha_coeffs"][static_cast<std::size_t>(j)], at(join(path, "alpha_coeffs"), j), expected);
    bc.beta_coeffs[static_cast<std::size_t>(j)] = parse_coeff_list(
        v["beta_coeffs"][static_cast<std::size_t>(j)], at(join(path, "beta_coeffs"), j), expected);
  }
  return bc;
}

std::vector<BCAxisConfig> parse_bc(const json& v, const std::string& path, std::size_t n_axes) {
  const json& arr = expect_array(v, path);
  if (arr.empty()) fail(path, "boundary condition list is empty");
  std::vector<BCAxisConfig> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_bc_axis(arr[i], at(path, i)));
  if (out.size() == 1 && n_axes > 1) out.resize(n_axes, out.front());
  if (out.size() != n_axes) fail(path, "boundary condition list does not match the axis count");
  return out;
}

MatrixConfig parse_matrix(const json& v, const std::string& path, int m) {
  expect_object(v, path);
  MatrixConfig mat;
  mat.type = get_string(v, path, "type");
  if (mat.type == "zero") {
    check_keys(v, path, {"type"});
  } else if (mat.type == "identity") {
    check_keys(v, path, {"type", "scale"});
    mat.scale = has(v, "scale") ? parse_complex(v["scale"], join(path, "scale")) : Complex(1.0, 0.0);
  } else if (mat.type == "matrix") {
    check_keys(v, path, {"type", "values"});
    if (!has(v, "values")) fail(join(path, "values"), "missing matrix values");
    const json& rows = expect_array(v["values"], join(path, "values"));
    if (rows.size() != static_cast<std::size_t>(m)) fail(join(path, "values"), "matrix must be m x m");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::string rpath = at(join(path, "values"), r);
      const json& row = expect_array(rows[r], rpath);
      if (row.size() != static_cast<std::size_t>(m)) fail(rpath, "matrix must be m x m");
      std::vector<Complex> entries;
      for (std::size_t c = 0; c < row.size(); ++c) entries.push_back(parse_complex(row[c], at(rpath, c)));
      mat.values.push_back(std::move(entries));
    }
  } else {
    fail(join(path, "type"), "matrix type must be zero, identity, or matrix");
  }
  return mat;
}

ForcingConfig parse_forcing(const json& v, const std::string& path) {
  expect_object(v, path);
  ForcingConfig f;
  f.type = get_string(v, path, "type");
  if (f.type == "constant") {
    check_keys(v, path, {"type", "value"});
    if (has(v, "value")) f.value = parse_complex(v["value"], join(path, "value"));
  } else if (f.type == "random") {
    check_keys(v, path, {"type"});
  } else if (f.type == "tau-sine") {
    check_keys(v, path, {"type", "amplitude", "omega"});
    f.amplitude = get_number_or(v, path, "amplitude", 1.0);
    f.omega = get_number_or(v, path, "omega", 0.0);
  } else {
    fail(join(path, "type"), "forcing type must be constant, random, or tau-sine");
  }
  return f;
}

SectorConfig parse_sector(const json& v, const std::string& path) {
  expect_object(v, path);
  check_keys(v, path, {"phi", "mod_min", "mod_max", "n_moduli", "n_rays", "include_zero"});
  SectorConfig s;
  s.phi = get_number_or(v, path, "phi", s.phi);
  if (!(s.phi > 0.0 && s.phi < M_PI)) fail(join(path, "phi"), "sector half-angle must lie in (0, pi)");
  s.mod_min = get_number_or(v, path, "mod_min", s.mod_min);
  s.mod_max = get_number_or(v, path, "mod_max", s.mod_max);
  if (!(s.mod_min > 0.0) || !(s.mod_max >= s.mod_min))
    fail(join(path, "mod_min"), "moduli bounds must satisfy 0 < mod_min <= mod_max");
  s.n_moduli = get_int_or(v, path, "n_moduli", s.n_moduli);
  s.n_rays = get_int_or(v, path, "n_rays", s.n_rays);
  if (s.n_moduli < 1 || s.n_rays < 1) fail(join(path, "n_moduli"), "sample counts must be positive");
  s.include_zero = get_bool_or(v, path, "include_zero", false);
  return s;
}

TimeConfig parse_time(const json& v, const std::string& path) {
  expect_object(v, path);
  check_keys(v, path, {"T", "steps", "scheme", "snapshots"});
  TimeConfig t;
  t.T = get_number(v, path, "T");
  if (!(t.T > 0.0)) fail(join(path, "T"), "horizon T must be positive");
  t.steps = get_int(v, path, "steps");
  if (t.steps < 1) fail(join(path, "steps"), "steps must be positive");
  t.scheme = get_string_or(v, path, "scheme", "implicit-euler");
  if (t.scheme != "implicit-euler" && t.scheme != "crank-nicolson")
    fail(join(path, "scheme"), "scheme must be implicit-euler or crank-nicolson");
  t.snapshots = get_string_or(v, path, "snapshots", "last");
  if (t.snapshots != "last" && t.snapshots != "all" && t.snapshots.rfind("every:", 0) != 0)
    fail(join(path, "snapshots"), "snapshots must be last, all, or every:N");
  return t;
}

NonlinearConfig parse_nonlinear(const json& v, const std::string& path, bool with_model) {
  expect_object(v, path);
  if (with_model)
    check_keys(v, path, {"r", "tol", "max_outer", "d", "model"});
  else
    check_keys(v, path, {"r", "tol", "max_outer"});
  NonlinearConfig n;
  n.r = get_number_or(v, path, "r", n.r);
  n.tol = get_number_or(v, path, "tol", n.tol);
  n.max_outer = get_int_or(v, path, "max_outer", n.max_outer);
  if (!(n.r > 0.0)) fail(join(path, "r"), "ball radius must be positive");
  if (!(n.tol >= 1e-12)) fail(join(path, "tol"), "tolerance must be at least 1e-12");
  if (n.max_outer < 1) fail(join(path, "max_outer"), "max_outer must be positive");
  if (with_model) {
    n.d = get_number_or(v, path, "d", 0.0);
    if (n.d < 0.0) fail(join(path, "d"), "shift d must be nonnegative");
    if (has(v, "model")) {
      const std::string mpath = join(path, "model");
      expect_object(v["model"], mpath);
      check_keys(v["model"], mpath, {"type", "a0", "epsilon", "f0"});
      n.model.type = get_string_or(v["model"], mpath, "type", "toy-quadratic");
      if (n.model.type != "toy-quadratic") fail(join(mpath, "type"), "only toy-quadratic is configurable");
      if (has(v["model"], "a0")) n.model.a0 = parse_complex(v["model"]["a0"], join(mpath, "a0"));
      n.model.epsilon = get_number_or(v["model"], mpath, "epsilon", 0.0);
      if (has(v["model"], "f0")) n.model.f0 = parse_complex(v["model"]["f0"], join(mpath, "f0"));
    }
  }
  return n;
}

PollutantConfig parse_pollutant(const json& doc) {
  PollutantConfig p;
  p.species = get_int_or(doc, "", "species", 3);
  if (p.species != 3) fail("species", "the demo models exactly 3 species");

  const std::string gpath = "grid";
  expect_object(doc["grid"], gpath);
  check_keys(doc["grid"], gpath, {"cells", "b"});
  const json& cells = expect_array(doc["grid"]["cells"], join(gpath, "cells"));
  if (cells.size() != 3) fail(join(gpath, "cells"), "expected 3 cell counts");
  for (std::size_t k = 0; k < 3; ++k) {
    if (!cells[k].is_number_integer()) fail(at(join(gpath, "cells"), k), "expected an integer");
    p.cells[k] = cells[k].get<int>();
    if (p.cells[k] < 2) fail(at(join(gpath, "cells"), k), "need at least 2 cells");
    if (p.cells[k] > 32) fail(at(join(gpath, "cells"), k), "demo grids are capped at 32 cells per axis");
  }
  if (has(doc["grid"], "b")) {
    const json& b = expect_array(doc["grid"]["b"], join(gpath, "b"));
    if (b.size() != 3) fail(join(gpath, "b"), "expected 3 axis lengths");
    for (std::size_t k = 0; k < 3; ++k) {
      if (!b[k].is_number()) fail(at(join(gpath, "b"), k), "expected a number");
      p.lengths[k] = b[k].get<double>();
      if (!(p.lengths[k] > 0.0)) fail(at(join(gpath, "b"), k), "axis length must be positive");
    }
  }

  const json& alpha = expect_array(doc["alpha"], "alpha");
  if (alpha.size() != 3) fail("alpha", "expected 3 exponents");
  for (std::size_t k = 0; k < 3; ++k) {
    if (!alpha[k].is_number()) fail(at("alpha", k), "expected a number");
    p.alpha[k] = checked_alpha(alpha[k].get<double>(), at("alpha", k));
  }

  // diffusion: scalar, per-axis, or per-axis-per-species
  const json& diff = doc["diffusion"];
  if (diff.is_number()) {
    for (auto& row : p.diffusion) row.fill(diff.get<double>());
  } else if (diff.is_array() && diff.size() == 3 && diff[0].is_number()) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (!diff[k].is_number()) fail(at("diffusion", k), "expected a number");
      p.diffusion[k].fill(diff[k].get<double>());
    }
  } else if (diff.is_array() && diff.size() == 3) {
    for (std::size_t k = 0; k < 3; ++k) {
      const json& row = expect_array(diff[k], at("diffusion", k));
      if (row.size() != 3) fail(at("diffusion", k), "expected 3 species diffusivities");
      for (std::size_t i = 0; i < 3; ++i) {
        if (!row[i].is_number()) fail(at(at("diffusion", k), i), "expected a number");
        p.diffusion[k][i] = row[i].get<double>();
      }
    }
  } else {
    fail("diffusion", "expected a number, 3 numbers, or a 3x3 table");
  }
  for (const auto& row : p.diffusion)
    for (double v : row)
      if (!(v > 0.0)) fail("diffusion", "diffusivities must be positive");

  if (has(doc, "wind")) {
    const json& wind = expect_array(doc["wind"], "wind");
    if (wind.size() != 3) fail("wind", "expected 3 wind components");
    for (std::size_t k = 0; k < 3; ++k) {
      if (!wind[k].is_number()) fail(at("wind", k), "expected a number");
      p.wind[k] = wind[k].get<double>();
    }
  }
  if (has(doc, "coupling_d")) {
    const json& d = expect_array(doc["coupling_d"], "coupling_d");
    if (d.size() != 3) fail("coupling_d", "expected 3 coupling constants");
    for (std::size_t k = 0; k < 3; ++k) {
      if (!d[k].is_number()) fail(at("coupling_d", k), "expected a number");
      p.coupling_d[k] = d[k].get<double>();
    }
  }
  if (has(doc, "reactions")) {
    expect_object(doc["reactions"], "reactions");
    check_keys(doc["reactions"], "reactions", {"type", "rates"});
    p.reactions.type = get_string_or(doc["reactions"], "reactions", "type", "none");
    if (p.reactions.type != "none" && p.reactions.type != "chapman-toy" && p.reactions.type != "exchange-toy")
      fail("reactions.type", "unknown reaction mechanism '" + p.reactions.type + "'");
    if (has(doc["reactions"], "rates")) {
      const json& rates = expect_array(doc["reactions"]["rates"], "reactions.rates");
      if (rates.size() != 2) fail("reactions.rates", "expected two rate constants");
      for (std::size_t i = 0; i < 2; ++i) {
        if (!rates[i].is_number()) fail(at("reactions.rates", i), "expected a number");
        p.reactions.rates[i] = rates[i].get<double>();
      }
    }
  }
  if (has(doc, "sources")) {
    const json& sources = expect_array(doc["sources"], "sources");
    if (sources.size() > 3) fail("sources", "at most one source per species");
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const std::string spath = at("sources", i);
      expect_object(sources[i], spath);
      check_keys(sources[i], spath, {"amplitude", "center", "width"});
      p.sources[i].amplitude = get_number_or(sources[i], spath, "amplitude", 0.0);
      p.sources[i].width = get_number_or(sources[i], spath, "width", 0.1);
      if (!(p.sources[i].width > 0.0)) fail(join(spath, "width"), "source width must be positive");
      if (has(sources[i], "center")) {
        const json& c = expect_array(sources[i]["center"], join(spath, "center"));
        if (c.size() != 3) fail(join(spath, "center"), "expected 3 coordinates");
        for (std::size_t k = 0; k < 3; ++k) {
          if (!c[k].is_number()) fail(at(join(spath, "center"), k), "expected a number");
          p.sources[i].center[k] = c[k].get<double>();
        }
      }
    }
  }

  p.bc = parse_bc(doc["bc"], "bc", 3);
  p.time = parse_time(doc["time"], "time");
  if (has(doc, "nonlinear")) {
    const NonlinearConfig n = parse_nonlinear(doc["nonlinear"], "nonlinear", /*with_model=*/false);
    p.r = n.r;
    p.tol = n.tol;
    p.max_outer = n.max_outer;
  }
  return p;
}

std::uint64_t parse_seed(const json& doc) {
  if (!has(doc, "seed")) return 0;
  if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
    fail("seed", "expected a nonnegative integer");
  const auto value = doc["seed"].get<std::int64_t>();
  if (value < 0) fail("seed", "expected a nonnegative integer");
  return static_cast<std::uint64_t>(value);
}

NormSpec parse_norms(const json& doc) {
  NormSpec norms;
  if (!has(doc, "norms")) return norms;
  expect_object(doc["norms"], "norms");
  check_keys(doc["norms"], "norms", {"p", "p0"});
  norms.spatial_p = get_number_or(doc["norms"], "norms", "p", 2.0);
  norms.temporal_p0 = get_number_or(doc["norms"], "norms", "p0", 2.0);
  if (!(norms.spatial_p >= 1.0) || !std::isfinite(norms.spatial_p))
    fail("norms.p", "p must be finite and >= 1");
  if (!(norms.temporal_p0 >= 1.0) || !std::isfinite(norms.temporal_p0))
    fail("norms.p0", "p0 must be finite and >= 1");
  return norms;
}

} // namespace

RunConfig parse_config(const json& doc) {
  expect_object(doc, "");
  if (!has(doc, "kind")) fail("kind", "missing problem kind");
  RunConfig config;
  config.kind = kind_from_name(get_string(doc, "", "kind"));
  config.seed = parse_seed(doc);

  if (config.kind == ProblemKind::PollutantDemo) {
    check_keys(doc, "",
               {"kind", "seed", "species", "grid", "alpha", "diffusion", "wind", "coupling_d", "reactions",
                "sources", "bc", "time", "nonlinear"});
    for (const char* key : {"grid", "alpha", "diffusion", "bc", "time"})
      if (!has(doc, key)) fail(key, "missing required section");
    config.pollutant = parse_pollutant(doc);
    return config;
  }

  std::set<std::string> allowed = {"kind", "seed", "m", "grid", "bc", "coefficients", "norms"};
  switch (config.kind) {
    case ProblemKind::Elliptic:
      allowed.insert({"lambda", "forcing", "sector", "trials"});
      break;
    case ProblemKind::ResolventScan:
      allowed.insert({"sector", "p"});
      break;
    case ProblemKind::Parabolic:
      allowed.insert({"time", "shift_d", "forcing"});
      break;
    case ProblemKind::Nonlinear:
      allowed.insert({"time", "nonlinear"});
      break;
    default:
      break;
  }
  check_keys(doc, "", allowed);

  config.m = get_int_or(doc, "", "m", 1);
  if (config.m < 1) fail("m", "component count m must be positive");
  if (!has(doc, "grid")) fail("grid", "missing grid");
  config.axes = parse_axes(doc["grid"], "grid");
  if (!has(doc, "bc")) fail("bc", "missing boundary conditions");
  config.bc = parse_bc(doc["bc"], "bc", config.axes.size());
  config.norms = parse_norms(doc);

  const bool needs_coefficients = config.kind != ProblemKind::Nonlinear;
  if (has(doc, "coefficients")) {
    const std::string cpath = "coefficients";
    expect_object(doc["coefficients"], cpath);
    check_keys(doc["coefficients"], cpath, {"a", "A", "A_k"});
    if (!has(doc["coefficients"], "a")) fail(join(cpath, "a"), "missing per-axis coefficients");
    const json& a = expect_array(doc["coefficients"]["a"], join(cpath, "a"));
    for (std::size_t k = 0; k < a.size(); ++k)
      config.a.push_back(parse_complex(a[k], at(join(cpath, "a"), k)));
    if (config.a.size() == 1 && config.axes.size() > 1) config.a.resize(config.axes.size(), config.a[0]);
    if (config.a.size() != config.axes.size())
      fail(join(cpath, "a"), "coefficient list does not match the axis count");
    if (has(doc["coefficients"], "A"))
      config.A = parse_matrix(doc["coefficients"]["A"], join(cpath, "A"), config.m);
    if (has(doc["coefficients"], "A_k")) {
      const json& ak = expect_array(doc["coefficients"]["A_k"], join(cpath, "A_k"));
      if (ak.size() != config.axes.size())
        fail(join(cpath, "A_k"), "first-order term list does not match the axis count");
      for (std::size_t k = 0; k < ak.size(); ++k)
        config.A_k.push_back(parse_matrix(ak[k], at(join(cpath, "A_k"), k), config.m));
    }
  } else if (needs_coefficients) {
    fail("coefficients", "missing coefficients");
  } else {
    config.a.assign(config.axes.size(), Complex(-1.0, 0.0));
  }

  switch (config.kind) {
    case ProblemKind::Elliptic:
      if (has(doc, "lambda")) config.lambda = parse_complex(doc["lambda"], "lambda");
      if (has(doc, "forcing")) config.forcing = parse_forcing(doc["forcing"], "forcing");
      if (has(doc, "sector")) config.sector = parse_sector(doc["sector"], "sector");
      config.trials = get_int_or(doc, "", "trials", 5);
      if (config.trials < 0) fail("trials", "trials must be nonnegative");
      break;
    case ProblemKind::ResolventScan:
      config.sector = has(doc, "sector") ? parse_sector(doc["sector"], "sector") : SectorConfig{};
      config.resolvent_p = get_number_or(doc, "", "p", 2.0);
      if (!(config.resolvent_p >= 1.0) || !std::isfinite(config.resolvent_p))
        fail("p", "p must be finite and >= 1");
      break;
    case ProblemKind::Parabolic:
      if (!has(doc, "time")) fail("time", "missing time section");
      config.time = parse_time(doc["time"], "time");
      config.shift_d = get_number_or(doc, "", "shift_d", 0.0);
      if (config.shift_d < 0.0) fail("shift_d", "shift must be nonnegative");
      if (!has(doc, "forcing")) fail("forcing", "missing forcing");
      config.forcing = parse_forcing(doc["forcing"], "forcing");
      break;
    case ProblemKind::Nonlinear:
      if (config.m != 1) fail("m", "the configurable toy model is scalar (m = 1)");
      if (!has(doc, "time")) fail("time", "missing time section");
      config.time = parse_time(doc["time"], "time");
      if (!has(doc, "nonlinear")) fail("nonlinear", "missing nonlinear section");
      config.nonlinear = parse_nonlinear(doc["nonlinear"], "nonlinear", /*with_model=*/true);
      break;
    default:
      break;
  }
  return config;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw SchemaError(path.string(), "cannot open config file");
  json doc;
  try {
    is >> doc;
  } catch (const json::parse_error& err) {
    throw SchemaError(path.string(), std::string("invalid JSON: ") + err.what());
  }
  return parse_config(doc);
}

namespace {

json serialize_bc(const BCAxisConfig& bc) {
  if (bc.type != "custom") return json{{"type", bc.type}};
  json alpha = json::array(), beta = json::array();
  for (int j = 0; j < 2; ++j) {
    json ja = json::array(), jb = json::array();
    for (const Complex& c : bc.alpha_coeffs[static_cast<std::size_t>(j)]) ja.push_back(complex_json(c));
    for (const Complex& c : bc.beta_coeffs[static_cast<std::size_t>(j)]) jb.push_back(complex_json(c));
    alpha.push_back(ja);
    beta.push_back(jb);
  }
  return json{{"m", bc.m}, {"alpha_coeffs", alpha}, {"beta_coeffs", beta}};
}

json serialize_matrix(const MatrixConfig& mat) {
  if (mat.type == "zero") return json{{"type", "zero"}};
  if (mat.type == "identity") return json{{"type", "identity"}, {"scale", complex_json(mat.scale)}};
  json rows = json::array();
  for (const auto& row : mat.values) {
    json jr = json::array();
    for (const Complex& c : row) jr.push_back(complex_json(c));
    rows.push_back(jr);
  }
  return json{{"type", "matrix"}, {"values", rows}};
}

json serialize_forcing(const ForcingConfig& f) {
  if (f.type == "constant") return json{{"type", "constant"}, {"value", complex_json(f.value)}};
  if (f.type == "random") return json{{"type", "random"}};
  return json{{"type", "tau-sine"}, {"amplitude", f.amplitude}, {"omega", f.omega}};
}

json serialize_time(const TimeConfig& t) {
  return json{{"T", t.T}, {"steps", t.steps}, {"scheme", t.scheme}, {"snapshots", t.snapshots}};
}

} // namespace

json serialize(const RunConfig& config) {
  json doc;
  doc["kind"] = kind_name(config.kind);
  doc["seed"] = config.seed;

  if (config.kind == ProblemKind::PollutantDemo) {
    const PollutantConfig& p = *config.pollutant;
    doc["species"] = p.species;
    doc["grid"] = {{"cells", p.cells}, {"b", p.lengths}};
    doc["alpha"] = p.alpha;
    doc["diffusion"] = p.diffusion;
    doc["wind"] = p.wind;
    doc["coupling_d"] = p.coupling_d;
    doc["reactions"] = {{"type", p.reactions.type}, {"rates", p.reactions.rates}};
    json sources = json::array();
    for (const auto& s : p.sources)
      sources.push_back(json{{"amplitude", s.amplitude}, {"center", s.center}, {"width", s.width}});
    doc["sources"] = sources;
    json bc = json::array();
    for (const auto& b : p.bc) bc.push_back(serialize_bc(b));
    doc["bc"] = bc;
    doc["time"] = serialize_time(p.time);
    doc["nonlinear"] = {{"r", p.r}, {"tol", p.tol}, {"max_outer", p.max_outer}};
    return doc;
  }

  doc["m"] = config.m;
  json axes = json::array();
  for (const auto& ax : config.axes)
    axes.push_back(json{{"alpha", ax.alpha}, {"b", ax.b}, {"cells", ax.cells}});
  doc["grid"] = {{"axes", axes}};
  json bc = json::array();
  for (const auto& b : config.bc) bc.push_back(serialize_bc(b));
  doc["bc"] = bc;
  doc["norms"] = {{"p", config.norms.spatial_p}, {"p0", config.norms.temporal_p0}};

  if (config.kind != ProblemKind::Nonlinear) {
    json a = json::array();
    for (const Complex& c : config.a) a.push_back(complex_json(c));
    json coeffs{{"a", a}, {"A", serialize_matrix(config.A)}};
    if (!config.A_k.empty()) {
      json ak = json::array();
      for (const auto& m : config.A_k) ak.push_back(serialize_matrix(m));
      coeffs["A_k"] = ak;
    }
    doc["coefficients"] = coeffs;
  }

  switch (config.kind) {
    case ProblemKind::Elliptic:
      doc["lambda"] = complex_json(config.lambda);
      doc["forcing"] = serialize_forcing(config.forcing);
      if (config.sector) {
        const SectorConfig& s = *config.sector;
        doc["sector"] = {{"phi", s.phi},           {"mod_min", s.mod_min},
                         {"mod_max", s.mod_max},   {"n_moduli", s.n_moduli},
                         {"n_rays", s.n_rays},     {"include_zero", s.include_zero}};
      }
      doc["trials"] = config.trials;
      break;
    case ProblemKind::ResolventScan: {
      const SectorConfig s = config.sector.value_or(SectorConfig{});
      doc["sector"] = {{"phi", s.phi},           {"mod_min", s.mod_min},
                       {"mod_max", s.mod_max},   {"n_moduli", s.n_moduli},
                       {"n_rays", s.n_rays},     {"include_zero", s.include_zero}};
      doc["p"] = config.resolvent_p;
      break;
    }
    case ProblemKind::Parabolic:
      doc["time"] = serialize_time(*config.time);
      doc["shift_d"] = config.shift_d;
      doc["forcing"] = serialize_forcing(config.forcing);
      break;
    case ProblemKind::Nonlinear: {
      doc["time"] = serialize_time(*config.time);
      const NonlinearConfig& n = *config.nonlinear;
      doc["nonlinear"] = {{"r", n.r},
                          {"tol", n.tol},
                          {"max_outer", n.max_outer},
                          {"d", n.d},
                          {"model",
                           {{"type", n.model.type},
                            {"a0", complex_json(n.model.a0)},
                            {"epsilon", n.model.epsilon},
                            {"f0", complex_json(n.model.f0)}}}};
      break;
    }
    default:
      break;
  }
  return doc;
}

bool RunConfig::operator==(const RunConfig& other) const { return serialize(*this) == serialize(other); }

std::string config_hash(const RunConfig& config) {
  const std::string canonical = serialize(config).dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace degenlab
