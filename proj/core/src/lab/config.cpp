#include "wgstark/lab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "wgstark/errors.hpp"

namespace wgstark::lab {

namespace {

using Keys = std::set<std::string>;

void check_keys(const YAML::Node& node, const std::string& path, const Keys& allowed) {
  if (!node) return;
  if (!node.IsMap()) throw ConfigError(path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

bool is_auto(const YAML::Node& n) { return n && n.IsScalar() && n.as<std::string>() == "auto"; }

template <class T>
void read(const YAML::Node& parent, const char* key, const std::string& path, T& out) {
  const YAML::Node n = parent[key];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path + "." + key, "has the wrong type");
  }
}

template <class T>
void read_auto(const YAML::Node& parent, const char* key, const std::string& path, std::optional<T>& out) {
  const YAML::Node n = parent[key];
  if (!n) return;
  if (is_auto(n)) {
    out.reset();
    return;
  }
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path + "." + key, "expected a number or \"auto\"");
  }
}

void read_list(const YAML::Node& parent, const char* key, const std::string& path, std::vector<double>& out) {
  const YAML::Node n = parent[key];
  if (!n) return;
  if (!n.IsSequence()) throw ConfigError(path + "." + key, "expected a list");
  out.clear();
  for (std::size_t i = 0; i < n.size(); ++i) {
    try {
      out.push_back(n[i].as<double>());
    } catch (const YAML::Exception&) {
      throw ConfigError(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
    }
  }
}

void set_path(YAML::Node root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  YAML::Node parsed;
  try {
    parsed = YAML::Load(value);
  } catch (const YAML::Exception& e) {
    throw ConfigError(key, std::string("override value does not parse: ") + e.what());
  }
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  // yaml-cpp nodes are handles; walk with fresh handles so the tree is not aliased.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = chain.back()[parts[i]];
    if (!next.IsDefined() || next.IsNull()) chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
    chain.push_back(chain.back()[parts[i]]);
  }
  chain.back()[parts.back()] = parsed;
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("parse error: ") + e.what());
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) set_path(root, o);

  check_keys(root, "", {"geometry", "field", "distortion", "grid", "solver", "plateau", "confining", "output"});
  RunConfig c;

  const YAML::Node g = root["geometry"];
  check_keys(g, "geometry", {"d", "model"});
  if (g) {
    read(g, "d", "geometry", c.geometry.d);
    const YAML::Node m = g["model"];
    check_keys(m, "geometry.model", {"type", "alpha", "n"});
    if (m) {
      read(m, "type", "geometry.model", c.geometry.model);
      read(m, "alpha", "geometry.model", c.geometry.alpha);
      read(m, "n", "geometry.model", c.geometry.n);
    }
  }
  const YAML::Node f = root["field"];
  check_keys(f, "field", {"F", "F_list", "eta"});
  if (f) {
    read(f, "F", "field", c.field.F);
    read_list(f, "F_list", "field", c.field.F_list);
    read(f, "eta", "field", c.field.eta);
  }
  const YAML::Node d = root["distortion"];
  check_keys(d, "distortion", {"beta", "beta_list", "E", "deltaE", "sharpness"});
  if (d) {
    read(d, "beta", "distortion", c.distortion.beta);
    read_list(d, "beta_list", "distortion", c.distortion.beta_list);
    read_auto(d, "E", "distortion", c.distortion.E);
    read_auto(d, "deltaE", "distortion", c.distortion.deltaE);
    read(d, "sharpness", "distortion", c.distortion.sharpness);
  }
  const YAML::Node gr = root["grid"];
  check_keys(gr, "grid", {"L", "Ns", "Nu", "margin", "hs", "damping", "reference_L"});
  if (gr) {
    read_auto(gr, "L", "grid", c.grid.L);
    read_auto(gr, "Ns", "grid", c.grid.Ns);
    read(gr, "Nu", "grid", c.grid.Nu);
    read_auto(gr, "margin", "grid", c.grid.margin);
    read(gr, "hs", "grid", c.grid.hs);
    read(gr, "damping", "grid", c.grid.damping);
    read(gr, "reference_L", "grid", c.grid.reference_L);
  }
  const YAML::Node s = root["solver"];
  check_keys(s, "solver", {"method", "k", "tol", "max_iter", "workers"});
  if (s) {
    read(s, "method", "solver", c.solver.method);
    read(s, "k", "solver", c.solver.k);
    read(s, "tol", "solver", c.solver.tol);
    read(s, "max_iter", "solver", c.solver.max_iter);
    read(s, "workers", "solver", c.solver.workers);
  }
  const YAML::Node p = root["plateau"];
  check_keys(p, "plateau", {"drift_tol"});
  if (p) read(p, "drift_tol", "plateau", c.plateau.drift_tol);
  const YAML::Node cf = root["confining"];
  check_keys(cf, "confining", {"cap_offset", "L_list"});
  if (cf) {
    read(cf, "cap_offset", "confining", c.confining.cap_offset);
    read_list(cf, "L_list", "confining", c.confining.L_list);
  }
  const YAML::Node o = root["output"];
  check_keys(o, "output", {"dir", "formats"});
  if (o) {
    read(o, "dir", "output", c.output.dir);
    if (o["formats"]) {
      if (!o["formats"].IsSequence()) throw ConfigError("output.formats", "expected a list");
      c.output.formats.clear();
      for (const auto& x : o["formats"]) c.output.formats.push_back(x.as<std::string>());
    }
  }

  // Schema ranges.
  require(c.geometry.d > 0.0, "geometry.d", "must be positive");
  require(c.geometry.model == "rational" || c.geometry.model == "zero", "geometry.model.type",
          "must be \"rational\" or \"zero\"");
  require(c.geometry.n >= 1, "geometry.model.n", "must be >= 1");
  require(std::isfinite(c.geometry.alpha), "geometry.model.alpha", "must be finite");
  require(c.field.F >= 0.0 && c.field.F < 1.0, "field.F", "must satisfy 0 <= F < 1");
  for (std::size_t i = 0; i < c.field.F_list.size(); ++i) {
    const double v = c.field.F_list[i];
    require(v > 0.0 && v < 1.0, "field.F_list[" + std::to_string(i) + "]", "must satisfy 0 < F < 1");
  }
  require(std::isfinite(c.field.eta), "field.eta", "must be finite");
  require(c.distortion.beta >= 0.0, "distortion.beta", "must be >= 0");
  for (std::size_t i = 0; i < c.distortion.beta_list.size(); ++i) {
    require(c.distortion.beta_list[i] >= 0.0, "distortion.beta_list[" + std::to_string(i) + "]", "must be >= 0");
  }
  if (c.distortion.E) require(*c.distortion.E < 0.0, "distortion.E", "must be negative");
  if (c.distortion.deltaE) require(*c.distortion.deltaE > 0.0, "distortion.deltaE", "must be positive");
  if (c.distortion.E && c.distortion.deltaE) {
    require(*c.distortion.deltaE < 0.5 * std::min(1.0, std::abs(*c.distortion.E)), "distortion.deltaE",
            "must be below min(1, |E|)/2");
  }
  require(c.distortion.sharpness > 0.0, "distortion.sharpness", "must be positive");
  if (c.grid.L) require(*c.grid.L > 0.0, "grid.L", "must be positive");
  if (c.grid.Ns) require(*c.grid.Ns >= 3, "grid.Ns", "must be >= 3");
  require(c.grid.Nu >= 3, "grid.Nu", "must be >= 3");
  if (c.grid.margin) require(*c.grid.margin >= 0.0, "grid.margin", "must be >= 0");
  require(c.grid.hs > 0.0, "grid.hs", "must be positive");
  require(c.grid.damping > 0.0, "grid.damping", "must be positive");
  require(c.grid.reference_L > 0.0, "grid.reference_L", "must be positive");
  require(c.solver.method == "dense" || c.solver.method == "shift-invert", "solver.method",
          "must be \"dense\" or \"shift-invert\"");
  require(c.solver.k >= 1, "solver.k", "must be >= 1");
  require(c.solver.tol > 0.0, "solver.tol", "must be positive");
  require(c.solver.max_iter >= 1, "solver.max_iter", "must be >= 1");
  require(c.solver.workers >= 1, "solver.workers", "must be >= 1");
  require(c.plateau.drift_tol > 0.0, "plateau.drift_tol", "must be positive");
  require(c.confining.cap_offset > 0.0, "confining.cap_offset", "must be positive");
  require(!c.confining.L_list.empty(), "confining.L_list", "must not be empty");
  for (const auto& fmt : c.output.formats) {
    require(fmt == "csv" || fmt == "svg", "output.formats", "supported formats are csv and svg");
  }

  // Hypothesis and direction gates.
  const GeometrySetup geo = c.geometry_setup();
  const HypothesisReport rep = check_hypotheses(geo);
  if (!rep.h1_ok) {
    std::ostringstream os;
    os << "hypothesis h1 fails: d * sup|gamma| = " << c.geometry.d * rep.sup_abs_gamma << " >= 1";
    throw ConfigError("geometry.model.alpha", os.str());
  }
  if (!rep.h2_ok) {
    std::ostringstream os;
    os << "hypothesis h2 fails: fitted decay exponent " << rep.fitted_decay_exponent << " is not above 3";
    throw ConfigError("geometry.model.n", os.str());
  }
  // Config values are typed to about 9 digits, so the gate is coarser than
  // the 1e-9 used by classify_regime.
  const double a0 = total_bend(geo);
  constexpr double kTypedTol = 1e-8;
  for (double angle : {std::abs(c.field.eta), std::abs(c.field.eta - a0)}) {
    if (std::abs(angle - 0.5 * M_PI) < kTypedTol) {
      std::ostringstream os;
      os.precision(12);
      os << "boundary field direction: |eta| = " << std::abs(c.field.eta) << ", |eta - alpha0| = "
         << std::abs(c.field.eta - a0) << " (one equals pi/2)";
      throw ConfigError("field.eta", os.str());
    }
  }
  try {
    (void)classify_regime(c.field.eta, a0);
  } catch (const BoundaryDirection& e) {
    throw ConfigError("field.eta", e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

GeometrySetup RunConfig::geometry_setup() const {
  GeometrySetup g;
  g.width = geometry.d;
  g.model = geometry.model == "zero" ? CurvatureModel::zero() : CurvatureModel::rational(geometry.alpha, geometry.n);
  return g;
}

FieldConfig RunConfig::field_config() const { return {field.F, field.eta}; }

WaveguideSetup RunConfig::setup() const { return {geometry_setup(), field_config()}; }

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.method = solver.method == "dense" ? SolverOptions::Method::Dense : SolverOptions::Method::ShiftInvert;
  o.k = solver.k;
  o.tol = solver.tol;
  o.max_iter = solver.max_iter;
  return o;
}

bool RunConfig::wants(const std::string& format) const {
  for (const auto& f : output.formats) {
    if (f == format) return true;
  }
  return false;
}

std::string RunConfig::to_yaml() const {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  auto opt = [&](const auto& v) {
    if (v) {
      e << *v;
    } else {
      e << "auto";
    }
  };
  e << YAML::BeginMap;
  e << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "d" << YAML::Value << geometry.d;
  e << YAML::Key << "model" << YAML::Value << YAML::BeginMap << YAML::Key << "type" << YAML::Value << geometry.model
    << YAML::Key << "alpha" << YAML::Value << geometry.alpha << YAML::Key << "n" << YAML::Value << geometry.n
    << YAML::EndMap;
  e << YAML::EndMap;
  e << YAML::Key << "field" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "F" << YAML::Value << field.F;
  e << YAML::Key << "F_list" << YAML::Value << YAML::Flow << field.F_list;
  e << YAML::Key << "eta" << YAML::Value << field.eta;
  e << YAML::EndMap;
  e << YAML::Key << "distortion" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "beta" << YAML::Value << distortion.beta;
  e << YAML::Key << "beta_list" << YAML::Value << YAML::Flow << distortion.beta_list;
  e << YAML::Key << "E" << YAML::Value;
  opt(distortion.E);
  e << YAML::Key << "deltaE" << YAML::Value;
  opt(distortion.deltaE);
  e << YAML::Key << "sharpness" << YAML::Value << distortion.sharpness;
  e << YAML::EndMap;
  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "L" << YAML::Value;
  opt(grid.L);
  e << YAML::Key << "Ns" << YAML::Value;
  opt(grid.Ns);
  e << YAML::Key << "Nu" << YAML::Value << grid.Nu;
  e << YAML::Key << "margin" << YAML::Value;
  opt(grid.margin);
  e << YAML::Key << "hs" << YAML::Value << grid.hs;
  e << YAML::Key << "damping" << YAML::Value << grid.damping;
  e << YAML::Key << "reference_L" << YAML::Value << grid.reference_L;
  e << YAML::EndMap;
  e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "method" << YAML::Value << solver.method;
  e << YAML::Key << "k" << YAML::Value << solver.k;
  e << YAML::Key << "tol" << YAML::Value << solver.tol;
  e << YAML::Key << "max_iter" << YAML::Value << solver.max_iter;
  e << YAML::Key << "workers" << YAML::Value << solver.workers;
  e << YAML::EndMap;
  e << YAML::Key << "plateau" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "drift_tol" << YAML::Value << plateau.drift_tol;
  e << YAML::EndMap;
  e << YAML::Key << "confining" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "cap_offset" << YAML::Value << confining.cap_offset;
  e << YAML::Key << "L_list" << YAML::Value << YAML::Flow << confining.L_list;
  e << YAML::EndMap;
  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dir" << YAML::Value << output.dir;
  e << YAML::Key << "formats" << YAML::Value << YAML::Flow << output.formats;
  e << YAML::EndMap;
  e << YAML::EndMap;
  return e.c_str();
}

}  // namespace wgstark::lab
