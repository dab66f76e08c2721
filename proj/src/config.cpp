#include "speclab/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "speclab/corpus.hpp"
#include "speclab/errors.hpp"

namespace speclab {

Command parse_command(const std::string& name) {
  static const std::pair<const char*, Command> table[] = {{"eig", Command::eig},       {"torsion", Command::torsion},
                                                          {"asym", Command::asym},     {"verify", Command::verify},
                                                          {"sweep", Command::sweep},   {"sharpness", Command::sharpness}};
  for (const auto& [n, c] : table)
    if (name == n) return c;
  throw ArgumentError("unknown command '" + name + "'");
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::eig: return "eig";
    case Command::torsion: return "torsion";
    case Command::asym: return "asym";
    case Command::verify: return "verify";
    case Command::sweep: return "sweep";
    case Command::sharpness: return "sharpness";
  }
  return "?";
}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const std::string& field, const YAML::Node& n, const std::string& msg) {
  throw ConfigError(field, line_of(n), msg);
}

template <class T>
T scalar(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(field, n, "expected a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(field, n, "cannot read '" + n.Scalar() + "'");
  }
}

double positive(const YAML::Node& n, const std::string& field) {
  const double v = scalar<double>(n, field);
  if (!(v > 0.0) || !std::isfinite(v)) fail(field, n, "must be a positive number");
  return v;
}

std::vector<double> numbers(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) fail(field, n, "expected a list of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < n.size(); ++i) v.push_back(scalar<double>(n[i], field + "[" + std::to_string(i) + "]"));
  return v;
}

void check_keys(const YAML::Node& n, const std::string& field, const std::set<std::string>& allowed) {
  if (!n.IsMap()) fail(field, n, "expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(field.empty() ? key : field + "." + key, kv.first, "unknown key");
  }
}

const YAML::Node require(const YAML::Node& n, const std::string& key, const std::string& field) {
  const YAML::Node v = n[key];
  if (!v) fail(field + "." + key, n, "missing");
  return v;
}

Point point(const YAML::Node& n, const std::string& field, int dim) {
  const auto v = numbers(n, field);
  if (static_cast<int>(v.size()) != dim) fail(field, n, "expected " + std::to_string(dim) + " coordinates");
  Point p{};
  for (int i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
  return p;
}

Shape parse_shape(const YAML::Node& n, const std::string& field) {
  if (!n.IsMap()) fail(field, n, "expected a shape mapping");
  const std::string type = scalar<std::string>(require(n, "type", field), field + ".type");
  const int dim = n["dim"] ? scalar<int>(n["dim"], field + ".dim") : 2;
  if (dim != 2 && dim != 3) fail(field + ".dim", n["dim"], "must be 2 or 3");
  auto center = [&](const char* key) {
    return n[key] ? point(n[key], field + "." + key, dim) : Point{};
  };
  Shape s = Shape::ball(2, {}, 1.0);
  if (type == "ball") {
    check_keys(n, field, {"type", "dim", "center", "radius", "measure"});
    s = Shape::ball(dim, center("center"), positive(require(n, "radius", field), field + ".radius"));
  } else if (type == "ellipse") {
    check_keys(n, field, {"type", "center", "semi_axes", "angle", "measure"});
    const auto ax = numbers(require(n, "semi_axes", field), field + ".semi_axes");
    if (ax.size() != 2 || !(ax[0] > 0) || !(ax[1] > 0)) fail(field + ".semi_axes", n["semi_axes"], "expected two positive numbers");
    const double angle = n["angle"] ? scalar<double>(n["angle"], field + ".angle") : 0.0;
    s = Shape::ellipse(center("center"), ax[0], ax[1], angle);
  } else if (type == "box") {
    check_keys(n, field, {"type", "dim", "lo", "hi", "measure"});
    s = Shape::box(dim, point(require(n, "lo", field), field + ".lo", dim), point(require(n, "hi", field), field + ".hi", dim));
  } else if (type == "polygon") {
    check_keys(n, field, {"type", "vertices", "measure"});
    const YAML::Node vs = require(n, "vertices", field);
    if (!vs.IsSequence() || vs.size() < 3) fail(field + ".vertices", vs, "expected at least three vertices");
    std::vector<std::array<double, 2>> v;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const auto p = numbers(vs[i], field + ".vertices[" + std::to_string(i) + "]");
      if (p.size() != 2) fail(field + ".vertices[" + std::to_string(i) + "]", vs[i], "expected [x, y]");
      v.push_back({p[0], p[1]});
    }
    s = Shape::polygon(std::move(v));
  } else if (type == "regular_polygon") {
    check_keys(n, field, {"type", "sides", "area", "center", "rotation", "measure"});
    const int sides = scalar<int>(require(n, "sides", field), field + ".sides");
    if (sides < 3) fail(field + ".sides", n["sides"], "must be at least 3");
    const double area = n["area"] ? positive(n["area"], field + ".area") : std::numbers::pi;
    const double rot = n["rotation"] ? scalar<double>(n["rotation"], field + ".rotation") : 0.0;
    s = Shape::regular_polygon(sides, area, center("center"), rot);
  } else if (type == "theta") {
    check_keys(n, field, {"type", "dim", "gap", "angle", "measure"});
    const double gap = n["gap"] ? scalar<double>(n["gap"], field + ".gap") : 1.0;
    if (!(gap > 0.0)) fail(field + ".gap", n["gap"], "balls must be disjoint: gap > 0");
    s = theta_shape(dim, gap, n["angle"] ? scalar<double>(n["angle"], field + ".angle") : 0.0);
  } else if (type == "family") {
    check_keys(n, field, {"type", "dim", "name", "t", "measure"});
    const auto name = scalar<std::string>(require(n, "name", field), field + ".name");
    try {
      s = family_shape(parse_family(name), scalar<double>(require(n, "t", field), field + ".t"), dim);
    } catch (const ArgumentError& e) {
      fail(field, n, e.what());
    }
  } else if (type == "disjoint_union") {
    check_keys(n, field, {"type", "pieces", "measure"});
    const YAML::Node ps = require(n, "pieces", field);
    if (!ps.IsSequence() || ps.size() < 1) fail(field + ".pieces", ps, "expected a list of shapes");
    std::vector<Shape> pieces;
    for (std::size_t i = 0; i < ps.size(); ++i) pieces.push_back(parse_shape(ps[i], field + ".pieces[" + std::to_string(i) + "]"));
    s = Shape::disjoint_union(pieces);
  } else if (type == "union" || type == "intersection" || type == "difference") {
    check_keys(n, field, {"type", "a", "b", "measure"});
    const Shape a = parse_shape(require(n, "a", field), field + ".a");
    const Shape b = parse_shape(require(n, "b", field), field + ".b");
    s = type == "union" ? a.unite(b) : type == "intersection" ? a.intersect(b) : a.subtract(b);
  } else {
    fail(field + ".type", n["type"], "unknown shape type '" + type + "'");
  }
  if (n["measure"]) s = s.with_measure(positive(n["measure"], field + ".measure"));
  return s;
}

std::vector<DomainSpec> parse_domains(const YAML::Node& list, const std::string& field) {
  if (!list.IsSequence()) fail(field, list, "expected a list of domains");
  std::vector<DomainSpec> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const YAML::Node d = list[i];
    check_keys(d, f, {"label", "shape", "normalize"});
    const auto label = scalar<std::string>(require(d, "label", f), f + ".label");
    if (!seen.insert(label).second) fail(f + ".label", d["label"], "duplicate label '" + label + "'");
    Shape s = parse_shape(require(d, "shape", f), f + ".shape");
    const bool normalize = d["normalize"] ? scalar<bool>(d["normalize"], f + ".normalize") : true;
    if (!s.measure()) fail(f + ".shape", d["shape"], "measure unknown; give shape.measure");
    if (normalize) s = s.normalized_to(unit_ball_volume(s.dim()));
    out.push_back({label, s});
  }
  return out;
}

std::vector<DomainSpec> load_domain_file(const std::string& path, const std::string& field, const YAML::Node& at) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    fail(field, at, "cannot open corpus file '" + path + "'");
  } catch (const YAML::ParserException& e) {
    throw ConfigError(field, e.mark.line + 1, path + ": " + e.msg);
  }
  if (!root["domains"]) fail(field, at, path + " has no 'domains' list");
  return parse_domains(root["domains"], "domains");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<syntax>", e.mark.line + 1, e.msg);
  }
  if (!root || !root.IsMap()) throw ConfigError("<root>", 1, "expected a mapping of settings");
  check_keys(root, "", {"command", "h_ladder", "k_max", "seed", "tolerances", "theta_reference", "jobs", "out",
                        "corpus", "domains", "stability", "sharpness"});
  RunConfig c;
  c.text = text;
  c.command = [&] {
    const auto name = scalar<std::string>(require(root, "command", "<root>"), "command");
    try {
      return parse_command(name);
    } catch (const ArgumentError& e) {
      fail("command", root["command"], e.what());
    }
  }();
  if (root["h_ladder"]) {
    c.h_ladder = numbers(root["h_ladder"], "h_ladder");
    const auto& h = c.h_ladder;
    if (h.empty()) fail("h_ladder", root["h_ladder"], "must not be empty");
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (!(h[i] > 0.0)) fail("h_ladder", root["h_ladder"][i], "spacings must be positive");
      if (i > 0 && !(h[i] < h[i - 1])) fail("h_ladder", root["h_ladder"][i], "must be strictly decreasing");
      if (i > 0 && std::abs(h[i] * 2.0 - h[i - 1]) > 1e-12 * h[i - 1])
        fail("h_ladder", root["h_ladder"][i], "each spacing must be half the previous one");
    }
  }
  if (root["k_max"]) {
    c.k_max = scalar<int>(root["k_max"], "k_max");
    if (c.k_max < 1) fail("k_max", root["k_max"], "must be at least 1");
  }
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["jobs"]) {
    const int j = scalar<int>(root["jobs"], "jobs");
    if (j < 0) fail("jobs", root["jobs"], "must be >= 0");
    c.jobs = static_cast<unsigned>(j);
  }
  if (root["out"]) c.out = scalar<std::string>(root["out"], "out");
  if (root["stability"]) c.stability = scalar<bool>(root["stability"], "stability");
  if (const YAML::Node t = root["tolerances"]) {
    check_keys(t, "tolerances", {"eig", "cg", "budget_floor"});
    if (t["eig"]) c.eig_tol = positive(t["eig"], "tolerances.eig");
    if (t["cg"]) c.cg_tol = positive(t["cg"], "tolerances.cg");
    if (t["budget_floor"]) c.budget_floor = positive(t["budget_floor"], "tolerances.budget_floor");
  }
  if (root["theta_reference"]) {
    const auto s = scalar<std::string>(root["theta_reference"], "theta_reference");
    if (s == "analytic") c.theta = ThetaSource::analytic;
    else if (s == "grid") c.theta = ThetaSource::grid;
    else fail("theta_reference", root["theta_reference"], "expected 'analytic' or 'grid'");
  }
  if (root["corpus"]) {
    const auto s = scalar<std::string>(root["corpus"], "corpus");
    if (s == "default") {
      c.domains = default_corpus();
    } else {
      const auto path = std::filesystem::path(s).is_absolute() ? std::filesystem::path(s)
                                                               : std::filesystem::path(base_dir) / s;
      c.domains = load_domain_file(path.string(), "corpus", root["corpus"]);
    }
  }
  if (root["domains"]) {
    auto more = parse_domains(root["domains"], "domains");
    std::set<std::string> seen;
    for (const auto& d : c.domains) seen.insert(d.label);
    for (auto& d : more) {
      if (!seen.insert(d.label).second) fail("domains", root["domains"], "label '" + d.label + "' already in the corpus");
      c.domains.push_back(std::move(d));
    }
  }
  if (const YAML::Node s = root["sharpness"]) {
    check_keys(s, "sharpness", {"families", "t_grid", "t_grids", "analytic_t_grid", "doubling_domains", "doubling_k_max", "floor",
                                "fit_tolerance"});
    if (s["families"]) {
      c.sharpness.families.clear();
      const YAML::Node f = s["families"];
      if (!f.IsSequence()) fail("sharpness.families", f, "expected a list");
      for (std::size_t i = 0; i < f.size(); ++i) {
        try {
          c.sharpness.families.push_back(parse_family(scalar<std::string>(f[i], "sharpness.families")));
        } catch (const ArgumentError& e) {
          fail("sharpness.families", f[i], e.what());
        }
      }
    }
    auto grid = [&](const char* key, std::vector<double>& dst) {
      if (!s[key]) return;
      dst = numbers(s[key], std::string("sharpness.") + key);
      for (std::size_t i = 0; i < dst.size(); ++i)
        if (!(dst[i] > 0.0)) fail(std::string("sharpness.") + key, s[key][i], "t must be positive");
    };
    grid("t_grid", c.sharpness.t_grid);
    grid("analytic_t_grid", c.sharpness.analytic_t_grid);
    if (const YAML::Node g = s["t_grids"]) {
      if (!g.IsMap()) fail("sharpness.t_grids", g, "expected a map from family name to a t list");
      for (const auto& kv : g) {
        const auto name = kv.first.as<std::string>();
        Family f;
        try {
          f = parse_family(name);
        } catch (const ArgumentError& e) {
          fail("sharpness.t_grids", kv.first, e.what());
        }
        auto v = numbers(kv.second, "sharpness.t_grids." + name);
        for (std::size_t i = 0; i < v.size(); ++i)
          if (!(v[i] > 0.0)) fail("sharpness.t_grids." + name, kv.second[i], "t must be positive");
        c.sharpness.family_t_grids[f] = std::move(v);
      }
    }
    if (s["doubling_domains"]) c.sharpness.doubling_domains = parse_domains(s["doubling_domains"], "sharpness.doubling_domains");
    if (s["doubling_k_max"]) {
      c.sharpness.doubling_k_max = scalar<int>(s["doubling_k_max"], "sharpness.doubling_k_max");
      if (c.sharpness.doubling_k_max < 1) fail("sharpness.doubling_k_max", s["doubling_k_max"], "must be at least 1");
    }
    if (s["floor"]) c.sharpness.floor = positive(s["floor"], "sharpness.floor");
    if (s["fit_tolerance"]) c.sharpness.fit_tolerance = positive(s["fit_tolerance"], "sharpness.fit_tolerance");
  }

  const bool needs_domains = c.command != Command::sharpness;
  if (needs_domains && c.domains.empty()) throw ConfigError("domains", 0, "no domains: give 'domains' or 'corpus'");
  if ((c.command == Command::verify || c.command == Command::sweep) && c.h_ladder.size() < 2)
    fail("h_ladder", root["h_ladder"], "verify and sweep need at least two spacings");
  if (c.command == Command::sweep && c.stability && c.h_ladder.size() < 3)
    fail("h_ladder", root["h_ladder"], "the stability comparison needs three spacings");
  if ((c.command == Command::verify || c.command == Command::sweep) && c.k_max < 2)
    fail("k_max", root["k_max"], "verify and sweep need k_max >= 2");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", 0, "cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str(), std::filesystem::path(path).parent_path().string().empty()
                                   ? "."
                                   : std::filesystem::path(path).parent_path().string());
}

HarnessOptions harness_options(const RunConfig& cfg, std::size_t step) {
  if (step >= cfg.h_ladder.size()) throw ArgumentError("harness_options: ladder step out of range");
  HarnessOptions o;
  o.k_max = cfg.k_max;
  o.h = cfg.h_ladder[step];
  o.solve.eigen.tol = cfg.eig_tol;
  o.solve.eigen.seed = cfg.seed;
  o.solve.cg_tol = cfg.cg_tol;
  o.budget.floor = cfg.budget_floor;
  o.theta = cfg.theta;
  return o;
}

SharpnessOptions sharpness_options(const RunConfig& cfg) {
  SharpnessOptions o;
  o.h = cfg.h_ladder.front();
  o.k_max = std::max(cfg.k_max, 2);
  o.t_grid = cfg.sharpness.t_grid;
  o.solve.eigen.tol = cfg.eig_tol;
  o.solve.eigen.seed = cfg.seed;
  o.solve.cg_tol = cfg.cg_tol;
  o.floor = cfg.sharpness.floor;
  o.fit_tolerance = cfg.sharpness.fit_tolerance;
  o.jobs = cfg.jobs;
  return o;
}

}  // namespace speclab
