#include "greenlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "greenlab/errors.hpp"

namespace greenlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("'" + std::string(s) + "' is not a finite number");
  return v;
}

template <class Int>
Int parse_integer(std::string_view s) {
  s = trim(s);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("'" + std::string(s) + "' is not an integer");
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T, class F>
std::string join(const std::vector<T>& items, char sep, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += fmt(items[i]);
  }
  return out;
}

std::vector<double> parse_doubles(std::string_view s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (auto part : split(s, ',')) out.push_back(parse_double(part));
  return out;
}

Point parse_point(std::string_view s) {
  const auto parts = split(s, ',');
  if (parts.size() < 2 || parts.size() > 3)
    throw ConfigError("point '" + std::string(s) + "' needs 2 or 3 coordinates");
  Point p{};
  for (std::size_t i = 0; i < parts.size(); ++i) p[i] = parse_double(parts[i]);
  return p;
}

std::string format_point(const Point& p) {
  return format_double(p[0]) + "," + format_double(p[1]) + "," + format_double(p[2]);
}

std::vector<Point> parse_points(std::string_view s) {
  std::vector<Point> out;
  for (auto part : split(s, ';')) out.push_back(parse_point(part));
  return out;
}

struct Key {
  std::string name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

Key real(std::string name, double ExperimentConfig::*m) {
  return {std::move(name), [m](const ExperimentConfig& c) { return format_double(c.*m); },
          [m](ExperimentConfig& c, std::string_view v) { c.*m = parse_double(v); }};
}

Key integer(std::string name, int ExperimentConfig::*m) {
  return {std::move(name), [m](const ExperimentConfig& c) { return std::to_string(c.*m); },
          [m](ExperimentConfig& c, std::string_view v) { c.*m = parse_integer<int>(v); }};
}

Key reals(std::string name, std::vector<double> ExperimentConfig::*m) {
  return {std::move(name),
          [m](const ExperimentConfig& c) { return join(c.*m, ',', format_double); },
          [m](ExperimentConfig& c, std::string_view v) { c.*m = parse_doubles(v); }};
}

Key points(std::string name, std::vector<Point> ExperimentConfig::*m) {
  return {std::move(name), [m](const ExperimentConfig& c) { return join(c.*m, ';', format_point); },
          [m](ExperimentConfig& c, std::string_view v) { c.*m = parse_points(v); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    using C = ExperimentConfig;
    std::vector<Key> k;
    k.push_back({"name", [](const C& c) { return c.name; },
                 [](C& c, std::string_view v) { c.name = std::string(v); }});
    k.push_back({"experiments",
                 [](const C& c) {
                   return join(c.experiments, ',', [](Experiment e) { return std::string(to_string(e)); });
                 },
                 [](C& c, std::string_view v) { c.experiments = parse_experiments(v); }});
    k.push_back({"dims", [](const C& c) { return join(c.dims, ',', [](int d) { return std::to_string(d); }); },
                 [](C& c, std::string_view v) {
                   c.dims.clear();
                   for (auto p : split(v, ',')) c.dims.push_back(parse_integer<int>(p));
                 }});
    k.push_back({"fields", [](const C& c) { return join(c.fields, ',', [](const FieldSpec& f) { return f.label(); }); },
                 [](C& c, std::string_view v) {
                   c.fields.clear();
                   for (auto p : split(v, ',')) c.fields.push_back(parse_field_spec(p));
                 }});
    k.push_back(real("half_width_2d", &C::half_width_2d));
    k.push_back(integer("nodes_2d", &C::nodes_2d));
    k.push_back(real("half_width_3d", &C::half_width_3d));
    k.push_back(integer("nodes_3d", &C::nodes_3d));
    k.push_back(reals("half_widths", &C::half_widths));
    k.push_back(real("spacing_2d", &C::spacing_2d));
    k.push_back(real("spacing_3d", &C::spacing_3d));
    k.push_back(points("sources", &C::sources));
    k.push_back({"quantities", [](const C& c) { return join(c.quantities, ',', [](const std::string& s) { return s; }); },
                 [](C& c, std::string_view v) {
                   c.quantities.clear();
                   for (auto p : split(v, ',')) c.quantities.emplace_back(p);
                 }});
    k.push_back(real("window_cap_2d", &C::window_cap_2d));
    k.push_back(integer("radii_count", &C::radii_count));
    k.push_back(real("eta", &C::eta));
    k.push_back(real("expected_exponent_shift", &C::expected_exponent_shift));
    k.push_back(real("exponent_tol", &C::exponent_tol));
    k.push_back(real("gradient_tol", &C::gradient_tol));
    k.push_back(real("mixed_tol", &C::mixed_tol));
    k.push_back(real("log_residual_tol", &C::log_residual_tol));
    k.push_back(real("log_slope_tol", &C::log_slope_tol));
    k.push_back(reals("ratio_radii", &C::ratio_radii));
    k.push_back(points("ratio_points", &C::ratio_points));
    k.push_back(real("ratio_variation", &C::ratio_variation));
    k.push_back(real("analytic_radius", &C::analytic_radius));
    k.push_back({"analytic_point", [](const C& c) { return format_point(c.analytic_point); },
                 [](C& c, std::string_view v) { c.analytic_point = parse_point(v); }});
    k.push_back(real("analytic_tol", &C::analytic_tol));
    k.push_back(real("monotone_tol", &C::monotone_tol));
    k.push_back(real("drift_tol", &C::drift_tol));
    k.push_back(real("uniform_tol", &C::uniform_tol));
    k.push_back(real("oracle_tol", &C::oracle_tol));
    k.push_back(real("adjoint_tol", &C::adjoint_tol));
    k.push_back(integer("max_columns", &C::max_columns));
    k.push_back(integer("lorentz_trials", &C::lorentz_trials));
    k.push_back(integer("lorentz_size", &C::lorentz_size));
    k.push_back(integer("lorentz_nodes", &C::lorentz_nodes));
    k.push_back(real("lorentz_tol", &C::lorentz_tol));
    k.push_back(real("kappa_factor", &C::kappa_factor));
    k.push_back(real("lift_tol_constant", &C::lift_tol_constant));
    k.push_back(real("lift_tol_variable", &C::lift_tol_variable));
    k.push_back(real("lift_exponent_tol", &C::lift_exponent_tol));
    k.push_back({"rel_tol", [](const C& c) { return format_double(c.solver.rel_tol); },
                 [](C& c, std::string_view v) { c.solver.rel_tol = parse_double(v); }});
    k.push_back({"max_iter", [](const C& c) { return std::to_string(c.solver.max_iter); },
                 [](C& c, std::string_view v) { c.solver.max_iter = parse_integer<int>(v); }});
    k.push_back({"seed", [](const C& c) { return std::to_string(c.seed); },
                 [](C& c, std::string_view v) { c.seed = parse_integer<std::uint64_t>(v); }});
    k.push_back(integer("threads", &C::threads));
    k.push_back({"out", [](const C& c) { return c.out; },
                 [](C& c, std::string_view v) { c.out = std::string(v); }});
    return k;
  }();
  return table;
}

const Key& find_key(std::string_view name) {
  for (const auto& k : keys())
    if (k.name == name) return k;
  throw ConfigError("unknown config key '" + std::string(name) + "'");
}

bool valid_quantity(const std::string& q) {
  return q == "G" || q == "grad_x" || q == "grad_y" || q == "mixed" || q == "ratio";
}

}  // namespace

PeriodicField FieldSpec::make(int dim) const { return make_field(dim, family, params); }

std::string FieldSpec::label() const {
  std::string s(to_string(family));
  for (double p : params) s += ":" + format_double(p);
  return s;
}

FieldSpec parse_field_spec(std::string_view text) {
  const auto parts = split(text, ':');
  FieldSpec f;
  f.family = parse_family(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) f.params.push_back(parse_double(parts[i]));
  return f;
}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::solve: return "solve";
    case Experiment::decay: return "decay";
    case Experiment::lorentz: return "lorentz";
    case Experiment::lift: return "lift";
    case Experiment::monotone: return "monotone";
    case Experiment::adjoint: return "adjoint";
    case Experiment::uniform: return "uniform";
  }
  return "unknown";
}

std::vector<Experiment> parse_experiments(std::string_view text) {
  static const std::vector<Experiment> all{Experiment::solve,    Experiment::decay,
                                           Experiment::lorentz,  Experiment::lift,
                                           Experiment::monotone, Experiment::adjoint,
                                           Experiment::uniform};
  std::vector<Experiment> out;
  for (auto part : split(text, ',')) {
    if (part == "all") return all;
    const auto it = std::find_if(all.begin(), all.end(), [&](Experiment e) { return to_string(e) == part; });
    if (it == all.end()) throw ConfigError("unknown experiment '" + std::string(part) + "'");
    if (std::find(out.begin(), out.end(), *it) == out.end()) out.push_back(*it);
  }
  return out;
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("expected key = value, got '" + std::string(assignment) + "'");
  const auto key = trim(assignment.substr(0, eq));
  const auto value = trim(assignment.substr(eq + 1));
  try {
    find_key(key).set(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string key(trim(line.substr(0, eq)));
    if (eq != std::string_view::npos && !seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    try {
      apply_override(base, line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string serialize(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

std::map<std::string, std::string> to_map(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& k : keys()) out[k.name] = k.get(cfg);
  return out;
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(!c.experiments.empty(), "no experiment selected");
  require(!c.dims.empty(), "dims is empty");
  for (int d : c.dims) require(d == 2 || d == 3, "dims entries must be 2 or 3");
  require(!c.fields.empty(), "fields is empty");
  for (const auto& f : c.fields)
    for (int d : c.dims) f.make(d);
  require(c.half_width_2d > 0 && c.half_width_3d > 0, "half widths must be positive");
  require(c.nodes_2d >= 5 && c.nodes_2d % 2 == 1, "nodes_2d must be odd and >= 5");
  require(c.nodes_3d >= 5 && c.nodes_3d % 2 == 1, "nodes_3d must be odd and >= 5");
  require(!c.half_widths.empty(), "half_widths is empty");
  for (double r : c.half_widths) require(r > 0, "half_widths entries must be positive");
  require(std::is_sorted(c.half_widths.begin(), c.half_widths.end()) &&
              std::adjacent_find(c.half_widths.begin(), c.half_widths.end()) == c.half_widths.end(),
          "half_widths must be strictly increasing");
  require(c.spacing_2d > 0 && c.spacing_3d > 0, "spacings must be positive");
  require(!c.sources.empty(), "sources is empty");
  require(!c.quantities.empty(), "quantities is empty");
  for (const auto& q : c.quantities) require(valid_quantity(q), "unknown quantity '" + q + "'");
  require(c.window_cap_2d > 0, "window_cap_2d must be positive");
  require(c.radii_count >= 5, "radii_count must be >= 5");
  require(c.eta > 0 && c.eta < 0.5, "eta must lie in (0, 0.5)");
  for (double t : {c.exponent_tol, c.gradient_tol, c.mixed_tol, c.log_residual_tol, c.log_slope_tol,
                   c.analytic_tol, c.monotone_tol, c.drift_tol, c.uniform_tol, c.oracle_tol,
                   c.adjoint_tol, c.lorentz_tol, c.lift_tol_constant, c.lift_tol_variable,
                   c.lift_exponent_tol})
    require(t > 0, "tolerances must be positive");
  require(c.ratio_variation > 1, "ratio_variation must exceed 1");
  require(!c.ratio_radii.empty(), "ratio_radii is empty");
  for (double r : c.ratio_radii) require(r > 0, "ratio_radii entries must be positive");
  require(c.analytic_radius > 0, "analytic_radius must be positive");
  require(c.max_columns >= 1, "max_columns must be >= 1");
  require(c.lorentz_trials >= 1 && c.lorentz_size >= 2, "lorentz_trials >= 1 and lorentz_size >= 2");
  require(c.lorentz_nodes >= 5 && c.lorentz_nodes % 2 == 1, "lorentz_nodes must be odd and >= 5");
  require(c.kappa_factor >= 4, "kappa_factor must be >= 4");
  require(c.solver.rel_tol > 0 && c.solver.rel_tol < 1, "rel_tol must lie in (0, 1)");
  require(c.solver.max_iter >= 0, "max_iter must be >= 0");
  require(c.threads >= 0, "threads must be >= 0");
  require(!c.out.empty(), "out must not be empty");
}

namespace {

ExperimentConfig make_preset(std::string_view name) {
  ExperimentConfig c;
  c.name = std::string(name);
  const FieldSpec identity{Family::identity, {}};
  const FieldSpec trig{Family::scalar_trig, {}};
  const std::vector<FieldSpec> periodic{identity, trig};
  const std::vector<FieldSpec> builtin{identity, trig, FieldSpec{Family::diag_aniso, {}},
                                       FieldSpec{Family::nonsym_skew, {}}};
  const FieldSpec modulated{Family::nonsym_skew, {0.3, 0.0, 0.5}};

  if (name == "laplace3d" || name == "decay3d") {
    c.experiments = {Experiment::decay};
    c.dims = {3};
    c.fields = name == "laplace3d" ? std::vector<FieldSpec>{identity} : periodic;
    c.quantities = {"G"};
  } else if (name == "log2d") {
    c.experiments = {Experiment::decay};
    c.dims = {2};
    c.fields = periodic;
    c.quantities = {"G"};
  } else if (name == "gradient") {
    c.experiments = {Experiment::decay};
    c.dims = {2, 3};
    c.fields = periodic;
    c.quantities = {"grad_x"};
  } else if (name == "mixed2d") {
    c.experiments = {Experiment::decay};
    c.dims = {2};
    c.fields = periodic;
    c.quantities = {"mixed"};
  } else if (name == "monotone") {
    c.experiments = {Experiment::monotone};
    c.dims = {2, 3};
    c.fields = builtin;
    c.fields.push_back(modulated);
  } else if (name == "adjoint") {
    c.experiments = {Experiment::adjoint};
    c.dims = {2, 3};
    c.nodes_2d = 17;
    c.half_width_2d = 1.0;
    c.nodes_3d = 9;
    c.half_width_3d = 1.0;
    c.fields = {FieldSpec{Family::nonsym_skew, {}}, modulated};
    c.solver.rel_tol = 1e-12;
  } else if (name == "lorentz") {
    c.experiments = {Experiment::lorentz};
  } else if (name == "uniform") {
    c.experiments = {Experiment::uniform};
    c.dims = {2, 3};
    c.fields = periodic;
    c.spacing_2d = 1.0 / 32;
    c.spacing_3d = 1.0 / 8;
    c.sources = {Point{0.0, 0.0, 0.0}, Point{0.5, 0.0, 0.0}};
    c.radii_count = 6;
  } else if (name == "lift") {
    c.experiments = {Experiment::lift};
    c.dims = {2};
    c.fields = periodic;
    c.half_width_2d = 1.0;
    c.nodes_2d = 65;
    c.radii_count = 6;
  } else if (name == "oracle") {
    c.experiments = {Experiment::solve};
    c.dims = {2, 3};
    c.fields = builtin;
    c.fields.push_back(modulated);
    c.half_width_2d = 1.0;
    c.nodes_2d = 17;
    c.half_width_3d = 1.0;
    c.nodes_3d = 9;
    c.solver.rel_tol = 1e-12;
  } else if (name == "ratio") {
    c.experiments = {Experiment::decay};
    c.dims = {2, 3};
    c.fields = periodic;
    c.half_width_2d = 4.0;
    c.nodes_2d = 257;
    c.quantities = {"ratio"};
  } else if (name == "wrong-exponent") {
    c.experiments = {Experiment::decay};
    c.dims = {2};
    c.fields = {identity};
    c.quantities = {"grad_x"};
    c.expected_exponent_shift = 0.5;
  } else if (name == "quick") {
    c.experiments = {Experiment::solve, Experiment::lorentz};
    c.dims = {2};
    c.half_width_2d = 1.0;
    c.nodes_2d = 17;
    c.lorentz_trials = 50;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"laplace3d", "decay3d", "log2d", "gradient", "mixed2d", "monotone", "adjoint",
          "lorentz",   "uniform", "lift",  "oracle",   "ratio",   "wrong-exponent", "quick"};
}

ExperimentConfig preset(std::string_view name) { return make_preset(name); }

}  // namespace greenlab
