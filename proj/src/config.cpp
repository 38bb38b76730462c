#include "bwkb/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bwkb/error.hpp"

namespace bwkb {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

std::string fmt(Real v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Real get(const pt::ptree& t, const std::string& key, Real fallback) {
  const auto v = t.get_optional<std::string>(key);
  return v ? parse_number(*v) : fallback;
}

int get_int(const pt::ptree& t, const std::string& key, int fallback) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return fallback;
  const Real r = parse_number(*v);
  if (r != std::round(r)) throw ConfigError(key + " must be an integer");
  return static_cast<int>(r);
}

bool get_bool(const pt::ptree& t, const std::string& key, bool fallback) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + *v + "'");
}

PeriodicPotential read_potential(const pt::ptree& t, const Lattice& lattice, Scenario& s) {
  const auto preset = t.get_optional<std::string>("potential.preset");
  const auto modes = t.get_optional<std::string>("potential.modes");
  if (preset && modes) throw ConfigError("[potential] takes either preset or modes, not both");
  if (preset) {
    s.potential_label = *preset;
    return potential_from_preset(*preset, lattice);
  }
  if (modes) {
    // "m:re:im, m:re:im"
    std::vector<std::pair<int, Complex>> coeffs;
    for (const auto& item : split(*modes, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() < 2 || parts.size() > 3) throw ConfigError("bad potential mode '" + item + "'");
      const Real m = parse_number(parts[0]);
      if (m != std::round(m)) throw ConfigError("potential mode index must be an integer");
      coeffs.emplace_back(static_cast<int>(m),
                          Complex(parse_number(parts[1]), parts.size() == 3 ? parse_number(parts[2]) : 0.0));
    }
    s.potential_label = "modes";
    return make_potential_from_fourier(lattice, coeffs);
  }
  if (lattice.period != s.potential.lattice().period)
    return PeriodicPotential(lattice, s.potential.coeffs());
  return s.potential;
}

Confinement read_confinement(const pt::ptree& t, const Confinement& fallback) {
  const auto kind = t.get_optional<std::string>("confinement.kind");
  if (!kind) return fallback;
  if (*kind == "zero") return Confinement::zero();
  if (*kind == "harmonic") return Confinement::harmonic(get(t, "confinement.omega", 1.0));
  if (*kind == "stark") return Confinement::stark(get(t, "confinement.field", 1.0));
  if (*kind == "polynomial") {
    const auto c = split(t.get<std::string>("confinement.coeffs", "0,0,0"), ',');
    if (c.size() > 3) throw ConfigError("polynomial confinement has degree at most 2");
    std::array<Real, 3> a{0, 0, 0};
    for (std::size_t i = 0; i < c.size(); ++i) a[i] = parse_number(c[i]);
    return Confinement::polynomial(a);
  }
  throw ConfigError("unknown confinement kind '" + *kind + "'");
}

}  // namespace

Real parse_number(const std::string& text) {
  const std::string s = trim(text);
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const Real den = parse_number(s.substr(slash + 1));
    if (den == 0) throw ConfigError("zero denominator in '" + text + "'");
    return parse_number(s.substr(0, slash)) / den;
  }
  if (s == "inf") return std::numeric_limits<Real>::infinity();
  Real v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
    throw ConfigError("not a number: '" + text + "'");
  return v;
}

std::vector<Real> parse_number_list(const std::string& text) {
  std::vector<Real> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number(item));
  return out;
}

Scenario parse_scenario(std::istream& in, const std::string& origin) {
  pt::ptree t;
  try {
    pt::read_ini(in, t);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  static const std::vector<std::string> known{"scenario", "lattice", "potential", "bloch", "confinement",
                                              "initial",  "nls",     "sweep",     "run"};
  for (const auto& [section, _] : t)
    if (std::find(known.begin(), known.end(), section) == known.end())
      throw ConfigError(origin + ": unknown section [" + section + "]");

  try {
    Scenario s;
    if (const auto base = t.get_optional<std::string>("scenario.base")) s = builtin_scenario(*base);
    s.name = t.get<std::string>("scenario.name", s.name);

    const Lattice lattice = make_lattice(get(t, "lattice.period", s.potential.lattice().period));
    s.potential = read_potential(t, lattice, s);

    s.cutoff = get_int(t, "bloch.cutoff", s.cutoff);
    s.n_bands = get_int(t, "bloch.n_bands", s.n_bands);
    s.band = get_int(t, "bloch.band", s.band);
    s.table.k_points = get_int(t, "bloch.k_points", static_cast<int>(s.table.k_points));
    s.table.gap_tol = get(t, "bloch.gap_tol", s.table.gap_tol);

    s.confinement = read_confinement(t, s.confinement);

    s.initial.amplitude = get(t, "initial.amplitude", s.initial.amplitude);
    s.initial.center = get(t, "initial.center", s.initial.center);
    s.initial.width = get(t, "initial.width", s.initial.width);
    s.initial.momentum = get(t, "initial.momentum", s.initial.momentum);
    s.initial.chirp = get(t, "initial.chirp", s.initial.chirp);

    s.lambda = Complex(get(t, "nls.lambda_re", s.lambda.real()), get(t, "nls.lambda_im", s.lambda.imag()));
    s.sigma = get_int(t, "nls.sigma", s.sigma);
    s.x_min = get(t, "nls.x_min", s.x_min);
    s.x_max = get(t, "nls.x_max", s.x_max);
    s.points_per_cell = get_int(t, "nls.points_per_cell", s.points_per_cell);
    s.dt_factor = get(t, "nls.dt_factor", s.dt_factor);
    s.dt_scale = get(t, "nls.dt_scale", s.dt_scale);
    s.edge_tol = get(t, "nls.edge_tol", s.edge_tol);

    s.tau = get(t, "sweep.tau", s.tau);
    s.snapshots = get_int(t, "sweep.snapshots", s.snapshots);
    s.rays = get_int(t, "sweep.rays", static_cast<int>(s.rays));
    s.ray_half_width = get(t, "sweep.ray_half_width", s.ray_half_width);
    s.ray_steps = get_int(t, "sweep.ray_steps", s.ray_steps);
    s.corrected = get_bool(t, "sweep.corrected", s.corrected);
    s.s_max = get_int(t, "sweep.s_max", s.s_max);
    if (const auto e = t.get_optional<std::string>("sweep.epsilons")) s.epsilons = parse_number_list(*e);

    validate(s.problem());
    if (s.band < 1 || s.band > s.n_bands) throw ConfigError("band must lie in 1..n_bands");
    if (!(s.x_max > s.x_min)) throw ConfigError("empty box");
    if (!(s.tau > 0) || s.snapshots < 1 || s.rays < 2 || s.ray_steps < 1)
      throw ConfigError("sweep settings out of range");
    return s;
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

Scenario load_scenario(const std::string& name_or_path) {
  const std::filesystem::path p(name_or_path);
  if (!std::filesystem::exists(p)) {
    if (is_builtin_scenario(name_or_path)) return builtin_scenario(name_or_path);
    throw ConfigError("config file not found: " + name_or_path);
  }
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read config file: " + name_or_path);
  return parse_scenario(in, name_or_path);
}

std::string scenario_to_ini(const Scenario& s) {
  pt::ptree t;
  t.put("scenario.name", s.name);
  t.put("lattice.period", fmt(s.potential.lattice().period));
  std::string modes;
  const Index M = s.potential.max_mode();
  for (Index m = -M; m <= M; ++m) {
    const Complex c = s.potential.coeff(static_cast<int>(m));
    if (c == 0.0) continue;
    if (!modes.empty()) modes += ", ";
    modes += std::to_string(m) + ":" + fmt(c.real()) + ":" + fmt(c.imag());
  }
  if (modes.empty()) modes = "0:0:0";
  t.put("potential.modes", modes);
  t.put("bloch.cutoff", s.cutoff);
  t.put("bloch.n_bands", s.n_bands);
  t.put("bloch.band", s.band);
  t.put("bloch.k_points", s.table.k_points);
  t.put("bloch.gap_tol", fmt(s.table.gap_tol));
  const auto& c = s.confinement.coefficients();
  t.put("confinement.kind", "polynomial");
  t.put("confinement.coeffs", fmt(c[0]) + "," + fmt(c[1]) + "," + fmt(c[2]));
  t.put("initial.amplitude", fmt(s.initial.amplitude));
  t.put("initial.center", fmt(s.initial.center));
  t.put("initial.width", fmt(s.initial.width));
  t.put("initial.momentum", fmt(s.initial.momentum));
  t.put("initial.chirp", fmt(s.initial.chirp));
  t.put("nls.lambda_re", fmt(s.lambda.real()));
  t.put("nls.lambda_im", fmt(s.lambda.imag()));
  t.put("nls.sigma", s.sigma);
  t.put("nls.x_min", fmt(s.x_min));
  t.put("nls.x_max", fmt(s.x_max));
  t.put("nls.points_per_cell", s.points_per_cell);
  t.put("nls.dt_factor", fmt(s.dt_factor));
  t.put("nls.dt_scale", fmt(s.dt_scale));
  t.put("nls.edge_tol", fmt(s.edge_tol));
  t.put("sweep.tau", fmt(s.tau));
  t.put("sweep.snapshots", s.snapshots);
  t.put("sweep.rays", s.rays);
  t.put("sweep.ray_half_width", fmt(s.ray_half_width));
  t.put("sweep.ray_steps", s.ray_steps);
  t.put("sweep.corrected", s.corrected ? "true" : "false");
  t.put("sweep.s_max", s.s_max);
  std::string eps;
  for (Real e : s.epsilons) eps += (eps.empty() ? "" : ",") + fmt(e);
  t.put("sweep.epsilons", eps);
  std::ostringstream os;
  pt::write_ini(os, t);
  return os.str();
}

void write_manifest(const std::filesystem::path& path, const Scenario& s,
                    const std::map<std::string, std::string>& run) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write manifest " + path.string());
  out << scenario_to_ini(s);
  out << "[run]\n";
  for (const auto& [k, v] : run) out << k << "=" << v << "\n";
}

}  // namespace bwkb
