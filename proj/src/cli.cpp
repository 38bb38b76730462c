#include "bwkb/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bwkb/config.hpp"
#include "bwkb/error.hpp"
#include "bwkb/harness.hpp"
#include "bwkb/wigner.hpp"
#include "bwkb/wkb.hpp"

namespace bwkb {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

// shortest round-trip representation, so reruns reproduce files byte for byte
std::string num(Real v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  void row(std::initializer_list<Real> cells) {
    bool first = true;
    for (Real c : cells) {
      out_ << (first ? "" : ",") << num(c);
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

struct Common {
  std::string config = "full_scenario";
  std::string out_dir = ".";
  std::string eps_text;
  Real t = 0;
};

fs::path prepare(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

std::map<std::string, std::string> run_info(const std::string& command, const std::vector<std::string>& argv) {
  std::string joined;
  for (const auto& a : argv) joined += (joined.empty() ? "" : " ") + a;
  return {{"command", command},
          {"argv", joined},
          {"version", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"seed", "none (deterministic)"}};
}

Real single_eps(const Common& c, const Scenario& s) {
  if (!c.eps_text.empty()) return parse_number(c.eps_text);
  if (s.epsilons.empty()) throw ConfigError("no epsilon given");
  return s.epsilons.back();
}

int cmd_scale(Real a0, Real a_bar, Real n, Real omega0) {
  const ScalingReport r = scale_physical_params(a0, a_bar, n, omega0);
  std::cout << "epsilon=" << num(r.epsilon) << "\nx_s=" << num(r.x_s) << "\nxi=" << num(r.xi)
            << "\ntime_scale=" << num(r.time_scale) << "\nlambda_ratio=" << r.lambda_ratio << "\n";
  return 0;
}

int cmd_bands(const std::string& config, const std::string& preset, int n, int k_points, int sigma, int cutoff,
              const std::string& out, const std::vector<std::string>& argv) {
  Scenario s = config.empty() ? Scenario{} : load_scenario(config);
  if (config.empty()) {
    s.name = "bands";
    s.potential_label = preset == "mathieu" ? "mathieu:amplitude=1" : preset;
    s.potential = potential_from_preset(s.potential_label);
    s.cutoff = cutoff;
  }
  if (n > 0) s.band = n;
  s.n_bands = std::max(s.n_bands, s.band + 1);
  s.table.k_points = k_points;
  s.sigma = sigma;
  const BandTable table = scenario_band(s);
  const std::string tag = std::to_string(s.band);
  std::vector<std::string> header{"k"};
  for (int b = 1; b <= s.band; ++b) header.push_back("E_" + std::to_string(b));
  for (const char* c : {"velocity_", "Re_connection_", "Im_connection_", "kappa_sigma_", "gap_"})
    header.push_back(c + tag);
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  Csv csv(path, header);
  const RealVector kappa = table.kappa_samples(sigma);
  for (Index j = 0; j < table.k_grid().size(); ++j) {
    std::vector<std::string> row{num(table.k_grid()[j])};
    for (int b = 0; b < s.band; ++b) row.push_back(num(table.all_energies()(j, b)));
    row.push_back(num(table.velocities()[j]));
    row.push_back(num(table.connection()[j].real()));
    row.push_back(num(table.connection()[j].imag()));
    row.push_back(num(kappa[j]));
    row.push_back(num(table.gaps()[j]));
    csv.row(row);
  }
  write_manifest(fs::path(out).replace_extension(".manifest.ini"), s, run_info("bands", argv));
  std::cout << "band " << s.band << ": min gap " << num(table.min_gap()) << ", winding "
            << num(table.winding_phase()) << "\n";
  return 0;
}

int cmd_rays(const Common& c, const std::vector<std::string>& argv) {
  const Scenario s = load_scenario(c.config);
  const fs::path dir = prepare(c.out_dir);
  const BandTable band = scenario_band(s);
  const RayBundle bundle = scenario_rays(s, band);
  Csv rays(dir / "rays.csv", {"ray", "x0", "t", "x", "k", "J", "phi", "berry", "nlphase"});
  Csv summary(dir / "bundle.csv", {"x0", "caustic_time"});
  for (std::size_t r = 0; r < bundle.rays.size(); ++r) {
    const RayPath& p = bundle.rays[r];
    summary.row({p.x0, p.caustic_time});
    for (Index i = 0; i < p.samples(); ++i)
      rays.row({Real(r), p.x0, p.t[i], p.x[i], p.k[i], p.jacobian[i], p.phase[i], p.berry[i], p.nlphase[i]});
  }
  write_manifest(dir / "manifest.ini", s, run_info("rays", argv));
  std::cout << bundle.rays.size() << " rays, caustic_time " << num(bundle.caustic_time) << "\n";
  return 0;
}

int cmd_wkb(const Common& c, const std::vector<std::string>& argv) {
  const Scenario s = load_scenario(c.config);
  const Real eps = single_eps(c, s);
  const fs::path dir = prepare(c.out_dir);
  const BandTable band = scenario_band(s);
  const RayBundle bundle = scenario_rays(s, band, c.t);
  const UniformGrid grid = s.grid(eps);
  const EulerianFields f = eulerianize(bundle, c.t, grid.points(), s.initial, band);
  WaveField v0 = assemble_v0(f, band, eps, grid);
  write_field(dir / "v0.bin", v0);
  Csv csv(dir / "fields.csv", {"x", "phase", "grad_phi", "amp", "omega", "jacobian", "launch", "covered"});
  for (Index i = 0; i < f.x.size(); ++i)
    csv.row({f.x[i], f.phase[i], f.grad_phi[i], f.amp[i], f.omega[i], f.jacobian[i], f.launch[i],
             f.covered[i] ? 1.0 : 0.0});
  write_manifest(dir / "manifest.ini", s, run_info("wkb", argv));
  std::cout << "v0 at t=" << num(c.t) << ": mass " << num(mass(v0)) << ", " << f.outside
            << " points outside the ray fan\n";
  return 0;
}

int cmd_solve(const Common& c, const std::string& snapshots, const std::vector<std::string>& argv) {
  const Scenario s = load_scenario(c.config);
  const Real eps = single_eps(c, s);
  const fs::path dir = prepare(c.out_dir);
  NlsConfig config = s.nls_config(eps);
  if (!snapshots.empty()) config.snapshot_times = parse_number_list(snapshots);
  const BandTable band = scenario_band(s);
  CorrectorField corrector;
  if (s.corrected)
    corrector = well_prepared_corrector(band, s.initial, s.confinement, s.lambda.real(), s.sigma, config.grid.points());
  const WaveField psi0 = initial_data(s.initial, band, eps, config.grid, s.corrected ? &corrector : nullptr);
  const std::vector<WaveField> out = solve_nls(config, psi0);
  Csv index(dir / "snapshots.csv", {"index", "t", "file", "mass"});
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::string name = "psi_" + std::to_string(i) + ".bin";
    write_field(dir / name, out[i]);
    index.row({std::to_string(i), num(out[i].t), name, num(mass(out[i]))});
  }
  write_manifest(dir / "manifest.ini", s, run_info("solve", argv));
  std::cout << out.size() << " snapshots written, dt " << num(config.dt) << ", n " << config.grid.n << "\n";
  return 0;
}

int cmd_compare(const Common& c, bool uncorrected, const std::vector<std::string>& argv) {
  Scenario s = load_scenario(c.config);
  if (uncorrected) s.corrected = false;
  if (!c.eps_text.empty()) s.epsilons = parse_number_list(c.eps_text);
  const fs::path dir = prepare(c.out_dir);
  const ConvergenceReport r = convergence_sweep(s, s.epsilons);
  std::vector<std::string> header{"epsilon", "l2_error", "linf_error"};
  for (int k = 0; k <= s.s_max; ++k) header.push_back("xs" + std::to_string(k) + "_error");
  header.insert(header.end(), {"worst_time", "status"});
  Csv csv(dir / "convergence.csv", header);
  Csv timing(dir / "timing.csv", {"epsilon", "runtime_seconds"});
  for (const auto& rec : r.records) {
    std::vector<std::string> row{num(rec.epsilon), num(rec.l2_error), num(rec.linf_error)};
    for (int k = 0; k <= s.s_max; ++k) row.push_back(num(rec.xs_errors.count(k) ? rec.xs_errors.at(k) : 0.0));
    row.push_back(num(rec.worst_time));
    row.push_back(rec.ok() ? (rec.floor() ? "floor" : "ok") : "failed: " + rec.failure);
    csv.row(row);
    timing.row({rec.epsilon, rec.runtime_seconds});
    std::cout << "eps=" << num(rec.epsilon) << " l2=" << num(rec.l2_error) << " linf=" << num(rec.linf_error)
              << (rec.ok() ? "" : " FAILED: " + rec.failure) << "\n";
  }
  auto show = [](const OrderFit& f) { return f.floor ? std::string("floor") : num(f.order); };
  std::cout << "fitted order l2 " << show(r.l2) << ", linf " << show(r.linf) << "\n";
  write_manifest(dir / "manifest.ini", s, run_info("compare", argv));
  return 0;
}

int cmd_wigner(const Common& c, Real mollifier, int stride, const std::vector<std::string>& argv) {
  const Scenario s = load_scenario(c.config);
  const Real eps = single_eps(c, s);
  const fs::path dir = prepare(c.out_dir);
  const BandTable band = scenario_band(s);
  const RayBundle bundle = scenario_rays(s, band, c.t);
  const UniformGrid grid = s.grid(eps);
  const EulerianFields f = eulerianize(bundle, c.t, grid.points(), s.initial, band);
  const WaveField v0 = assemble_v0(f, band, eps, grid);
  WignerOptions o = fan_window(f, mollifier);
  o.x_stride = stride;
  const WignerGrid num_w = wigner_transform(v0, o);
  const WignerGrid pred = wigner_predicted(f, band, eps, grid, o);
  Csv csv(dir / "wigner.csv", {"x", "xi", "W_numerical", "W_predicted"});
  for (Index i = 0; i < num_w.x.size(); ++i)
    for (Index m = 0; m < num_w.xi.size(); ++m)
      csv.row({num_w.x[i], num_w.xi[m], num_w.values(i, m), pred.values(i, m)});
  write_manifest(dir / "manifest.ini", s, run_info("wigner", argv));
  std::cout << "L1 discrepancy " << num(wigner_l1_discrepancy(num_w, pred)) << ", marginal defect "
            << num(num_w.marginal_defect()) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Bloch-wave WKB toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Real a0 = 0, a_bar = 0, n_particles = 0, omega0 = 1;
  auto* scale = app.add_subcommand("scale", "physical rescaling");
  scale->add_option("--a0", a0, "oscillator length [m]")->required();
  scale->add_option("--abar", a_bar, "scattering length [m]")->required();
  scale->add_option("--N", n_particles, "particle number")->required();
  scale->add_option("--omega0", omega0, "trap frequency [1/s]");

  std::string bands_config, preset = "mathieu", bands_out = "bands.csv";
  int band_n = 0, k_points = 129, sigma = 1, cutoff = 32;
  auto* bands = app.add_subcommand("bands", "band table CSV");
  bands->add_option("--config", bands_config, "scenario name or INI file");
  bands->add_option("--preset", preset, "potential preset when no config is given");
  bands->add_option("--n", band_n, "band index");
  bands->add_option("--k-points", k_points);
  bands->add_option("--sigma", sigma);
  bands->add_option("--cutoff", cutoff);
  bands->add_option("--out", bands_out, "output CSV");

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_t) {
    sub->add_option("--config", common.config, "scenario name or INI file");
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_option("--eps", common.eps_text, "epsilon, e.g. 1/32 (a list for compare)");
    if (with_t) sub->add_option("--t", common.t, "time (on the ray grid)");
  };
  auto* rays = app.add_subcommand("rays", "ray bundle CSV");
  add_common(rays, false);
  auto* wkb = app.add_subcommand("wkb", "assemble v0 at one time");
  add_common(wkb, true);
  std::string snapshots;
  auto* solve = app.add_subcommand("solve", "direct NLS solve");
  add_common(solve, false);
  solve->add_option("--snapshots", snapshots, "comma-separated snapshot times");
  bool uncorrected = false;
  auto* compare = app.add_subcommand("compare", "epsilon convergence sweep");
  add_common(compare, false);
  compare->add_flag("--uncorrected", uncorrected, "initial data without the corrector");
  Real mollifier = 0.1;
  int stride = 8;
  auto* wigner = app.add_subcommand("wigner", "Wigner transform of v0 against the limit measure");
  add_common(wigner, true);
  wigner->add_option("--mollifier", mollifier);
  wigner->add_option("--stride", stride);

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (*scale) return cmd_scale(a0, a_bar, n_particles, omega0);
    if (*bands) return cmd_bands(bands_config, preset, band_n, k_points, sigma, cutoff, bands_out, args);
    if (*rays) return cmd_rays(common, args);
    if (*wkb) return cmd_wkb(common, args);
    if (*solve) return cmd_solve(common, snapshots, args);
    if (*compare) return cmd_compare(common, uncorrected, args);
    if (*wigner) return cmd_wigner(common, mollifier, stride, args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int run_cli(int argc, char** argv) { return run_cli(std::vector<std::string>(argv, argv + argc)); }

}  // namespace bwkb
