// infolat: run quenches, compute lattices, re-fit outputs, validate against the oracle.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "infolat/infolat.hpp"
#include "infolat/manifest.hpp"
#include "infolat/validation.hpp"

namespace fs = std::filesystem;
using namespace infolat;
using io::json;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::optional<FitWindow> parse_window(const std::string& text, const char* flag) {
  if (text.empty()) return std::nullopt;
  const auto parts = io::detail::split(text, ", ");
  if (parts.size() != 2) throw ConfigError(fmt::format("{} expects lo,hi", flag));
  return FitWindow{io::detail::parse_real(flag, parts[0]), io::detail::parse_real(flag, parts[1])};
}

struct Common {
  std::string config;
  std::string out;
  int workers = 0;
  std::string format = "csv";
};

int cmd_run(const Common& o, const std::vector<double>& snapshot_times, bool snapshots_given) {
  const auto start = clock_type::now();
  QuenchConfig config = io::load_config(o.config);
  if (snapshots_given) config.snapshot_times = snapshot_times;
  config.validate();
  const int workers = resolve_workers(o.workers);
  const auto format = io::format_from_name(o.format);

  const RunResult result = run(config, workers);
  std::optional<EffectiveComparison> comparison;
  if (config.compare_effective) {
    comparison = compare_effective(result, run(effective_counterpart(config), workers));
  }

  const fs::path dir(o.out);
  const auto files = io::write_run(result, dir, format, comparison);

  io::Manifest m;
  m.command = "run";
  m.config = io::config_to_json(config);
  m.workers = workers;
  m.timings["baseline_lattice_seconds"] = io::round12(result.baseline_seconds);
  json snaps = json::array();
  for (const auto& s : result.snapshots) snaps.push_back({{"t", s.t}, {"lattice_seconds", io::round12(s.seconds)}});
  m.timings["snapshots"] = snaps;
  m.files = files;
  m.wall_seconds = seconds_since(start);
  io::write_manifest(m, dir);

  const std::size_t last = result.times.size() - 1;
  fmt::print(stderr, "{}: N={} regions {}/{}/{}, {} times, final t={}\n", protocol_name(config.protocol),
             config.total_sites(), result.regions.q, result.regions.x, result.regions.p, result.times.size(),
             result.times[last]);
  for (auto p : all_partitions) fmt::print(stderr, "  Gamma[{}] = {:+.4f}\n", partition_name(p), result.gamma.at(p)[last]);
  fmt::print(stderr, "  interface {:.4f}, diagonal {:.4f}, total {:.6f}\n", result.interface[last],
             result.diagonal[last], result.total_info[last]);
  for (const auto& f : result.fits) {
    fmt::print(stderr, "  fit {}: {:.4f} on [{}, {}]{}\n", f.name, f.fit.parameter, f.fit.window.lo, f.fit.window.hi,
               f.fit.flagged ? " (flagged)" : "");
  }
  fmt::print(stderr, "  wrote {} files to {} in {:.1f} s\n", files.size() + 1, dir.string(), m.wall_seconds);
  return 0;
}

int cmd_lattice(const Common& o, const std::string& which) {
  const auto start = clock_type::now();
  const QuenchConfig config = io::load_config(o.config);
  const int workers = resolve_workers(o.workers);
  const auto format = io::format_from_name(o.format);
  const QuenchSetup setup = build_quench(config);
  if (which != "pre" && which != "post") throw ConfigError("--hamiltonian must be pre or post");
  const CovarianceMatrix state = ground_state(which == "pre" ? setup.pre : setup.post, setup.options);

  const auto t0 = clock_type::now();
  const InformationLattice lat = local_information(state, workers);
  const double lattice_seconds = seconds_since(t0);

  const fs::path dir(o.out);
  fs::create_directories(dir);
  io::Manifest m;
  m.command = "lattice";
  m.config = io::config_to_json(config);
  m.workers = workers;
  m.timings["lattice_seconds"] = io::round12(lattice_seconds);
  m.files = {io::write_table(io::lattice_table(lat, "lattice_ground"), dir, format)};
  m.wall_seconds = seconds_since(start);
  io::write_manifest(m, dir);
  fmt::print(stderr, "lattice: N={} ({} ground state), total information {:.10f}, {:.2f} s on {} workers\n",
             lat.sites(), which, lat.total_information(), lattice_seconds, workers);
  return 0;
}

/// Profiles written by a run, ordered by time.
std::vector<InterfaceProfile> read_profiles(const fs::path& dir) {
  static const std::regex pattern(R"(profile_t([0-9.eE+-]+)\.csv)");
  std::vector<InterfaceProfile> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch match;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, match, pattern)) continue;
    const auto csv = io::read_csv(entry.path());
    out.push_back({std::stod(match[1].str()), csv.numbers("bits")});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  return out;
}

int cmd_fit(const Common& o, const std::string& decay_window, const std::string& profile_window) {
  const auto start = clock_type::now();
  const fs::path dir(o.out);
  json manifest = io::read_manifest(dir);
  if (manifest.value("command", "") != "run") throw ConfigError("fit needs the output directory of a csv run");
  QuenchConfig config = io::config_from_json(manifest.at("config"));
  if (auto w = parse_window(decay_window, "--decay-window")) config.decay_window = w;
  if (auto w = parse_window(profile_window, "--profile-window")) config.profile_window = w;

  const auto itop = io::read_csv(dir / "itop.csv");
  std::optional<InformationLattice> baseline;
  if (fs::exists(dir / "lattice_baseline.csv")) baseline = io::lattice_from_csv(io::read_csv(dir / "lattice_baseline.csv"));
  const auto fits = standard_fits(config, itop.numbers("t"), itop.numbers("bits"), read_profiles(dir),
                                  baseline ? &*baseline : nullptr);
  io::write_text(dir / "fits.json", io::fits_to_json(fits).dump(1) + "\n");

  // refresh checksums, keeping the original run's timings
  io::Manifest m;
  m.command = "run";
  m.config = io::config_to_json(config);
  m.workers = manifest.value("workers", 1);
  m.timings = manifest.value("timings", json::object());
  for (const auto& f : manifest.at("files")) m.files.push_back(f.at("name").get<std::string>());
  m.wall_seconds = manifest.value("wall_seconds", 0.0);
  m.timings["refit_seconds"] = io::round12(seconds_since(start));
  io::write_manifest(m, dir);
  for (const auto& f : fits) {
    fmt::print(stderr, "fit {}: {:.6f} on [{}, {}], {} points{}{}\n", f.name, f.fit.parameter, f.fit.window.lo,
               f.fit.window.hi, f.fit.points, f.fit.flagged ? " (flagged) " : "", f.fit.note);
  }
  return 0;
}

int cmd_validate(int cases) {
  const auto start = clock_type::now();
  const auto report = validation::run_suite(cases);
  const double worst = report.max_deviation();
  fmt::print("validate: {} cases, max oracle deviation {:.3e} (worst: {}), {:.1f} s\n", report.cases.size(), worst,
             report.worst_case().name, seconds_since(start));
  return worst < 1e-8 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-lattice simulator for free-fermion quenches"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));

  Common common;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", common.config, "Config file (key = value or JSON)");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "Output directory")->required();
    sub->add_option("--workers", common.workers, "Worker threads (default: INFOLAT_WORKERS or all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", common.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* run_cmd = app.add_subcommand("run", "Execute a quench and write its observables");
  add_common(run_cmd, true);
  std::vector<double> snapshot_times;
  auto* snap_opt = run_cmd->add_option("--snapshot-times", snapshot_times, "Times for full lattices (overrides config)")
                       ->delimiter(',');

  auto* lattice_cmd = app.add_subcommand("lattice", "Information lattice of a single ground state");
  add_common(lattice_cmd, true);
  std::string which = "pre";
  lattice_cmd->add_option("--hamiltonian", which, "Which Hamiltonian's ground state")->check(CLI::IsMember({"pre", "post"}));

  auto* fit_cmd = app.add_subcommand("fit", "Re-fit decay and power laws from a run directory");
  fit_cmd->add_option("--out", common.out, "Run output directory")->required()->check(CLI::ExistingDirectory);
  std::string decay_window, profile_window;
  fit_cmd->add_option("--decay-window", decay_window, "lo,hi in time");
  fit_cmd->add_option("--profile-window", profile_window, "lo,hi in ell");

  auto* validate_cmd = app.add_subcommand("validate", "Oracle-equivalence suite on N <= 8");
  int cases = 60;
  validate_cmd->add_option("--cases", cases, "Number of random Hamiltonians")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(common, snapshot_times, snap_opt->count() > 0);
    if (lattice_cmd->parsed()) return cmd_lattice(common, which);
    if (fit_cmd->parsed()) return cmd_fit(common, decay_window, profile_window);
    if (validate_cmd->parsed()) return cmd_validate(cases);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 1;
  } catch (const NumericError& e) {
    fmt::print(stderr, "numerical error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
