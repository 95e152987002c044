#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "spinloc/error.hpp"
#include "spinloc/io.hpp"

namespace {

using namespace spinloc;
using namespace spinloc::cli;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

// Accepts TOML-style key=value files and also a run manifest, whose stored
// config text is replayed.
class ManifestAwareConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream ss;
    ss << input.rdbuf();
    const std::string text = ss.str();
    std::string replay = config_from_manifest(text);
    std::istringstream body(replay.empty() ? text : replay);
    return CLI::ConfigTOML::from_config(body);
  }
};

void print_error(std::string_view kind, std::string_view message, int code) {
  ordered_json j;
  j["error"] = {{"kind", std::string(kind)}, {"message", std::string(message)}, {"exit_code", code}};
  std::cerr << j.dump() << "\n";
}

std::string existing_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) return fmt::format("input file not found: {}", path);
  return {};
}

CLI::Option* input_option(CLI::App* app, const std::string& name, std::string& target, const std::string& help) {
  return app->add_option(name, target, help)->check(CLI::Validator(existing_file, "FILE", "existing file"));
}

void add_placement_options(CLI::App* sub, Options& o) {
  sub->add_option("--tolerance", o.tolerance, "Default tolerance (Hz)");
  sub->add_option("--override", o.overrides, "Per-pair tolerance A:B=hz (repeatable)");
  sub->add_flag("--strong-pair-overrides", o.strong_pair_overrides, "Use 3 Hz for Si1:Si2 and Si1:Si12");
  sub->add_option("--anchor", o.anchor, "Anchor label");
  sub->add_option("--min-detectable", o.min_detectable, "Smallest detectable coupling (Hz)");
  sub->add_option("--relative-strong", o.relative_strong, "Relative tolerance above the strong threshold");
  sub->add_option("--strong-threshold", o.strong_threshold, "Strong coupling threshold (Hz)");
  sub->add_option("--order", o.order, "Placement order, comma separated")->delimiter(',');
  sub->add_option("--max-branches", o.max_branches, "Cap on partial solutions");
  sub->add_flag("--weak-exclusion", o.weak_exclusion, "Reject sites implying an unobserved strong coupling");
  sub->add_flag("--no-symmetry", o.no_symmetry, "Keep symmetry-equivalent solutions apart");
}

void add_cluster_options(CLI::App* sub, Options& o) {
  sub->add_option("--n-si", o.cluster_spec.n_si, "Number of Si spins (anchor included)");
  sub->add_option("--n-c", o.cluster_spec.n_c, "Number of C spins");
  sub->add_option("--structure", o.structure, "clustered or random");
  sub->add_option("--clusters", o.cluster_spec.clusters, "Number of sub-clusters");
  sub->add_option("--min-size", o.cluster_spec.min_cluster_size, "Smallest sub-cluster");
  sub->add_option("--max-size", o.cluster_spec.max_cluster_size, "Largest sub-cluster");
  sub->add_option("--region-radius", o.cluster_spec.region_radius, "Spins lie within this distance of the vacancy (A)");
  sub->add_option("--min-links", o.cluster_spec.min_links, "Links required to earlier spins");
  sub->add_option("--link-threshold", o.cluster_spec.link_threshold, "Coupling that counts as a link (Hz)");
}

void add_noise_options(CLI::App* sub, Options& o) {
  sub->add_option("--noise", o.noise, "Noise amplitude (Hz): sigma or half-width");
  sub->add_option("--noise-kind", o.noise_kind, "gaussian or uniform");
  sub->add_option("--min-detectable", o.min_detectable, "Drop couplings below this (Hz)");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Nuclear spin localization around a V2 center in 4H-SiC"};
  app.config_formatter(std::make_shared<ManifestAwareConfig>());
  app.set_config("--config", "", "Read options from a key=value file or a run manifest; flags win");
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("-o,--output-dir", o.output_dir, "Directory for outputs and manifest.json")->configurable(false);
  app.add_option("--constants", o.constants_file, "Constants table (JSON)")
      ->check(CLI::Validator(existing_file, "FILE", "existing file"));
  app.add_option("--g", o.g_electron, "Electron g-factor");
  app.add_option("--gamma-si29", o.gamma_si29, "29Si gyromagnetic ratio (Hz/T)");
  app.add_option("--gamma-c13", o.gamma_c13, "13C gyromagnetic ratio (Hz/T)");
  app.add_option("--field", o.field_gauss, "Static field along c (G)");
  app.add_option("--zfs", o.zfs_hz, "Zero-field splitting D (Hz)");
  app.add_option("--transverse", o.transverse_gauss, "Transverse field along x (G)");
  app.add_option("--lattice-a", o.lattice_a, "Lattice constant a (A)");
  app.add_option("--lattice-c", o.lattice_c, "Lattice constant c (A)");
  app.add_option("--carbon-offset", o.carbon_offset, "Si-C offset along c in units of c");
  app.add_option("--k-site", o.k_site, "Vacancy site variant")->check(CLI::IsMember({"lower", "upper"}));
  app.add_option("--seed", o.seed, "Seed for synthetic data");

  auto* lattice = app.add_subcommand("lattice", "Export lattice sites");
  lattice->add_option("--radius", o.lattice_radius, "Radius around the vacancy (A)");
  lattice->add_option("--format", o.format, "csv, json or both");

  auto* place = app.add_subcommand("place", "Place spins on lattice sites from SEDOR couplings");
  input_option(place, "--couplings", o.couplings, "Coupling table (CSV or JSON)")->required();
  add_placement_options(place, o);

  auto* refine_cmd = app.add_subcommand("refine", "Continuous least-squares refinement of a placement");
  input_option(refine_cmd, "--solution", o.solution, "solutions.json from place")->required();
  input_option(refine_cmd, "--couplings", o.couplings, "Coupling table")->required();
  refine_cmd->add_option("--solution-index", o.solution_index, "Which solution to refine");
  refine_cmd->add_flag("--weighted", o.weighted, "Weight residuals by 1/sigma");
  refine_cmd->add_option("--max-iterations", o.max_iterations, "Iteration cap");
  refine_cmd->add_option("--min-detectable", o.min_detectable, "Smallest detectable coupling (Hz)");
  refine_cmd->add_option("--anchor", o.anchor, "Anchor label");

  auto* calibrate = app.add_subcommand("calibrate", "Field correction and g-factor from hyperfine data");
  input_option(calibrate, "--freqs", o.freqs, "Nuclear frequencies CSV")->required();
  input_option(calibrate, "--dft", o.dft, "DFT hyperfine CSV")->required();
  input_option(calibrate, "--bath", o.bath, "Bath spectrum CSV (frequency_Hz, amplitude)");
  calibrate->add_option("--bath-species", o.bath_species, "c13 or si29");
  calibrate->add_option("--half-width", o.half_width, "Scan half-width (G)");
  calibrate->add_option("--step", o.step, "Scan step (G)");
  calibrate->add_option("--metric", o.metric, "perp or joint");
  calibrate->add_option("--scan-labels", o.scan_labels, "Spins used for the field scan")->delimiter(',');
  calibrate->add_option("--delta-b-sigma", o.delta_b_sigma, "Uncertainty of the field shift (G)");

  auto* telegraph = app.add_subcommand("telegraph", "Flip rates from a readout time trace");
  input_option(telegraph, "--trace", o.trace, "Trace CSV (t_s, counts_per_s)")->required();
  telegraph->add_option("--threshold", o.threshold, "Bright/dark threshold (counts/s)");
  telegraph->add_option("--window", o.window, "Running average width (bins, odd)");
  telegraph->add_option("--fit", o.fit_mode, "mle or histogram");
  telegraph->add_flag("--include-censored", o.include_censored, "Keep the first and last dwell");

  auto* ddrf = app.add_subcommand("ddrf-calc", "DDRF phase update, effective Rabi frequency and rotation angle");
  ddrf->add_option("--tau", o.ddrf.tau_s, "Inter-pulse spacing (s)");
  ddrf->add_option("--pulses", o.ddrf.pulses, "Number of electron pi pulses (even)");
  ddrf->add_option("--f-rf", o.ddrf.f_rf_hz, "RF frequency (Hz)")->required();
  ddrf->add_option("--rabi", o.ddrf.omega_hz, "Bare RF Rabi frequency (Hz)");
  ddrf->add_option("--f0", o.ddrf.f0_hz, "Nuclear frequency, first electron state (Hz)")->required();
  ddrf->add_option("--f1", o.ddrf.f1_hz, "Nuclear frequency, second electron state (Hz)")->required();
  ddrf->add_option("--target-angle", o.target_angle_deg, "Solve the Rabi frequency for this angle (deg)");
  ddrf->add_flag("--json", o.json, "JSON output");

  auto* synth = app.add_subcommand("synth", "Synthetic data");
  synth->require_subcommand(1);
  auto* synth_cluster = synth->add_subcommand("cluster", "Ground-truth spin cluster");
  add_cluster_options(synth_cluster, o);
  auto* synth_couplings = synth->add_subcommand("couplings", "Noisy coupling table for a cluster");
  input_option(synth_couplings, "--cluster", o.cluster_file, "cluster.json")->required();
  add_noise_options(synth_couplings, o);
  synth_couplings->add_option("--format", o.format, "csv or json");
  auto* synth_telegraph = synth->add_subcommand("telegraph", "Two-state readout trace");
  synth_telegraph->add_option("--rate-bd", o.telegraph.rate_bright_to_dark, "Bright to dark rate (Hz)");
  synth_telegraph->add_option("--rate-db", o.telegraph.rate_dark_to_bright, "Dark to bright rate (Hz)");
  synth_telegraph->add_option("--bright", o.telegraph.bright_counts, "Bright count rate (counts/s)");
  synth_telegraph->add_option("--dark", o.telegraph.dark_counts, "Dark count rate (counts/s)");
  synth_telegraph->add_flag("--no-shot-noise", o.no_shot_noise, "Exact count rates");
  synth_telegraph->add_option("--duration", o.telegraph.duration, "Trace length (s)");
  synth_telegraph->add_option("--dt", o.telegraph.dt, "Bin width (s)");

  auto* graph = app.add_subcommand("export-graph", "Coupling graph as JSON and DOT");
  input_option(graph, "--couplings", o.couplings, "Coupling table");
  input_option(graph, "--solution", o.solution, "solutions.json for node positions");
  input_option(graph, "--cluster", o.cluster_file, "cluster.json for node positions");
  graph->add_option("--cutoff", o.cutoff, "Omit edges below this (Hz)");
  graph->add_flag("--dot", o.dot, "Also write graph.dot");

  auto* reproduce = app.add_subcommand("reproduce", "synth -> place -> refine -> report on a 25-spin reference cluster");
  add_cluster_options(reproduce, o);
  add_noise_options(reproduce, o);
  reproduce->add_option("--tolerance", o.tolerance, "Default tolerance (Hz)");

  auto* sweep = app.add_subcommand("sweep", "Perturbative SEDOR deviation sweep for a pair preset");
  sweep->add_option("--preset", o.preset, "strong or weak");
  sweep->add_option("--grid", o.grid, "Azimuth grid points per nucleus");
  sweep->add_option("--transverse", o.sweep_transverse, "Transverse field (G)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    print_error("usage", e.what(), kExitUsage);
    return kExitUsage;
  }

  CommandResult result;
  try {
    if (*lattice) result = run_lattice(o);
    else if (*place) result = run_place(o);
    else if (*refine_cmd) result = run_refine(o);
    else if (*calibrate) result = run_calibrate(o);
    else if (*telegraph) result = run_telegraph(o);
    else if (*ddrf) result = run_ddrf(o);
    else if (*synth_cluster) result = run_synth_cluster(o);
    else if (*synth_couplings) result = run_synth_couplings(o);
    else if (*synth_telegraph) result = run_synth_telegraph(o);
    else if (*graph) result = run_export_graph(o);
    else if (*reproduce) result = run_reproduce(o);
    else if (*sweep) result = run_sweep(o);

    result.record.config_text = app.config_to_str(false, false);
    if (result.write_files) {
      const std::filesystem::path dir(o.output_dir);
      for (const auto& a : result.record.outputs) io::write_text_file(dir / a.name, a.content);
      io::write_text_file(dir / "manifest.json", manifest_json(result.record));
    }
  } catch (const Error& e) {
    const int code = e.kind() == ErrorKind::InvalidArgument ? kExitUsage : kExitDomain;
    print_error(to_string(e.kind()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    print_error("internal", e.what(), kExitDomain);
    return kExitDomain;
  }

  std::cout << result.stdout_text;
  if (!result.error.is_null()) {
    print_error(result.error["kind"].get<std::string>(), result.error["message"].get<std::string>(), kExitDomain);
    return kExitDomain;
  }
  return kExitOk;
}
