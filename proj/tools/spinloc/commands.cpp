#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "spinloc/calibrate.hpp"
#include "spinloc/error.hpp"
#include "spinloc/hamiltonian.hpp"
#include "spinloc/io.hpp"
#include "spinloc/lattice.hpp"
#include "spinloc/placement.hpp"
#include "spinloc/refine.hpp"
#include "spinloc/telegraph.hpp"
#include "spinloc/units.hpp"

namespace spinloc::cli {

namespace {

ConstantsTable constants_of(const Options& o) {
  ConstantsTable t = o.constants_file.empty() ? ConstantsTable{}
                                              : constants_from_json(io::read_text_file(o.constants_file));
  if (o.g_electron) t.g_electron = *o.g_electron;
  if (o.gamma_si29) t.gamma_si29_hz_per_t = *o.gamma_si29;
  if (o.gamma_c13) t.gamma_c13_hz_per_t = *o.gamma_c13;
  if (o.field_gauss) t.field_gauss = *o.field_gauss;
  if (o.zfs_hz) t.zero_field_splitting_hz = *o.zfs_hz;
  t.validate();
  return t;
}

LatticeParams lattice_of(const Options& o) {
  LatticeParams p;
  if (o.lattice_a) p.a = *o.lattice_a;
  if (o.lattice_c) p.c = *o.lattice_c;
  if (o.carbon_offset) p.carbon_offset = *o.carbon_offset;
  p.k_site = o.k_site == "upper" ? KSiteVariant::Upper : KSiteVariant::Lower;
  p.validate();
  return p;
}

FieldConfig field_of(const Options& o, const ConstantsTable& t) {
  FieldConfig f;
  f.b_z = t.field_gauss;
  f.b_x = o.transverse_gauss;
  f.g_electron = t.g_electron;
  f.validate();
  return f;
}

/// "si12" -> "Si12", "c3" -> "C3"; other labels pass through.
std::string normalise_label(std::string label) {
  std::string lower = label;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower.rfind("si", 0) == 0) return "Si" + label.substr(2);
  if (lower.rfind('c', 0) == 0) return "C" + label.substr(1);
  return label;
}

std::pair<PairKey, double> parse_override(const std::string& text) {
  const auto colon = text.find(':');
  const auto eq = text.find('=');
  require(colon != std::string::npos && eq != std::string::npos && colon < eq, ErrorKind::InvalidArgument,
          fmt::format("override '{}' is not of the form A:B=hz", text));
  const std::string a = normalise_label(text.substr(0, colon));
  const std::string b = normalise_label(text.substr(colon + 1, eq - colon - 1));
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(text.substr(eq + 1), &used);
    require(used == text.size() - eq - 1, ErrorKind::InvalidArgument, "");
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, fmt::format("override '{}': tolerance is not a number", text));
  }
  require(v > 0.0 && a != b, ErrorKind::InvalidArgument, fmt::format("override '{}' is invalid", text));
  return {make_pair_key(a, b), v};
}

PlacementConfig placement_config_of(const Options& o, const ConstantsTable& t) {
  PlacementConfig c = o.strong_pair_overrides ? strong_pair_placement_config() : PlacementConfig{};
  c.tolerance_default = o.tolerance;
  for (const auto& text : o.overrides) {
    const auto [key, v] = parse_override(text);
    c.tolerance_overrides[key] = v;
  }
  c.relative_tolerance_strong = o.relative_strong;
  c.strong_threshold = o.strong_threshold;
  c.min_detectable = o.min_detectable;
  c.anchor_label = normalise_label(o.anchor);
  for (const auto& l : o.order) c.placement_order.push_back(normalise_label(l));
  c.max_branches = o.max_branches;
  c.weak_coupling_exclusion = o.weak_exclusion;
  c.reduce_symmetry = !o.no_symmetry;
  c.constants = t;
  c.validate();
  return c;
}

ordered_json placement_config_json(const PlacementConfig& c) {
  ordered_json j;
  j["tolerance_default_hz"] = c.tolerance_default;
  auto& ov = j["tolerance_overrides_hz"] = ordered_json::object();
  for (const auto& [k, v] : c.tolerance_overrides) ov[k.first + ":" + k.second] = v;
  j["relative_tolerance_strong"] = c.relative_tolerance_strong;
  j["strong_threshold_hz"] = c.strong_threshold;
  j["min_detectable_hz"] = c.min_detectable;
  j["anchor"] = c.anchor_label;
  j["placement_order"] = c.placement_order;
  j["max_branches"] = c.max_branches;
  j["weak_coupling_exclusion"] = c.weak_coupling_exclusion;
  j["reduce_symmetry"] = c.reduce_symmetry;
  return j;
}

ordered_json lattice_json(const LatticeParams& p) {
  ordered_json j;
  j["a_A"] = p.a;
  j["c_A"] = p.c;
  j["carbon_offset"] = p.carbon_offset;
  j["k_site"] = p.k_site == KSiteVariant::Lower ? "lower" : "upper";
  return j;
}

std::string read_input(RunRecord& r, const std::string& path) {
  std::string text = io::read_text_file(path);
  r.inputs.emplace_back(path, text);
  return text;
}

std::vector<CouplingMeasurement> read_couplings_input(RunRecord& r, const std::string& path) {
  const std::string text = read_input(r, path);
  return path.size() > 5 && path.ends_with(".json") ? io::couplings_from_json(text) : io::couplings_from_csv(text);
}

CommandResult start(const Options& o, std::string name) {
  CommandResult c;
  c.record.subcommand = std::move(name);
  c.record.constants = constants_of(o);
  if (!o.constants_file.empty()) c.record.inputs.emplace_back(o.constants_file, io::read_text_file(o.constants_file));
  return c;
}

}  // namespace

CommandResult run_lattice(const Options& o) {
  auto c = start(o, "lattice");
  const LatticeParams p = lattice_of(o);
  require(o.format == "csv" || o.format == "json" || o.format == "both", ErrorKind::InvalidArgument,
          "--format must be csv, json or both");
  const auto sites = build_lattice(p, o.lattice_radius);
  if (o.format != "json") c.record.outputs.push_back({"lattice.csv", io::lattice_to_csv(sites)});
  if (o.format != "csv") c.record.outputs.push_back({"lattice.json", io::lattice_to_json(sites, p)});
  c.record.resolved["lattice"] = lattice_json(p);
  c.record.resolved["radius_A"] = o.lattice_radius;
  c.stdout_text = fmt::format("{} sites within {} A\n", sites.size(), o.lattice_radius);
  return c;
}

CommandResult run_place(const Options& o) {
  auto c = start(o, "place");
  const LatticeParams p = lattice_of(o);
  const PlacementConfig cfg = placement_config_of(o, c.record.constants);
  const auto table = read_couplings_input(c.record, o.couplings);
  const Lattice lattice(p);
  const PlacementResult result = place_all(table, lattice, cfg);
  c.record.outputs.push_back({"solutions.json", io::placement_to_json(result, p)});
  c.record.resolved["lattice"] = lattice_json(p);
  c.record.resolved["placement"] = placement_config_json(cfg);
  c.stdout_text = fmt::format("{} solution(s), {} ambiguous spin(s), branch history {}\n", result.solutions.size(),
                              result.ambiguous.size(), fmt::join(result.branch_history, " "));
  return c;
}

CommandResult run_refine(const Options& o) {
  auto c = start(o, "refine");
  const LatticeParams p = lattice_of(o);
  const Lattice lattice(p);
  const auto solutions = io::solutions_from_json(read_input(c.record, o.solution), lattice);
  require(!solutions.empty(), ErrorKind::Infeasible, "the solutions file holds no solution to refine");
  require(o.solution_index >= 0 && static_cast<std::size_t>(o.solution_index) < solutions.size(),
          ErrorKind::InvalidArgument,
          fmt::format("--solution-index {} out of range ({} solutions)", o.solution_index, solutions.size()));
  const auto table = read_couplings_input(c.record, o.couplings);
  RefineConfig cfg;
  cfg.max_iterations = o.max_iterations;
  cfg.weighted = o.weighted;
  cfg.min_detectable = o.min_detectable;
  cfg.anchor_label = normalise_label(o.anchor);
  cfg.constants = c.record.constants;
  const auto result = refine(solutions[static_cast<std::size_t>(o.solution_index)], table, cfg);
  c.record.outputs.push_back({"refined.json", io::refinement_to_json(result)});
  c.record.outputs.push_back({"refined.csv", io::refinement_to_csv(result)});
  c.record.resolved["lattice"] = lattice_json(p);
  c.record.resolved["refine"] = {{"max_iterations", cfg.max_iterations},
                                 {"weighted", cfg.weighted},
                                 {"min_detectable_hz", cfg.min_detectable},
                                 {"anchor", cfg.anchor_label},
                                 {"solution_index", o.solution_index}};
  c.stdout_text = fmt::format("residual {:.6g} -> {:.6g} Hz^2 in {} iterations ({}); mean shift {:.3f} A, max {:.3f} A\n",
                              result.initial_residual, result.residual, result.iterations, result.stop_reason,
                              result.displacements.mean, result.displacements.max);
  return c;
}

CommandResult run_calibrate(const Options& o) {
  auto c = start(o, "calibrate");
  const ConstantsTable& t = c.record.constants;
  const FieldConfig field = field_of(o, t);
  const auto freqs = io::freqs_from_csv(read_input(c.record, o.freqs));
  const auto dft = io::dft_from_csv(read_input(c.record, o.dft));
  require(o.metric == "perp" || o.metric == "joint", ErrorKind::InvalidArgument, "--metric must be perp or joint");
  FieldScanConfig scan;
  scan.half_width = o.half_width;
  scan.step = o.step;
  scan.metric = o.metric == "perp" ? ScanMetric::Perp : ScanMetric::Joint;

  std::vector<std::string> scan_labels;
  for (const auto& l : o.scan_labels) scan_labels.push_back(normalise_label(l));
  if (scan_labels.empty())
    for (const auto& f : freqs)
      if (dft.count(f.label)) scan_labels.push_back(f.label);

  ordered_json report;
  auto& scans = report["field_scans"] = ordered_json::array();
  std::vector<double> shifts;
  for (const auto& label : scan_labels) {
    const auto f = std::find_if(freqs.begin(), freqs.end(), [&](const SpinFrequencies& x) { return x.label == label; });
    require(f != freqs.end(), ErrorKind::InvalidArgument, fmt::format("scan label '{}' has no frequencies", label));
    const auto d = dft.find(label);
    require(d != dft.end(), ErrorKind::InvalidArgument, fmt::format("scan label '{}' has no DFT entry", label));
    const auto r = field_scan_min_aperp(*f, d->second, field, spin_species_of_label(label, t), scan);
    shifts.push_back(r.delta_b);
    ordered_json e;
    e["label"] = label;
    e["delta_b_gauss"] = r.delta_b;
    e["a_zz_hz"] = r.a_zz;
    e["a_perp_hz"] = r.a_perp;
    e["objective"] = r.objective;
    e["curvature"] = r.curvature;
    scans.push_back(std::move(e));
  }
  require(!shifts.empty(), ErrorKind::InvalidArgument, "no spin has both frequencies and a DFT entry");
  const double n = static_cast<double>(shifts.size());
  const double mean = std::accumulate(shifts.begin(), shifts.end(), 0.0) / n;
  double sigma = 0.0;
  if (o.delta_b_sigma) {
    sigma = *o.delta_b_sigma;
  } else if (shifts.size() > 1) {
    double ss = 0.0;
    for (double s : shifts) ss += (s - mean) * (s - mean);
    sigma = std::sqrt(ss / (n - 1.0));
  }
  const auto g = g_factor_from_delta_b(mean, sigma, field.b_z, t.g_electron);
  report["delta_b_gauss"] = g.delta_b;
  report["delta_b_uncertainty_gauss"] = g.delta_b_uncertainty;
  report["relative_shift"] = g.relative_shift;
  report["g_factor"] = g.g_factor;
  report["g_uncertainty"] = g.g_uncertainty;

  FieldConfig corrected = field;
  corrected.b_z += mean;
  std::map<std::string, HyperfineTensor> experimental;
  auto& tensors = report["hyperfine_at_corrected_field"] = ordered_json::array();
  for (const auto& f : freqs) {
    // An in-plane spin can come out with a slightly negative A_perp^2 at the
    // averaged field; report it as zero and keep the raw value.
    const auto sol = solve_hyperfine(f.f_a, f.f_b, corrected, spin_species_of_label(f.label, t), f.m_s_a, f.m_s_b);
    const HyperfineTensor h{sol.a_zz, std::sqrt(std::max(sol.perp_squared, 0.0)), 0.0};
    experimental[f.label] = h;
    tensors.push_back({{"label", f.label},
                       {"a_zz_hz", h.a_zz},
                       {"a_perp_hz", h.a_perp()},
                       {"a_perp_squared_hz2", sol.perp_squared}});
  }
  const auto cmp = dft_comparison_report(experimental, dft);
  auto& rows = report["dft_comparison"]["rows"] = ordered_json::array();
  for (const auto& r : cmp.rows)
    rows.push_back({{"label", r.label},
                    {"a_zz_relative", r.a_zz_relative},
                    {"a_perp_relative", r.a_perp_relative},
                    {"a_zz_sign_mismatch", r.a_zz_sign_mismatch}});
  report["dft_comparison"]["a_zz_within_10_percent"] = cmp.a_zz_within_10;
  report["dft_comparison"]["a_zz_over_30_percent"] = cmp.a_zz_over_30;
  report["dft_comparison"]["a_perp_within_10_percent"] = cmp.a_perp_within_10;
  report["dft_comparison"]["a_perp_over_30_percent"] = cmp.a_perp_over_30;
  report["dft_comparison"]["sign_mismatches"] = cmp.sign_mismatches;
  report["dft_comparison"]["missing_in_dft"] = cmp.missing_in_dft;
  report["dft_comparison"]["missing_in_experiment"] = cmp.missing_in_experiment;

  if (!o.bath.empty()) {
    require(o.bath_species == "c13" || o.bath_species == "si29", ErrorKind::InvalidArgument,
            "--bath-species must be c13 or si29");
    const auto spectrum = io::spectrum_from_csv(read_input(c.record, o.bath));
    const auto b = bath_center_shift(spectrum, o.bath_species == "c13" ? t.c13() : t.si29(), field.b_z);
    report["bath"] = {{"species", o.bath_species},     {"center_hz", b.center_hz},
                      {"width_hz", b.width_hz},        {"amplitude", b.amplitude},
                      {"offset", b.offset},            {"delta_f_hz", b.delta_f_hz},
                      {"delta_b_gauss", b.delta_b_gauss}, {"snr", b.snr}};
  }
  c.record.outputs.push_back({"calibration.json", report.dump(2) + "\n"});
  c.record.resolved["field"] = {{"b_z_gauss", field.b_z}, {"b_x_gauss", field.b_x}, {"g_electron", field.g_electron}};
  c.record.resolved["scan"] = {{"half_width_gauss", scan.half_width}, {"step_gauss", scan.step}, {"metric", o.metric},
                               {"labels", scan_labels}};
  c.stdout_text = fmt::format("dB = {:.3f} +- {:.3f} G, g = {:.5f} +- {:.5f}\n", g.delta_b, g.delta_b_uncertainty,
                              g.g_factor, g.g_uncertainty);
  return c;
}

CommandResult run_telegraph(const Options& o) {
  auto c = start(o, "telegraph");
  require(o.fit_mode == "mle" || o.fit_mode == "histogram", ErrorKind::InvalidArgument,
          "--fit must be mle or histogram");
  const auto trace = io::trace_from_csv(read_input(c.record, o.trace));
  const auto result = analyze_telegraph(trace, o.window, o.threshold,
                                        o.fit_mode == "mle" ? RateFitMode::MaximumLikelihood : RateFitMode::Histogram,
                                        o.include_censored);
  c.record.outputs.push_back({"telegraph.json", io::telegraph_to_json(result)});
  c.record.resolved["telegraph"] = {{"threshold_counts_per_s", o.threshold},
                                    {"window_bins", o.window},
                                    {"fit", o.fit_mode},
                                    {"include_censored", o.include_censored}};
  c.stdout_text = fmt::format("gamma_bd = {:.4f} +- {:.4f} Hz, gamma_db = {:.4f} +- {:.4f} Hz\n",
                              result.bright_to_dark.rate, result.bright_to_dark.uncertainty,
                              result.dark_to_bright.rate, result.dark_to_bright.uncertainty);
  return c;
}

CommandResult run_ddrf(const Options& o) {
  auto c = start(o, "ddrf-calc");
  c.write_files = false;
  SequenceParams p = o.ddrf;
  if (o.target_angle_deg) {
    p.omega_hz = 1.0;
    p.validate();
    p.omega_hz = solve_rabi_for_angle(units::deg_to_rad(*o.target_angle_deg), p);
  }
  p.validate();
  const double phase = ddrf_phase_update(p.f0_hz, p.f1_hz, p.f_rf_hz, p.tau_s);
  const auto rot = rotation_angle(p);
  ordered_json j;
  j["tau_s"] = p.tau_s;
  j["pulses"] = p.pulses;
  j["f_rf_hz"] = p.f_rf_hz;
  j["omega_hz"] = p.omega_hz;
  j["f0_hz"] = p.f0_hz;
  j["f1_hz"] = p.f1_hz;
  j["phase_update_rad"] = phase;
  j["omega_eff_hz"] = rot.omega_eff_hz;
  j["theta_rad"] = rot.theta;
  j["theta_deg"] = rot.theta * 180.0 / std::numbers::pi;
  if (o.json) {
    c.stdout_text = j.dump(2) + "\n";
  } else {
    c.stdout_text = fmt::format(
        "phase update   {:.6f} rad\nOmega          {:.6g} Hz\nOmega_eff      {:.6g} Hz\ntheta_N        {:.6f} rad "
        "({:.3f} deg), conditional -/+\n",
        phase, p.omega_hz, rot.omega_eff_hz, rot.theta, rot.theta * 180.0 / std::numbers::pi);
  }
  return c;
}

CommandResult run_synth_cluster(const Options& o) {
  auto c = start(o, "synth cluster");
  const LatticeParams p = lattice_of(o);
  require(o.structure == "clustered" || o.structure == "random", ErrorKind::InvalidArgument,
          "--structure must be clustered or random");
  ClusterSpec spec = o.cluster_spec;
  spec.structure = o.structure == "random" ? ClusterStructure::Random : ClusterStructure::Clustered;
  const auto cluster = generate_cluster(Lattice(p), spec, o.seed, c.record.constants);
  c.record.outputs.push_back({"cluster.json", io::cluster_to_json(cluster, p)});
  c.record.resolved["lattice"] = lattice_json(p);
  c.record.resolved["seed"] = o.seed;
  c.stdout_text = fmt::format("{} spins\n", cluster.spins.size());
  return c;
}

namespace {
NoiseModel noise_of(const Options& o) {
  require(o.noise_kind == "gaussian" || o.noise_kind == "uniform", ErrorKind::InvalidArgument,
          "--noise-kind must be gaussian or uniform");
  return {o.noise_kind == "gaussian" ? NoiseKind::Gaussian : NoiseKind::Uniform, o.noise};
}

Artifact couplings_artifact(const Options& o, const std::vector<CouplingMeasurement>& table) {
  require(o.format == "csv" || o.format == "json", ErrorKind::InvalidArgument, "--format must be csv or json");
  return o.format == "json" ? Artifact{"couplings.json", io::couplings_to_json(table)}
                            : Artifact{"couplings.csv", io::couplings_to_csv(table)};
}
}  // namespace

CommandResult run_synth_couplings(const Options& o) {
  auto c = start(o, "synth couplings");
  const LatticeParams p = lattice_of(o);
  const auto cluster = io::cluster_from_json(read_input(c.record, o.cluster_file), Lattice(p));
  const auto table = emit_couplings(cluster, o.min_detectable, noise_of(o), o.seed, c.record.constants);
  c.record.outputs.push_back(couplings_artifact(o, table));
  c.record.resolved["noise"] = {{"kind", o.noise_kind}, {"amplitude_hz", o.noise}};
  c.record.resolved["min_detectable_hz"] = o.min_detectable;
  c.record.resolved["seed"] = o.seed;
  c.stdout_text = fmt::format("{} couplings\n", table.size());
  return c;
}

CommandResult run_synth_telegraph(const Options& o) {
  auto c = start(o, "synth telegraph");
  TelegraphSpec spec = o.telegraph;
  spec.shot_noise = !o.no_shot_noise;
  const auto out = emit_telegraph(spec, o.seed);
  c.record.outputs.push_back({"trace.csv", io::trace_to_csv(out.trace)});
  std::string states = "t_s,state\n";
  for (std::size_t k = 0; k < out.states.size(); ++k) states += fmt::format("{},{}\n", out.trace.t[k], out.states[k]);
  c.record.outputs.push_back({"states.csv", std::move(states)});
  c.record.resolved["telegraph"] = {{"rate_bright_to_dark_hz", spec.rate_bright_to_dark},
                                    {"rate_dark_to_bright_hz", spec.rate_dark_to_bright},
                                    {"bright_counts_per_s", spec.bright_counts},
                                    {"dark_counts_per_s", spec.dark_counts},
                                    {"shot_noise", spec.shot_noise},
                                    {"duration_s", spec.duration},
                                    {"dt_s", spec.dt}};
  c.record.resolved["seed"] = o.seed;
  c.stdout_text = fmt::format("{} bins, {} switches\n", out.states.size(), count_switches(out.states));
  return c;
}

CommandResult run_export_graph(const Options& o) {
  auto c = start(o, "export-graph");
  const LatticeParams p = lattice_of(o);
  const Lattice lattice(p);
  require(!o.couplings.empty() || !o.solution.empty() || !o.cluster_file.empty(), ErrorKind::InvalidArgument,
          "export-graph needs --couplings, --solution or --cluster");
  require(o.solution.empty() || o.cluster_file.empty(), ErrorKind::InvalidArgument,
          "--solution and --cluster are mutually exclusive");
  Assignment positions;
  if (!o.solution.empty()) {
    const auto sols = io::solutions_from_json(read_input(c.record, o.solution), lattice);
    require(!sols.empty(), ErrorKind::Infeasible, "the solutions file holds no solution");
    positions = sols.front().assignment;
  }
  if (!o.cluster_file.empty()) positions = io::cluster_from_json(read_input(c.record, o.cluster_file), lattice).assignment();

  std::vector<CouplingMeasurement> table;
  if (!o.couplings.empty()) {
    table = read_couplings_input(c.record, o.couplings);
  } else {
    // Predicted couplings from the positions.
    SyntheticCluster cl;
    for (const auto& [label, site] : positions) cl.spins.push_back({label, site, 0});
    table = emit_couplings(cl, 0.0, {NoiseKind::Gaussian, 0.0}, 0, c.record.constants);
  }
  const auto graph = io::export_graph(table, positions, o.cutoff);
  c.record.outputs.push_back({"graph.json", io::graph_to_json(graph)});
  if (o.dot) c.record.outputs.push_back({"graph.dot", io::graph_to_dot(graph)});
  c.record.resolved["cutoff_hz"] = o.cutoff;
  c.stdout_text = fmt::format("{} nodes, {} edges at cutoff {} Hz\n", graph.nodes.size(), graph.edges.size(), o.cutoff);
  return c;
}

CommandResult run_reproduce(const Options& o) {
  auto c = start(o, "reproduce");
  const LatticeParams p = lattice_of(o);
  const Lattice lattice(p);
  const ConstantsTable& t = c.record.constants;

  ClusterSpec spec = o.cluster_spec;
  spec.structure = o.structure == "random" ? ClusterStructure::Random : ClusterStructure::Clustered;
  const std::uint64_t noise_seed = o.seed ^ 0x9e3779b97f4a7c15ULL;
  const auto cluster = generate_cluster(lattice, spec, o.seed, t);
  const auto table = emit_couplings(cluster, o.min_detectable, noise_of(o), noise_seed, t);
  c.record.outputs.push_back({"cluster.json", io::cluster_to_json(cluster, p)});
  c.record.outputs.push_back({"couplings.csv", io::couplings_to_csv(table)});

  Options po = o;
  po.strong_pair_overrides = true;
  const PlacementConfig cfg = placement_config_of(po, t);
  c.record.resolved["lattice"] = lattice_json(p);
  c.record.resolved["seed"] = o.seed;
  c.record.resolved["noise"] = {{"kind", o.noise_kind}, {"amplitude_hz", o.noise}, {"seed", noise_seed}};
  c.record.resolved["placement"] = placement_config_json(cfg);

  ordered_json report;
  report["spins"] = cluster.spins.size();
  report["measurements"] = table.size();
  PlacementResult placed;
  try {
    placed = place_all(table, lattice, cfg);
  } catch (const Error& e) {
    report["recovered"] = false;
    report["failure"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    c.record.outputs.push_back({"report.json", report.dump(2) + "\n"});
    c.error = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    return c;
  }
  c.record.outputs.push_back({"solutions.json", io::placement_to_json(placed, p)});
  const auto truth = cluster.assignment();
  bool truth_found = false;
  for (const auto& s : placed.solutions) truth_found = truth_found || assignments_equivalent(s.assignment, truth, lattice);
  const bool unique = placed.solutions.size() == 1;
  report["solutions"] = placed.solutions.size();
  report["unique"] = unique;
  report["truth_among_solutions"] = truth_found;
  report["recovered"] = unique && truth_found;
  report["branch_history"] = placed.branch_history;
  auto& amb = report["ambiguous"] = ordered_json::array();
  for (const auto& a : placed.ambiguous) amb.push_back({{"label", a.label}, {"sites", a.sites.size()}});

  if (unique && truth_found) {
    RefineConfig rc;
    rc.min_detectable = o.min_detectable;
    rc.constants = t;
    const auto refined = refine(placed.solutions.front(), table, rc);
    c.record.outputs.push_back({"refined.json", io::refinement_to_json(refined)});
    report["refine"] = {{"initial_residual_hz2", refined.initial_residual},
                        {"residual_hz2", refined.residual},
                        {"iterations", refined.iterations},
                        {"mean_displacement_A", refined.displacements.mean},
                        {"max_displacement_A", refined.displacements.max},
                        {"hessian_condition", refined.hessian_condition}};
  } else {
    c.error = {{"kind", "recovery_failed"},
               {"message", fmt::format("placement returned {} solution(s); truth {}among them", placed.solutions.size(),
                                       truth_found ? "" : "not ")}};
  }
  c.record.outputs.push_back({"report.json", report.dump(2) + "\n"});
  c.stdout_text = fmt::format("{} spins, {} couplings, {} solution(s), recovered: {}\n", cluster.spins.size(),
                              table.size(), placed.solutions.size(), unique && truth_found ? "yes" : "no");
  return c;
}

CommandResult run_sweep(const Options& o) {
  auto c = start(o, "sweep");
  const ConstantsTable& t = c.record.constants;
  const Lattice lattice(lattice_of(o));
  FieldConfig field = field_of(o, t);
  field.b_x = 0.0;
  require(o.preset == "strong" || o.preset == "weak", ErrorKind::InvalidArgument, "--preset must be strong or weak");
  require(o.grid >= 1, ErrorKind::InvalidArgument, "--grid must be >= 1");
  // Pair presets: the on-axis Si with a strong contact term next to a
  // near-neighbour Si, and two distant weakly coupled Si.
  NucleusSpec n1{t.si29(), {}}, n2{t.si29(), {}};
  SiteIndex s1, s2;
  if (o.preset == "strong") {
    n1.hyperfine = {-4.8e6, 30e3, 0.0};
    n2.hyperfine = {200e3, 50e3, 0.0};
    s1 = lattice.si1();
    s2 = {lattice.vacancy().i, lattice.vacancy().j, lattice.vacancy().k, 2};
  } else {
    n1.hyperfine = {100e3, 20e3, 0.0};
    n2.hyperfine = {30e3, 10e3, 0.0};
    s1 = {lattice.si1().i + 1, lattice.si1().j, lattice.si1().k, lattice.si1().basis};
    s2 = {lattice.vacancy().i, lattice.vacancy().j + 1, lattice.vacancy().k + 1, 1};
  }
  const auto spec = make_spin_system(t.zero_field_splitting_hz, field, n1, lattice.position(s1), n2, lattice.position(s2));
  const auto grid = uniform_phi_grid(o.grid);
  const auto sweep = deviation_sweep(spec, grid, o.sweep_transverse);
  std::ostringstream csv;
  write_sweep_csv(csv, o.preset, sweep);
  c.record.outputs.push_back({"sweep.csv", csv.str()});
  c.record.resolved["preset"] = o.preset;
  c.record.resolved["grid"] = o.grid;
  c.record.resolved["transverse_gauss"] = o.sweep_transverse;
  c.stdout_text = fmt::format("|C_zz|/2 = {:.4f} Hz; max deviation +3/2 {:.4f} Hz, -3/2 {:.4f} Hz, averaged {:.4f} Hz\n",
                              std::abs(sweep.c_zz) / 2.0, sweep.max_plus, sweep.max_minus, sweep.max_averaged);
  return c;
}

}  // namespace spinloc::cli
