#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "spinloc/sequences.hpp"
#include "spinloc/synth.hpp"

namespace spinloc::cli {

/// Every flag of every subcommand. Subcommands that share a flag name bind
/// the same field.
struct Options {
  std::string output_dir = ".";
  std::string constants_file;
  std::optional<double> g_electron;
  std::optional<double> gamma_si29;
  std::optional<double> gamma_c13;
  std::optional<double> field_gauss;
  std::optional<double> zfs_hz;
  std::optional<double> lattice_a;
  std::optional<double> lattice_c;
  std::optional<double> carbon_offset;
  std::string k_site = "lower";
  double transverse_gauss = 0.0;
  std::uint64_t seed = 1;

  double lattice_radius = 10.0;
  std::string format = "csv";

  std::string couplings;
  double tolerance = 0.6;
  std::vector<std::string> overrides;
  bool strong_pair_overrides = false;
  std::string anchor = "Si1";
  double min_detectable = 3.0;
  double relative_strong = 0.05;
  double strong_threshold = 35.0;
  std::vector<std::string> order;
  std::size_t max_branches = 1'000'000;
  bool weak_exclusion = false;
  bool no_symmetry = false;

  std::string solution;
  int solution_index = 0;
  bool weighted = false;
  int max_iterations = 500;

  std::string freqs;
  std::string dft;
  std::string bath;
  std::string bath_species = "c13";
  double half_width = 5.0;
  double step = 0.01;
  std::string metric = "perp";
  std::vector<std::string> scan_labels;
  std::optional<double> delta_b_sigma;

  std::string trace;
  double threshold = 1295.0;
  int window = 5;
  std::string fit_mode = "mle";
  bool include_censored = false;

  SequenceParams ddrf;
  std::optional<double> target_angle_deg;
  bool json = false;

  ClusterSpec cluster_spec;
  std::string structure = "clustered";
  std::string cluster_file;
  double noise = 0.2;
  std::string noise_kind = "gaussian";
  TelegraphSpec telegraph;
  bool no_shot_noise = false;

  double cutoff = 1.0;
  bool dot = false;

  std::string preset = "strong";
  int grid = 36;
  double sweep_transverse = 2.3;
};

struct CommandResult {
  RunRecord record;
  std::string stdout_text;
  /// Written alongside the outputs; a non-empty error makes the run exit 1.
  ordered_json error;
  bool write_files = true;
};

CommandResult run_lattice(const Options& o);
CommandResult run_place(const Options& o);
CommandResult run_refine(const Options& o);
CommandResult run_calibrate(const Options& o);
CommandResult run_telegraph(const Options& o);
CommandResult run_ddrf(const Options& o);
CommandResult run_synth_cluster(const Options& o);
CommandResult run_synth_couplings(const Options& o);
CommandResult run_synth_telegraph(const Options& o);
CommandResult run_export_graph(const Options& o);
CommandResult run_reproduce(const Options& o);
CommandResult run_sweep(const Options& o);

}  // namespace spinloc::cli
