#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinloc/placement.hpp"
#include "spinloc/telegraph.hpp"

namespace spinloc {

enum class ClusterStructure { Random, Clustered };

struct ClusterSpec {
  int n_si = 22;
  int n_c = 3;
  ClusterStructure structure = ClusterStructure::Clustered;
  int clusters = 4;
  int min_cluster_size = 5;
  int max_cluster_size = 7;
  /// All spins lie within this distance of the vacancy.
  double region_radius = 14.0;
  /// A cluster grows by sites within this distance of one of its members.
  double neighborhood = 5.0;
  /// Seeds of later clusters sit this far from every earlier spin.
  double seed_distance_min = 5.5;
  double seed_distance_max = 8.0;
  /// Growth sites keep at least this distance from other clusters' spins.
  double cluster_separation = 4.5;
  /// Some order starting at the anchor must give every spin at least this
  /// many couplings above `link_threshold` Hz to the spins before it (fewer
  /// only while fewer spins are placed).
  int min_links = 3;
  double link_threshold = 4.0;
  int max_attempts = 2000;
};

/// 22 Si + 3 C in 4 sub-clusters of 5 to 7 spins.
ClusterSpec reference_cluster_spec();

struct SyntheticSpin {
  std::string label;
  LatticeSite site;
  int cluster = 0;
};

struct SyntheticCluster {
  std::vector<SyntheticSpin> spins;  // the Si1 anchor first
  std::uint64_t seed = 0;
  std::string rng_algorithm;

  Assignment assignment() const;
};

/// Ground-truth spins on the lattice; Si1 always sits on the anchor site.
SyntheticCluster generate_cluster(const Lattice& lattice, const ClusterSpec& spec, std::uint64_t seed,
                                  const ConstantsTable& constants = {});

enum class NoiseKind { Gaussian, Uniform };

struct NoiseModel {
  NoiseKind kind = NoiseKind::Gaussian;
  /// Standard deviation (Gaussian) or half-width (uniform), Hz.
  double amplitude = 0.2;
};

/// f = |C|/2 + noise for every pair, kept when f >= min_detectable. Values
/// are rounded to 1e-6 Hz so a written table reads back bit-exactly.
std::vector<CouplingMeasurement> emit_couplings(const SyntheticCluster& cluster, double min_detectable,
                                                const NoiseModel& noise, std::uint64_t seed,
                                                const ConstantsTable& constants = {});

struct TelegraphSpec {
  double rate_bright_to_dark = 0.18;  // Hz
  double rate_dark_to_bright = 0.85;  // Hz
  double bright_counts = 8000.0;      // counts/s
  double dark_counts = 100.0;         // counts/s
  bool shot_noise = true;
  double duration = 200.0;  // s
  double dt = 5e-3;         // s
};

struct SyntheticTrace {
  TimeTrace trace;
  StateSequence states;
};

/// Continuous-time two-state Markov process sampled at the start of each
/// bin, with Poisson counts at the state's rate.
SyntheticTrace emit_telegraph(const TelegraphSpec& spec, std::uint64_t seed);

}  // namespace spinloc
