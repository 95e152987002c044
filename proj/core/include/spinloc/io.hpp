#pragma once

// File formats. CSV files carry one header row with units in the column
// names; '#' lines and blank lines are skipped on input. JSON output is
// key-ordered and uses shortest round-trip number formatting, so equal
// inputs produce byte-identical files.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spinloc/calibrate.hpp"
#include "spinloc/lattice.hpp"
#include "spinloc/placement.hpp"
#include "spinloc/refine.hpp"
#include "spinloc/synth.hpp"
#include "spinloc/telegraph.hpp"

namespace spinloc::io {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// species,i,j,k,basis,x_A,y_A,z_A with 6 decimals.
std::string lattice_to_csv(const std::vector<LatticeSite>& sites);
std::string lattice_to_json(const std::vector<LatticeSite>& sites, const LatticeParams& params);

/// spin_a,spin_b,f_hz,sigma_hz,subspace_mode
std::string couplings_to_csv(const std::vector<CouplingMeasurement>& table);
std::string couplings_to_json(const std::vector<CouplingMeasurement>& table);
std::vector<CouplingMeasurement> couplings_from_csv(std::string_view text);
std::vector<CouplingMeasurement> couplings_from_json(std::string_view text);
/// Dispatches on the extension (.json, otherwise CSV).
std::vector<CouplingMeasurement> read_couplings(const std::filesystem::path& path);
/// Per-row checks plus no repeated (pair, mode).
void validate_couplings(const std::vector<CouplingMeasurement>& table);

std::string placement_to_json(const PlacementResult& result, const LatticeParams& params);
/// Reads the solutions written by placement_to_json. Positions are rebuilt
/// from the integer indices and checked against the stored coordinates.
std::vector<PlacementSolution> solutions_from_json(std::string_view text, const Lattice& lattice);

std::string refinement_to_json(const RefinementResult& result);
/// label,x_A,y_A,z_A,dx_A,dy_A,dz_A,displacement_A
std::string refinement_to_csv(const RefinementResult& result);

/// t_s,counts_per_s
std::string trace_to_csv(const TimeTrace& trace);
TimeTrace trace_from_csv(std::string_view text);
std::string telegraph_to_json(const TelegraphResult& result);

/// label,A_zz_Hz,A_perp_Hz (A_perp goes to a_zx).
std::map<std::string, HyperfineTensor> dft_from_csv(std::string_view text);
std::string dft_to_csv(const std::map<std::string, HyperfineTensor>& table);
/// label,f_a_Hz,f_b_Hz,m_s_a,m_s_b
std::vector<SpinFrequencies> freqs_from_csv(std::string_view text);
std::string freqs_to_csv(const std::vector<SpinFrequencies>& rows);
/// frequency_Hz,amplitude
std::vector<std::pair<double, double>> spectrum_from_csv(std::string_view text);

std::string cluster_to_json(const SyntheticCluster& cluster, const LatticeParams& params);
SyntheticCluster cluster_from_json(std::string_view text, const Lattice& lattice);

struct GraphNode {
  std::string label;
  Sublattice species = Sublattice::Si;
  bool has_position = false;
  Vec3 position = Vec3::Zero();
};

struct GraphEdge {
  std::string a;
  std::string b;
  double f_hz = 0.0;
};

struct SpinGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  double cutoff_hz = 1.0;
};

/// Nodes are every label in `measurements` and `positions`; edges are
/// measurements with f >= cutoff. Edges are sorted by pair.
SpinGraph export_graph(const std::vector<CouplingMeasurement>& measurements, const Assignment& positions,
                       double cutoff_hz = 1.0);
/// Nodes carry species and a display colour (Si green, C orange).
std::string graph_to_json(const SpinGraph& graph);
std::string graph_to_dot(const SpinGraph& graph);

}  // namespace spinloc::io
