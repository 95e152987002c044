#include "spinloc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <fmt/format.h>

#include "spinloc/error.hpp"
#include "spinloc/rng.hpp"
#include "spinloc/spinphys.hpp"

namespace spinloc {

ClusterSpec reference_cluster_spec() { return ClusterSpec{}; }

Assignment SyntheticCluster::assignment() const {
  Assignment out;
  for (const auto& s : spins) out[s.label] = s.site;
  return out;
}

namespace {

struct Pool {
  std::vector<LatticeSite> sites;
};

std::vector<int> cluster_sizes(int total, const ClusterSpec& spec, Rng& rng) {
  const int k = spec.clusters;
  require(k >= 1, ErrorKind::InvalidArgument, "need at least one cluster");
  require(total >= k * spec.min_cluster_size && total <= k * spec.max_cluster_size, ErrorKind::InvalidArgument,
          fmt::format("{} spins cannot form {} clusters of {}-{}", total, k, spec.min_cluster_size, spec.max_cluster_size));
  std::vector<int> sizes(static_cast<std::size_t>(k), spec.min_cluster_size);
  int left = total - k * spec.min_cluster_size;
  while (left > 0) {
    auto& s = sizes[rng.below(static_cast<std::uint64_t>(k))];
    if (s < spec.max_cluster_size) {
      ++s;
      --left;
    }
  }
  return sizes;
}

// Greedy trilateration order from the anchor: every spin after the first
// `min_links` must see at least `min_links` earlier spins above the link
// threshold. This also implies the link graph is connected.
bool well_linked(const std::vector<SyntheticSpin>& spins, const ClusterSpec& spec, const ConstantsTable& constants) {
  const std::size_t n = spins.size();
  std::vector<std::vector<bool>> link(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double f = 0.5 * std::abs(dipolar_coupling(spins[i].site.position, spins[j].site.position,
                                                       spin_species_of_label(spins[i].label, constants),
                                                       spin_species_of_label(spins[j].label, constants)));
      link[i][j] = link[j][i] = f >= spec.link_threshold;
    }
  }
  std::vector<bool> placed(n, false);
  std::vector<int> links_to_placed(n, 0);
  auto place = [&](std::size_t v) {
    placed[v] = true;
    for (std::size_t w = 0; w < n; ++w)
      if (link[v][w]) ++links_to_placed[w];
  };
  place(0);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!placed[v] && (best == n || links_to_placed[v] > links_to_placed[best])) best = v;
    const int need = std::min<int>(spec.min_links, static_cast<int>(step));
    if (links_to_placed[best] < std::max(need, 1)) return false;
    place(best);
  }
  return true;
}

std::optional<std::vector<SyntheticSpin>> attempt_clustered(const Lattice& lattice, const ClusterSpec& spec,
                                                            const std::vector<LatticeSite>& pool, Rng& rng) {
  const int total = spec.n_si + spec.n_c;
  const std::vector<int> sizes = cluster_sizes(total, spec, rng);

  // Species per slot: slot 0 is the Si anchor, carbons go to random slots.
  std::vector<Sublattice> species(static_cast<std::size_t>(total), Sublattice::Si);
  std::vector<std::size_t> slots(static_cast<std::size_t>(total - 1));
  std::iota(slots.begin(), slots.end(), 1);
  for (std::size_t k = slots.size(); k > 1; --k) std::swap(slots[k - 1], slots[rng.below(k)]);
  for (int c = 0; c < spec.n_c; ++c) species[slots[static_cast<std::size_t>(c)]] = Sublattice::C;

  std::vector<SyntheticSpin> spins;
  std::vector<LatticeSite> taken;
  spins.push_back({"", lattice.site(lattice.si1()), 0});
  taken.push_back(spins.back().site);
  std::size_t slot = 1;

  auto dist_to_taken = [&](const Vec3& p, int skip_cluster) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : spins)
      if (s.cluster != skip_cluster) d = std::min(d, (s.site.position - p).norm());
    return d;
  };
  auto is_taken = [&](const LatticeSite& q) {
    return std::any_of(taken.begin(), taken.end(), [&](const LatticeSite& t) { return t.index == q.index; });
  };

  for (int c = 0; c < spec.clusters; ++c) {
    int members = 0;
    if (c == 0) {
      members = 1;
    } else {
      std::vector<const LatticeSite*> seeds;
      for (const auto& q : pool) {
        if (q.species != species[slot] || is_taken(q)) continue;
        const double d = dist_to_taken(q.position, -1);
        if (d >= spec.seed_distance_min && d <= spec.seed_distance_max) seeds.push_back(&q);
      }
      if (seeds.empty()) return std::nullopt;
      const LatticeSite& s = *seeds[rng.below(seeds.size())];
      spins.push_back({"", s, c});
      taken.push_back(s);
      ++slot;
      members = 1;
    }
    while (members < sizes[static_cast<std::size_t>(c)]) {
      std::vector<const LatticeSite*> options;
      for (const auto& q : pool) {
        if (q.species != species[slot] || is_taken(q)) continue;
        bool near = false;
        for (const auto& s : spins)
          if (s.cluster == c && (s.site.position - q.position).norm() <= spec.neighborhood) near = true;
        if (!near || dist_to_taken(q.position, c) < spec.cluster_separation) continue;
        options.push_back(&q);
      }
      if (options.empty()) return std::nullopt;
      const LatticeSite& s = *options[rng.below(options.size())];
      spins.push_back({"", s, c});
      taken.push_back(s);
      ++slot;
      ++members;
    }
  }
  return spins;
}

std::optional<std::vector<SyntheticSpin>> attempt_random(const Lattice& lattice, const ClusterSpec& spec,
                                                         const std::vector<LatticeSite>& pool, Rng& rng) {
  std::vector<SyntheticSpin> spins{{"", lattice.site(lattice.si1()), 0}};
  for (int want_c = 0; want_c < 2; ++want_c) {
    const Sublattice sp = want_c ? Sublattice::C : Sublattice::Si;
    const int n = want_c ? spec.n_c : spec.n_si - 1;
    std::vector<const LatticeSite*> options;
    for (const auto& q : pool)
      if (q.species == sp && q.index != lattice.si1()) options.push_back(&q);
    if (static_cast<int>(options.size()) < n) return std::nullopt;
    for (int k = 0; k < n; ++k) {
      const std::size_t pick = static_cast<std::size_t>(k) + rng.below(options.size() - static_cast<std::size_t>(k));
      std::swap(options[static_cast<std::size_t>(k)], options[pick]);
      spins.push_back({"", *options[static_cast<std::size_t>(k)], 0});
    }
  }
  return spins;
}

}  // namespace

SyntheticCluster generate_cluster(const Lattice& lattice, const ClusterSpec& spec, std::uint64_t seed,
                                  const ConstantsTable& constants) {
  require(spec.n_si >= 1 && spec.n_c >= 0, ErrorKind::InvalidArgument, "need n_si >= 1 (the anchor) and n_c >= 0");
  SyntheticCluster out;
  out.seed = seed;
  out.rng_algorithm = std::string(Rng::kAlgorithm);
  Rng rng(seed);

  if (spec.n_si == 1 && spec.n_c == 0) {
    out.spins.push_back({"Si1", lattice.site(lattice.si1()), 0});
    return out;
  }

  std::vector<LatticeSite> pool;
  for (auto& s : build_lattice(lattice.params(), spec.region_radius))
    if (s.index != lattice.si1()) pool.push_back(s);

  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    auto spins = spec.structure == ClusterStructure::Random ? attempt_random(lattice, spec, pool, rng)
                                                            : attempt_clustered(lattice, spec, pool, rng);
    if (!spins) continue;
    int si = 0, c = 0;
    for (auto& s : *spins) {
      s.label = s.site.species == Sublattice::Si ? fmt::format("Si{}", ++si) : fmt::format("C{}", ++c);
    }
    if (spec.structure == ClusterStructure::Clustered && !well_linked(*spins, spec, constants)) continue;
    out.spins = std::move(*spins);
    return out;
  }
  fail(ErrorKind::Infeasible, fmt::format("could not generate a {} Si + {} C cluster meeting the constraints in {} attempts",
                                          spec.n_si, spec.n_c, spec.max_attempts));
}

std::vector<CouplingMeasurement> emit_couplings(const SyntheticCluster& cluster, double min_detectable,
                                                const NoiseModel& noise, std::uint64_t seed,
                                                const ConstantsTable& constants) {
  require(noise.amplitude >= 0.0, ErrorKind::InvalidArgument, "noise amplitude must be >= 0");
  Rng rng(seed);
  std::vector<CouplingMeasurement> out;
  const auto& s = cluster.spins;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const double c = dipolar_coupling(s[i].site.position, s[j].site.position,
                                        spin_species_of_label(s[i].label, constants),
                                        spin_species_of_label(s[j].label, constants));
      const double draw = noise.kind == NoiseKind::Gaussian ? rng.normal() : rng.uniform(-1.0, 1.0);
      double f = std::max(0.0, sedor_frequency_from_coupling(c) + noise.amplitude * draw);
      f = std::round(f * 1e6) / 1e6;
      if (!(f >= min_detectable)) continue;
      out.push_back({s[i].label, s[j].label, f, noise.amplitude > 0.0 ? noise.amplitude : 0.01, SubspaceMode::Averaged});
    }
  }
  return out;
}

SyntheticTrace emit_telegraph(const TelegraphSpec& spec, std::uint64_t seed) {
  require(spec.rate_bright_to_dark > 0.0 && spec.rate_dark_to_bright > 0.0, ErrorKind::InvalidArgument,
          "telegraph rates must be positive");
  require(spec.duration > 0.0 && spec.dt > 0.0, ErrorKind::InvalidArgument, "duration and dt must be positive");
  require(spec.dt < 0.1 / std::max(spec.rate_bright_to_dark, spec.rate_dark_to_bright), ErrorKind::InvalidArgument,
          "dt must be below a tenth of the shortest mean dwell");
  require(spec.bright_counts >= 0.0 && spec.dark_counts >= 0.0, ErrorKind::InvalidArgument, "count rates must be >= 0");

  Rng rng(seed);
  const auto n = static_cast<std::size_t>(std::llround(spec.duration / spec.dt));
  SyntheticTrace out;
  out.trace.t.resize(n);
  out.trace.counts.resize(n);
  out.states.resize(n);

  const double p_bright = spec.rate_dark_to_bright / (spec.rate_bright_to_dark + spec.rate_dark_to_bright);
  bool bright = rng.uniform() < p_bright;
  double next_switch = rng.exponential(bright ? spec.rate_bright_to_dark : spec.rate_dark_to_bright);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * spec.dt;
    while (next_switch <= t) {
      bright = !bright;
      next_switch += rng.exponential(bright ? spec.rate_bright_to_dark : spec.rate_dark_to_bright);
    }
    const double rate = bright ? spec.bright_counts : spec.dark_counts;
    out.trace.t[k] = t;
    out.states[k] = bright ? 1 : 0;
    out.trace.counts[k] =
        spec.shot_noise ? static_cast<double>(rng.poisson(rate * spec.dt)) / spec.dt : rate;
  }
  return out;
}

}  // namespace spinloc
