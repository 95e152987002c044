#include "spinloc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "spinloc/error.hpp"

namespace spinloc::io {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::string_view what, std::size_t line) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v), ErrorKind::Format,
          fmt::format("line {}: column '{}' is not a finite number: '{}'", line, what, s));
  return v;
}

int parse_int(std::string_view s, std::string_view what, std::size_t line) {
  int v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorKind::Format,
          fmt::format("line {}: column '{}' is not an integer: '{}'", line, what, s));
  return v;
}

// Header-addressed CSV table.
class Csv {
 public:
  Csv(std::string_view text, std::vector<std::string> required, std::vector<std::string> optional = {}) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
      ++line_no;
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      if (line.empty() || line.front() == '#') continue;
      auto fields = split(line);
      if (!header_seen) {
        header_seen = true;
        for (std::size_t c = 0; c < fields.size(); ++c) {
          require(!columns_.count(fields[c]), ErrorKind::Format, fmt::format("duplicate CSV column '{}'", fields[c]));
          columns_[fields[c]] = c;
        }
        for (const auto& r : required)
          require(columns_.count(r) > 0, ErrorKind::Format, fmt::format("CSV header lacks column '{}'", r));
        for (const auto& [name, _] : columns_) {
          const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                             std::find(optional.begin(), optional.end(), name) != optional.end();
          require(known, ErrorKind::Format, fmt::format("unknown CSV column '{}'", name));
        }
        width_ = fields.size();
        continue;
      }
      require(fields.size() == width_, ErrorKind::Format,
              fmt::format("line {}: expected {} fields, found {}", line_no, width_, fields.size()));
      rows_.push_back(std::move(fields));
      lines_.push_back(line_no);
    }
    require(header_seen, ErrorKind::Format, "CSV input has no header row");
  }

  std::size_t size() const { return rows_.size(); }
  std::size_t line(std::size_t r) const { return lines_[r]; }
  bool has(const std::string& col) const { return columns_.count(col) > 0; }
  const std::string& text(std::size_t r, const std::string& col) const { return rows_[r][columns_.at(col)]; }
  double number(std::size_t r, const std::string& col) const { return parse_double(text(r, col), col, lines_[r]); }
  int integer(std::size_t r, const std::string& col) const { return parse_int(text(r, col), col, lines_[r]); }

 private:
  std::map<std::string, std::size_t> columns_;
  std::size_t width_ = 0;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

ordered_json parse_json(std::string_view text, std::string_view what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, fmt::format("{}: {}", what, e.what()));
  }
}

template <class T>
T get(const ordered_json& j, const char* key, std::string_view what) {
  require(j.is_object() && j.contains(key), ErrorKind::Format, fmt::format("{}: missing key '{}'", what, key));
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, fmt::format("{}: key '{}': {}", what, key, e.what()));
  }
}

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

ordered_json index_json(const SiteIndex& s) { return ordered_json::array({s.i, s.j, s.k, s.basis}); }

SiteIndex index_from_json(const ordered_json& j, std::string_view what) {
  require(j.is_array() && j.size() == 4, ErrorKind::Format, fmt::format("{}: index must be [i, j, k, basis]", what));
  try {
    return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, fmt::format("{}: {}", what, e.what()));
  }
}

ordered_json site_json(const LatticeSite& s) {
  ordered_json j;
  j["species"] = std::string(to_string(s.species));
  j["index"] = index_json(s.index);
  j["position_A"] = vec_json(s.position);
  return j;
}

ordered_json params_json(const LatticeParams& p) {
  ordered_json j;
  j["a_A"] = p.a;
  j["c_A"] = p.c;
  j["carbon_offset"] = p.carbon_offset;
  j["k_site"] = p.k_site == KSiteVariant::Lower ? "lower" : "upper";
  return j;
}

LatticeSite site_from_json(const ordered_json& j, const Lattice& lattice, std::string_view what) {
  const SiteIndex idx = index_from_json(j.contains("index") ? j["index"] : ordered_json(), what);
  require(idx.basis >= 0 && idx.basis < kBasisSize, ErrorKind::Format, fmt::format("{}: basis out of range", what));
  require(!lattice.is_vacancy(idx), ErrorKind::Format, fmt::format("{}: site is the vacancy", what));
  LatticeSite site = lattice.site(idx);
  if (j.contains("position_A")) {
    const auto p = get<std::vector<double>>(j, "position_A", what);
    require(p.size() == 3, ErrorKind::Format, fmt::format("{}: position must have 3 components", what));
    require((Vec3(p[0], p[1], p[2]) - site.position).norm() < 1e-6, ErrorKind::Format,
            fmt::format("{}: stored position does not match the lattice index", what));
  }
  return site;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::InvalidArgument, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::InvalidArgument, fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  require(out.good(), ErrorKind::InvalidArgument, fmt::format("write to '{}' failed", path.string()));
}

std::string lattice_to_csv(const std::vector<LatticeSite>& sites) {
  std::string out = "species,i,j,k,basis,x_A,y_A,z_A\n";
  for (const auto& s : sites) {
    out += fmt::format("{},{},{},{},{},{:.6f},{:.6f},{:.6f}\n", to_string(s.species), s.index.i, s.index.j, s.index.k,
                       s.index.basis, s.position.x(), s.position.y(), s.position.z());
  }
  return out;
}

std::string lattice_to_json(const std::vector<LatticeSite>& sites, const LatticeParams& params) {
  ordered_json j;
  j["lattice"] = params_json(params);
  auto& arr = j["sites"] = ordered_json::array();
  for (const auto& s : sites) {
    ordered_json e;
    e["species"] = std::string(to_string(s.species));
    e["i"] = s.index.i;
    e["j"] = s.index.j;
    e["k"] = s.index.k;
    e["basis"] = s.index.basis;
    // Round to the same 6 decimals as the CSV.
    e["x_A"] = std::round(s.position.x() * 1e6) / 1e6;
    e["y_A"] = std::round(s.position.y() * 1e6) / 1e6;
    e["z_A"] = std::round(s.position.z() * 1e6) / 1e6;
    arr.push_back(std::move(e));
  }
  return dump(j);
}

std::string couplings_to_csv(const std::vector<CouplingMeasurement>& table) {
  std::string out = "spin_a,spin_b,f_hz,sigma_hz,subspace_mode\n";
  for (const auto& m : table)
    out += fmt::format("{},{},{},{},{}\n", m.spin_a, m.spin_b, m.f_hz, m.sigma_hz, to_string(m.mode));
  return out;
}

std::string couplings_to_json(const std::vector<CouplingMeasurement>& table) {
  ordered_json j;
  auto& arr = j["couplings"] = ordered_json::array();
  for (const auto& m : table) {
    ordered_json e;
    e["spin_a"] = m.spin_a;
    e["spin_b"] = m.spin_b;
    e["f_hz"] = m.f_hz;
    e["sigma_hz"] = m.sigma_hz;
    e["subspace_mode"] = std::string(to_string(m.mode));
    arr.push_back(std::move(e));
  }
  return dump(j);
}

std::vector<CouplingMeasurement> couplings_from_csv(std::string_view text) {
  const Csv csv(text, {"spin_a", "spin_b", "f_hz"}, {"sigma_hz", "subspace_mode"});
  std::vector<CouplingMeasurement> out;
  for (std::size_t r = 0; r < csv.size(); ++r) {
    CouplingMeasurement m;
    m.spin_a = csv.text(r, "spin_a");
    m.spin_b = csv.text(r, "spin_b");
    m.f_hz = csv.number(r, "f_hz");
    if (csv.has("sigma_hz") && !csv.text(r, "sigma_hz").empty()) m.sigma_hz = csv.number(r, "sigma_hz");
    if (csv.has("subspace_mode") && !csv.text(r, "subspace_mode").empty())
      m.mode = subspace_mode_from_string(csv.text(r, "subspace_mode"));
    out.push_back(std::move(m));
  }
  validate_couplings(out);
  return out;
}

std::vector<CouplingMeasurement> couplings_from_json(std::string_view text) {
  const auto j = parse_json(text, "couplings");
  const ordered_json& arr = j.is_array() ? j : (j.contains("couplings") ? j["couplings"] : ordered_json());
  require(arr.is_array(), ErrorKind::Format, "couplings: expected an array or an object with 'couplings'");
  std::vector<CouplingMeasurement> out;
  for (const auto& e : arr) {
    CouplingMeasurement m;
    m.spin_a = get<std::string>(e, "spin_a", "couplings");
    m.spin_b = get<std::string>(e, "spin_b", "couplings");
    m.f_hz = get<double>(e, "f_hz", "couplings");
    if (e.contains("sigma_hz")) m.sigma_hz = get<double>(e, "sigma_hz", "couplings");
    if (e.contains("subspace_mode")) m.mode = subspace_mode_from_string(get<std::string>(e, "subspace_mode", "couplings"));
    out.push_back(std::move(m));
  }
  validate_couplings(out);
  return out;
}

std::vector<CouplingMeasurement> read_couplings(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return path.extension() == ".json" ? couplings_from_json(text) : couplings_from_csv(text);
}

void validate_couplings(const std::vector<CouplingMeasurement>& table) {
  std::set<std::pair<PairKey, SubspaceMode>> seen;
  for (const auto& m : table) {
    m.validate();
    const bool fresh = seen.insert({make_pair_key(m.spin_a, m.spin_b), m.mode}).second;
    require(fresh, ErrorKind::Format,
            fmt::format("coupling {}-{} ({}) listed twice", m.spin_a, m.spin_b, to_string(m.mode)));
  }
}

std::string placement_to_json(const PlacementResult& result, const LatticeParams& params) {
  ordered_json j;
  j["lattice"] = params_json(params);
  j["order"] = result.order;
  j["symmetry_order"] = result.symmetry_order;
  j["branch_history"] = result.branch_history;
  j["branch_history_raw"] = result.branch_history_raw;
  j["dropped_measurements"] = result.dropped_measurements;
  j["unique"] = result.solutions.size() == 1;
  auto& sols = j["solutions"] = ordered_json::array();
  for (const auto& s : result.solutions) {
    ordered_json e;
    e["residual_hz2"] = s.residual;
    e["multiplicity"] = s.multiplicity;
    auto& a = e["assignment"] = ordered_json::object();
    for (const auto& label : result.order) {
      const auto it = s.assignment.find(label);
      if (it != s.assignment.end()) a[label] = site_json(it->second);
    }
    sols.push_back(std::move(e));
  }
  auto& amb = j["ambiguous"] = ordered_json::array();
  for (const auto& a : result.ambiguous) {
    ordered_json e;
    e["label"] = a.label;
    e["site_count"] = a.sites.size();
    auto& sites = e["sites"] = ordered_json::array();
    for (const auto& s : a.sites) sites.push_back(site_json(s));
    amb.push_back(std::move(e));
  }
  return dump(j);
}

std::vector<PlacementSolution> solutions_from_json(std::string_view text, const Lattice& lattice) {
  const auto j = parse_json(text, "solutions");
  if (j.contains("lattice")) {
    const auto& p = j["lattice"];
    require(std::abs(get<double>(p, "a_A", "solutions") - lattice.params().a) < 1e-12 &&
                std::abs(get<double>(p, "c_A", "solutions") - lattice.params().c) < 1e-12,
            ErrorKind::Format, "solutions file was written for different lattice constants");
  }
  require(j.contains("solutions") && j["solutions"].is_array(), ErrorKind::Format, "solutions: missing 'solutions'");
  std::vector<PlacementSolution> out;
  for (const auto& e : j["solutions"]) {
    PlacementSolution s;
    if (e.contains("residual_hz2")) s.residual = get<double>(e, "residual_hz2", "solutions");
    if (e.contains("multiplicity")) s.multiplicity = get<std::size_t>(e, "multiplicity", "solutions");
    require(e.contains("assignment") && e["assignment"].is_object(), ErrorKind::Format,
            "solutions: entry lacks an 'assignment' object");
    for (const auto& [label, site] : e["assignment"].items()) {
      LatticeSite ls = site_from_json(site, lattice, fmt::format("solutions: {}", label));
      require(ls.species == species_of_label(label), ErrorKind::Format,
              fmt::format("solutions: {} sits on the wrong sublattice", label));
      s.assignment[label] = ls;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string refinement_to_json(const RefinementResult& r) {
  ordered_json j;
  j["residual_hz2"] = r.residual;
  j["initial_residual_hz2"] = r.initial_residual;
  j["iterations"] = r.iterations;
  j["stop_reason"] = r.stop_reason;
  j["gauge_label"] = r.gauge_label;
  j["parameters"] = r.parameters;
  j["measurements"] = r.measurements;
  j["rank"] = r.rank;
  j["hessian_condition"] = r.hessian_condition;
  j["underdetermined"] = r.underdetermined;
  j["signs_consistent"] = r.signs_consistent;
  auto& pos = j["positions_A"] = ordered_json::object();
  for (const auto& [label, p] : r.positions) pos[label] = vec_json(p);
  auto& d = j["displacements"];
  d["mean_A"] = r.displacements.mean;
  d["max_A"] = r.displacements.max;
  d["max_label"] = r.displacements.max_label;
  auto& rows = d["rows"] = ordered_json::array();
  for (const auto& row : r.displacements.rows) {
    ordered_json e;
    e["label"] = row.label;
    e["delta_A"] = vec_json(row.delta);
    e["norm_A"] = row.norm;
    rows.push_back(std::move(e));
  }
  j["residual_trace_hz2"] = r.residual_trace;
  return dump(j);
}

std::string refinement_to_csv(const RefinementResult& r) {
  std::map<std::string, const Displacement*> disp;
  for (const auto& row : r.displacements.rows) disp[row.label] = &row;
  std::string out = "label,x_A,y_A,z_A,dx_A,dy_A,dz_A,displacement_A\n";
  for (const auto& [label, p] : r.positions) {
    const auto it = disp.find(label);
    const Vec3 d = it != disp.end() ? it->second->delta : Vec3::Zero();
    out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", label, p.x(), p.y(), p.z(), d.x(), d.y(),
                       d.z(), d.norm());
  }
  return out;
}

std::string trace_to_csv(const TimeTrace& trace) {
  std::string out = "t_s,counts_per_s\n";
  for (std::size_t k = 0; k < trace.t.size(); ++k) out += fmt::format("{},{}\n", trace.t[k], trace.counts[k]);
  return out;
}

TimeTrace trace_from_csv(std::string_view text) {
  const Csv csv(text, {"t_s", "counts_per_s"});
  TimeTrace trace;
  trace.t.reserve(csv.size());
  trace.counts.reserve(csv.size());
  for (std::size_t r = 0; r < csv.size(); ++r) {
    trace.t.push_back(csv.number(r, "t_s"));
    trace.counts.push_back(csv.number(r, "counts_per_s"));
  }
  trace.validate();
  return trace;
}

std::string telegraph_to_json(const TelegraphResult& r) {
  auto rate = [](const RateEstimate& e) {
    ordered_json j;
    j["rate_hz"] = e.rate;
    j["uncertainty_hz"] = e.uncertainty;
    j["samples"] = e.samples;
    return j;
  };
  ordered_json j;
  j["rate_bright_to_dark"] = rate(r.bright_to_dark);
  j["rate_dark_to_bright"] = rate(r.dark_to_bright);
  j["threshold_counts_per_s"] = r.threshold;
  j["smoothing_window_bins"] = r.window;
  j["dwell_times_s"]["bright"] = r.dwells.bright;
  j["dwell_times_s"]["dark"] = r.dwells.dark;
  return dump(j);
}

std::map<std::string, HyperfineTensor> dft_from_csv(std::string_view text) {
  const Csv csv(text, {"label", "A_zz_Hz", "A_perp_Hz"});
  std::map<std::string, HyperfineTensor> out;
  for (std::size_t r = 0; r < csv.size(); ++r) {
    const std::string& label = csv.text(r, "label");
    require(!label.empty(), ErrorKind::Format, fmt::format("line {}: empty label", csv.line(r)));
    const double perp = csv.number(r, "A_perp_Hz");
    require(perp >= 0.0, ErrorKind::Format, fmt::format("line {}: A_perp must be >= 0", csv.line(r)));
    const bool fresh = out.emplace(label, HyperfineTensor{csv.number(r, "A_zz_Hz"), perp, 0.0}).second;
    require(fresh, ErrorKind::Format, fmt::format("DFT label '{}' repeated", label));
  }
  return out;
}

std::string dft_to_csv(const std::map<std::string, HyperfineTensor>& table) {
  std::string out = "label,A_zz_Hz,A_perp_Hz\n";
  for (const auto& [label, t] : table) out += fmt::format("{},{},{}\n", label, t.a_zz, t.a_perp());
  return out;
}

std::vector<SpinFrequencies> freqs_from_csv(std::string_view text) {
  const Csv csv(text, {"label", "f_a_Hz", "f_b_Hz"}, {"m_s_a", "m_s_b"});
  std::vector<SpinFrequencies> out;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < csv.size(); ++r) {
    SpinFrequencies f;
    f.label = csv.text(r, "label");
    require(seen.insert(f.label).second, ErrorKind::Format, fmt::format("frequency label '{}' repeated", f.label));
    f.f_a = csv.number(r, "f_a_Hz");
    f.f_b = csv.number(r, "f_b_Hz");
    if (csv.has("m_s_a")) f.m_s_a = csv.number(r, "m_s_a");
    if (csv.has("m_s_b")) f.m_s_b = csv.number(r, "m_s_b");
    out.push_back(std::move(f));
  }
  return out;
}

std::string freqs_to_csv(const std::vector<SpinFrequencies>& rows) {
  std::string out = "label,f_a_Hz,f_b_Hz,m_s_a,m_s_b\n";
  for (const auto& f : rows) out += fmt::format("{},{},{},{},{}\n", f.label, f.f_a, f.f_b, f.m_s_a, f.m_s_b);
  return out;
}

std::vector<std::pair<double, double>> spectrum_from_csv(std::string_view text) {
  const Csv csv(text, {"frequency_Hz", "amplitude"});
  std::vector<std::pair<double, double>> out;
  for (std::size_t r = 0; r < csv.size(); ++r) out.emplace_back(csv.number(r, "frequency_Hz"), csv.number(r, "amplitude"));
  return out;
}

std::string cluster_to_json(const SyntheticCluster& cluster, const LatticeParams& params) {
  ordered_json j;
  j["lattice"] = params_json(params);
  j["seed"] = cluster.seed;
  j["rng_algorithm"] = cluster.rng_algorithm;
  auto& spins = j["spins"] = ordered_json::array();
  for (const auto& s : cluster.spins) {
    ordered_json e = site_json(s.site);
    e["label"] = s.label;
    e["cluster"] = s.cluster;
    spins.push_back(std::move(e));
  }
  return dump(j);
}

SyntheticCluster cluster_from_json(std::string_view text, const Lattice& lattice) {
  const auto j = parse_json(text, "cluster");
  SyntheticCluster out;
  if (j.contains("seed")) out.seed = get<std::uint64_t>(j, "seed", "cluster");
  if (j.contains("rng_algorithm")) out.rng_algorithm = get<std::string>(j, "rng_algorithm", "cluster");
  require(j.contains("spins") && j["spins"].is_array(), ErrorKind::Format, "cluster: missing 'spins'");
  std::set<std::string> seen;
  for (const auto& e : j["spins"]) {
    SyntheticSpin s;
    s.label = get<std::string>(e, "label", "cluster");
    require(seen.insert(s.label).second, ErrorKind::Format, fmt::format("cluster: label '{}' repeated", s.label));
    s.site = site_from_json(e, lattice, fmt::format("cluster: {}", s.label));
    require(s.site.species == species_of_label(s.label), ErrorKind::Format,
            fmt::format("cluster: {} sits on the wrong sublattice", s.label));
    if (e.contains("cluster")) s.cluster = get<int>(e, "cluster", "cluster");
    out.spins.push_back(std::move(s));
  }
  return out;
}

SpinGraph export_graph(const std::vector<CouplingMeasurement>& measurements, const Assignment& positions,
                       double cutoff_hz) {
  require(cutoff_hz >= 0.0, ErrorKind::InvalidArgument, "graph cutoff must be >= 0");
  SpinGraph g;
  g.cutoff_hz = cutoff_hz;
  std::set<std::string> labels;
  for (const auto& [label, _] : positions) labels.insert(label);
  for (const auto& m : measurements) {
    labels.insert(m.spin_a);
    labels.insert(m.spin_b);
  }
  for (const auto& label : labels) {
    GraphNode n;
    n.label = label;
    n.species = species_of_label(label);
    if (const auto it = positions.find(label); it != positions.end()) {
      n.has_position = true;
      n.position = it->second.position;
    }
    g.nodes.push_back(std::move(n));
  }
  // One edge per pair; the averaged reading wins over single-subspace ones.
  std::map<PairKey, const CouplingMeasurement*> best;
  for (const auto& m : measurements) {
    auto& slot = best[make_pair_key(m.spin_a, m.spin_b)];
    if (!slot || (m.mode == SubspaceMode::Averaged && slot->mode != SubspaceMode::Averaged)) slot = &m;
  }
  for (const auto& [key, m] : best)
    if (m->f_hz >= cutoff_hz) g.edges.push_back({key.first, key.second, m->f_hz});
  return g;
}

namespace {
std::string_view colour(Sublattice s) { return s == Sublattice::Si ? "green" : "orange"; }
}  // namespace

std::string graph_to_json(const SpinGraph& g) {
  ordered_json j;
  j["cutoff_hz"] = g.cutoff_hz;
  auto& nodes = j["nodes"] = ordered_json::array();
  for (const auto& n : g.nodes) {
    ordered_json e;
    e["label"] = n.label;
    e["species"] = std::string(to_string(n.species));
    e["color"] = std::string(colour(n.species));
    if (n.has_position) e["position_A"] = vec_json(n.position);
    nodes.push_back(std::move(e));
  }
  auto& edges = j["edges"] = ordered_json::array();
  for (const auto& e : g.edges) {
    ordered_json x;
    x["source"] = e.a;
    x["target"] = e.b;
    x["f_hz"] = e.f_hz;
    edges.push_back(std::move(x));
  }
  return dump(j);
}

std::string graph_to_dot(const SpinGraph& g) {
  std::string out = "graph spins {\n";
  for (const auto& n : g.nodes)
    out += fmt::format("  \"{}\" [species=\"{}\", color=\"{}\"];\n", n.label, to_string(n.species), colour(n.species));
  for (const auto& e : g.edges) out += fmt::format("  \"{}\" -- \"{}\" [label=\"{:.2f} Hz\", weight={}];\n", e.a, e.b, e.f_hz, e.f_hz);
  out += "}\n";
  return out;
}

}  // namespace spinloc::io
