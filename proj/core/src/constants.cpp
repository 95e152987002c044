#include "spinloc/constants.hpp"

#include <cmath>

#include <json.hpp>

#include "spinloc/error.hpp"
#include "spinloc/units.hpp"

namespace spinloc {

std::string_view to_string(Isotope isotope) noexcept {
  switch (isotope) {
    case Isotope::Si29: return "Si29";
    case Isotope::C13: return "C13";
    case Isotope::Electron: return "electron";
  }
  return "unknown";
}

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Connectivity: return "connectivity";
    case ErrorKind::Labeling: return "labeling";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Inversion: return "inversion";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::InsufficientStatistics: return "insufficient_statistics";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Boundary: return "boundary";
    case ErrorKind::Format: return "format";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

SpinSpecies ConstantsTable::electron_species(double g_factor) {
  return {Isotope::Electron, g_factor * units::kBohrMagnetonOverPlanck, 1.5};
}

void ConstantsTable::validate() const {
  require(std::isfinite(gamma_si29_hz_per_t) && gamma_si29_hz_per_t < 0.0,
          ErrorKind::InvalidArgument, "29Si gyromagnetic ratio must be negative");
  require(std::isfinite(gamma_c13_hz_per_t) && gamma_c13_hz_per_t > 0.0,
          ErrorKind::InvalidArgument, "13C gyromagnetic ratio must be positive");
  require(std::isfinite(g_electron) && g_electron < 0.0, ErrorKind::InvalidArgument,
          "electron g-factor must be negative in this sign convention");
  require(std::isfinite(zero_field_splitting_hz), ErrorKind::InvalidArgument,
          "zero-field splitting must be finite");
  require(std::isfinite(field_gauss) && field_gauss > 0.0, ErrorKind::InvalidArgument,
          "field must be positive");
}

const ConstantsTable& default_constants() {
  static const ConstantsTable table{};
  return table;
}

std::string constants_to_json(const ConstantsTable& table) {
  nlohmann::ordered_json j;
  j["gamma_si29_hz_per_t"] = table.gamma_si29_hz_per_t;
  j["gamma_c13_hz_per_t"] = table.gamma_c13_hz_per_t;
  j["g_electron"] = table.g_electron;
  j["zero_field_splitting_hz"] = table.zero_field_splitting_hz;
  j["field_gauss"] = table.field_gauss;
  j["mu0_n_per_a2"] = units::kVacuumPermeability;
  j["planck_j_s"] = units::kPlanck;
  j["bohr_magneton_over_h_hz_per_t"] = units::kBohrMagnetonOverPlanck;
  return j.dump(2);
}

ConstantsTable constants_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("constants table: ") + e.what());
  }
  require(j.is_object(), ErrorKind::Format, "constants table must be a JSON object");
  ConstantsTable table;
  for (const auto& [key, value] : j.items()) {
    require(value.is_number(), ErrorKind::Format, "constants table: '" + key + "' is not a number");
    const double v = value.get<double>();
    if (key == "gamma_si29_hz_per_t") table.gamma_si29_hz_per_t = v;
    else if (key == "gamma_c13_hz_per_t") table.gamma_c13_hz_per_t = v;
    else if (key == "g_electron") table.g_electron = v;
    else if (key == "zero_field_splitting_hz") table.zero_field_splitting_hz = v;
    else if (key == "field_gauss") table.field_gauss = v;
    // Fundamental constants are informational in the dump and fixed in code.
    else if (key == "mu0_n_per_a2" || key == "planck_j_s" || key == "bohr_magneton_over_h_hz_per_t") continue;
    else fail(ErrorKind::Format, "constants table: unknown key '" + key + "'");
  }
  table.validate();
  return table;
}

}  // namespace spinloc
