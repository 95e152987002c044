#pragma once

#include <string>
#include <string_view>

namespace spinloc {

enum class Isotope { Si29, C13, Electron };

std::string_view to_string(Isotope isotope) noexcept;

/// A spin carrier with its gyromagnetic ratio in Hz/T (signed) and spin
/// quantum number.
struct SpinSpecies {
  Isotope isotope = Isotope::Si29;
  double gamma_hz_per_t = 0.0;
  double spin = 0.5;

  std::string_view name() const noexcept { return to_string(isotope); }
  bool operator==(const SpinSpecies&) const = default;
};

/// Literature constants that the rest of the toolkit consumes. Everything here
/// can be overridden from a JSON table or CLI flags.
struct ConstantsTable {
  double gamma_si29_hz_per_t = -8.465e6;
  double gamma_c13_hz_per_t = 10.7084e6;
  double g_electron = -2.0028;
  double zero_field_splitting_hz = 35e6;
  double field_gauss = 1960.9;

  SpinSpecies si29() const { return {Isotope::Si29, gamma_si29_hz_per_t, 0.5}; }
  SpinSpecies c13() const { return {Isotope::C13, gamma_c13_hz_per_t, 0.5}; }
  SpinSpecies electron() const { return electron_species(g_electron); }

  static SpinSpecies electron_species(double g_factor);

  void validate() const;
  bool operator==(const ConstantsTable&) const = default;
};

/// Default table: 29Si -8.465 MHz/T, 13C +10.7084 MHz/T, g = -2.0028,
/// D = 35 MHz, B = 1960.9 G.
const ConstantsTable& default_constants();

std::string constants_to_json(const ConstantsTable& table);
/// Missing keys keep their defaults; unknown keys are rejected.
ConstantsTable constants_from_json(std::string_view text);

}  // namespace spinloc
