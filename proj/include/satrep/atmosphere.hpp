#pragma once

// Zenith transmittance table scaled by a secant airmass.

#include "satrep/constants.hpp"
#include "satrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace satrep::linkbudget {

struct ZenithEntry {
  double wavelength_m = 0.0;
  double transmittance = 1.0;
};

struct AtmosphereModel {
  std::vector<ZenithEntry> zenith; // sorted by wavelength
  /// Elevation below which the airmass stops growing.
  double airmass_cap_elevation_rad = deg_to_rad(10.0);
  std::string label = "custom";

  void validate() const {
    if (zenith.empty()) {
      throw ConfigError("AtmosphereModel: zenith transmittance table is empty");
    }
    for (std::size_t i = 0; i < zenith.size(); ++i) {
      const auto& e = zenith[i];
      if (!(e.wavelength_m > 0.0)) {
        throw ConfigError("AtmosphereModel: wavelengths must be positive");
      }
      if (!(e.transmittance > 0.0 && e.transmittance <= 1.0)) {
        throw ConfigError("AtmosphereModel: zenith transmittance must lie in (0, 1]");
      }
      if (i > 0 && !(zenith[i - 1].wavelength_m < e.wavelength_m)) {
        throw ConfigError("AtmosphereModel: table must be strictly sorted by wavelength");
      }
    }
    if (!(airmass_cap_elevation_rad > 0.0 && airmass_cap_elevation_rad <= kPi / 2.0)) {
      throw ConfigError("AtmosphereModel: airmass cap elevation must lie in (0, pi/2]");
    }
  }
};

struct Transmittance {
  double value = 1.0;
  /// Set when the wavelength fell outside the table and was clamped.
  bool wavelength_clamped = false;
};

/// Zenith transmittance at lambda, linearly interpolated in the table.
inline Transmittance zenith_transmittance(const AtmosphereModel& model, double lambda) {
  model.validate();
  const auto& t = model.zenith;
  if (lambda <= t.front().wavelength_m) {
    return {t.front().transmittance, lambda < t.front().wavelength_m};
  }
  if (lambda >= t.back().wavelength_m) {
    return {t.back().transmittance, lambda > t.back().wavelength_m};
  }
  auto hi = std::upper_bound(t.begin(), t.end(), lambda,
                             [](double l, const ZenithEntry& e) { return l < e.wavelength_m; });
  auto lo = std::prev(hi);
  const double u = (lambda - lo->wavelength_m) / (hi->wavelength_m - lo->wavelength_m);
  return {lo->transmittance + u * (hi->transmittance - lo->transmittance), false};
}

inline double airmass(const AtmosphereModel& model, double elevation_rad) {
  return 1.0 / std::sin(std::max(elevation_rad, model.airmass_cap_elevation_rad));
}

inline Transmittance atmospheric_transmittance(const AtmosphereModel& model, double lambda,
                                               double elevation_rad) {
  if (!(elevation_rad > 0.0)) {
    throw NumericalError("atmospheric_transmittance: elevation must be above the horizon");
  }
  auto z = zenith_transmittance(model, lambda);
  z.value = std::pow(z.value, airmass(model, elevation_rad));
  return z;
}

/// Single-wavelength table, mostly useful in tests.
inline AtmosphereModel uniform_atmosphere(double transmittance) {
  AtmosphereModel m;
  m.zenith = {{500e-9, transmittance}};
  m.label = "uniform";
  return m;
}

/// Shipped default for a rural sea-level site. The values are calibration
/// constants, not radiative-transfer output; together with
/// kCalibratedExcessLossDb they put a 1000 km satellite over a 2000 km link
/// at ~40 dB of two-photon loss.
inline AtmosphereModel default_atmosphere() {
  AtmosphereModel m;
  m.zenith = {{470e-9, 0.70}, {580e-9, 0.80}, {670e-9, 0.85}};
  m.label = "calibrated, not MODTRAN";
  return m;
}

/// Reads `wavelength_nm,zenith_transmittance` CSV (header required).
inline AtmosphereModel parse_atmosphere_csv(std::istream& in, std::string label = "file") {
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("atmosphere table: missing header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "wavelength_nm,zenith_transmittance") {
    throw ConfigError("atmosphere table: expected header 'wavelength_nm,zenith_transmittance', got '" +
                      line + "'");
  }
  AtmosphereModel m;
  m.label = std::move(label);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) {
      throw ConfigError("atmosphere table: malformed row at line " + std::to_string(lineno));
    }
    try {
      std::size_t pa = 0, pb = 0;
      const double nm = std::stod(a, &pa);
      const double tz = std::stod(b, &pb);
      if (pa != a.size() || pb != b.size()) throw std::invalid_argument("trailing");
      m.zenith.push_back({nm / 1e9, tz});
    } catch (const std::logic_error&) {
      throw ConfigError("atmosphere table: non-numeric value at line " + std::to_string(lineno));
    }
  }
  std::sort(m.zenith.begin(), m.zenith.end(),
            [](const ZenithEntry& x, const ZenithEntry& y) { return x.wavelength_m < y.wavelength_m; });
  m.validate();
  return m;
}

inline AtmosphereModel load_atmosphere_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("atmosphere table: cannot open '" + path + "'");
  return parse_atmosphere_csv(in, path);
}

} // namespace satrep::linkbudget
