#pragma once

// Background light at the ground receivers and the false-coincidence error it
// causes on an elementary link.

#include "satrep/constants.hpp"
#include "satrep/error.hpp"

#include <string>
#include <string_view>

namespace satrep::noise {

enum class Regime { day, night, none };

inline std::string to_string(Regime r) {
  switch (r) {
  case Regime::day: return "day";
  case Regime::night: return "night";
  case Regime::none: return "none";
  }
  return "none";
}

inline Regime parse_regime(std::string_view s) {
  if (s == "day") return Regime::day;
  if (s == "night") return Regime::night;
  if (s == "none") return Regime::none;
  throw ConfigError("background: expected day|night|none, got '" + std::string(s) + "'");
}

/// Measured background count rate and the receiver it was measured with.
struct BackgroundEnvironment {
  double reference_rate_hz = 0.0;
  double ref_rx_diameter_m = 1.0;
  double ref_filter_bw_hz = 1.0;
  double ref_fov_rad = 1.0;
  Regime regime = Regime::none;

  void validate() const {
    if (!(reference_rate_hz >= 0.0)) {
      throw ConfigError("BackgroundEnvironment: reference rate must be >= 0");
    }
    if (!(ref_rx_diameter_m > 0.0) || !(ref_filter_bw_hz > 0.0) || !(ref_fov_rad > 0.0)) {
      throw ConfigError("BackgroundEnvironment: reference receiver fields must be positive");
    }
  }
};

/// Optical bandwidth in Hz of a filter dlambda wide at wavelength lambda.
inline double filter_width_hz(double dlambda_m, double lambda_m) {
  return kSpeedOfLight * dlambda_m / (lambda_m * lambda_m);
}

/// Daylight sky: ~100 counts/s for a 1 m receiver, 10 MHz filter, 10 urad FoV.
/// (The corresponding spectral radiance is ~1e22 /s/m^2/um/sr; kept here for
/// reference only, the count rate is what the model uses.)
inline BackgroundEnvironment day_preset() {
  return {100.0, 1.0, 10e6, 10e-6, Regime::day};
}

/// Night sky: ~100 counts/s for a 1 m receiver, 1 nm filter, 50 urad FoV.
/// The 1 nm filter is converted to Hz at the channel wavelength.
inline BackgroundEnvironment night_preset(double lambda_m) {
  return {100.0, 1.0, filter_width_hz(1e-9, lambda_m), 50e-6, Regime::night};
}

inline BackgroundEnvironment no_background() { return {0.0, 1.0, 1.0, 1.0, Regime::none}; }

inline BackgroundEnvironment preset(Regime r, double lambda_m) {
  switch (r) {
  case Regime::day: return day_preset();
  case Regime::night: return night_preset(lambda_m);
  case Regime::none: return no_background();
  }
  return no_background();
}

/// Rescales the reference count rate linearly in collecting area, filter
/// bandwidth and field-of-view solid angle (proportional to fov^2).
inline double background_rate(const BackgroundEnvironment& env, double rx_diameter_m,
                              double filter_bw_hz, double fov_rad) {
  env.validate();
  if (!(rx_diameter_m > 0.0) || !(filter_bw_hz > 0.0) || !(fov_rad > 0.0)) {
    throw ConfigError("background_rate: receiver diameter, filter width and FoV must be positive");
  }
  const double area = (rx_diameter_m / env.ref_rx_diameter_m) * (rx_diameter_m / env.ref_rx_diameter_m);
  const double band = filter_bw_hz / env.ref_filter_bw_hz;
  const double solid = (fov_rad / env.ref_fov_rad) * (fov_rad / env.ref_fov_rad);
  return env.reference_rate_hz * area * band * solid;
}

struct CoincidenceModel {
  double coincidence_window_s = 1e-7;
  double source_rate_hz = 1e7;
  double eta_single_max = 0.0;
  /// Count a noise click at either station (x2). Off reproduces the
  /// one-sided estimate.
  bool both_stations = true;

  void validate() const {
    if (!(coincidence_window_s > 0.0)) {
      throw ConfigError("CoincidenceModel: coincidence window must be positive");
    }
    if (!(source_rate_hz >= 0.0) || !(eta_single_max >= 0.0)) {
      throw ConfigError("CoincidenceModel: rates and transmissions must be >= 0");
    }
  }
};

/// Coincidence window set to the source period.
inline CoincidenceModel coincidence_for_source(double source_rate_hz, double eta_single_max,
                                               bool both_stations = true) {
  if (!(source_rate_hz > 0.0)) throw ConfigError("coincidence: source rate must be positive");
  return {1.0 / source_rate_hz, source_rate_hz, eta_single_max, both_stations};
}

/// Share of heralded coincidences that are noise:
///   false = k * (R_noise T) * (R_s eta_single_max T),  true = R_s eta2 T,
///   fraction = false / (false + true),  k = 2 with both_stations.
inline double false_coincidence_error_fraction(const CoincidenceModel& c, double noise_rate_hz,
                                               double eta2) {
  c.validate();
  if (!(noise_rate_hz >= 0.0) || !(eta2 >= 0.0)) {
    throw ConfigError("false_coincidence_error_fraction: rates must be >= 0");
  }
  const double t = c.coincidence_window_s;
  const double p_noise = noise_rate_hz * t;
  const double p_single = c.source_rate_hz * c.eta_single_max * t;
  const double p_false = (c.both_stations ? 2.0 : 1.0) * p_noise * p_single;
  const double p_pair = c.source_rate_hz * eta2 * t;
  if (p_false == 0.0) return 0.0;
  if (p_pair == 0.0) return 1.0;
  return p_false / (p_false + p_pair);
}

} // namespace satrep::noise
