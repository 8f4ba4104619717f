#pragma once

// Time-resolved downlink transmission for one elementary link.

#include "satrep/atmosphere.hpp"
#include "satrep/optics.hpp"
#include "satrep/orbital.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace satrep::linkbudget {

struct ArmTransmission {
  double diffraction = 0.0; // after pointing jitter
  double atmosphere = 0.0;
  double excess = 1.0;
  bool wavelength_clamped = false;

  double total() const { return diffraction * atmosphere * excess; }
};

inline ArmTransmission single_photon_transmission(const OpticalChannel& ch,
                                                  const AtmosphereModel& atm,
                                                  const orbital::ElevationRange& geom) {
  const auto t_atm = atmospheric_transmittance(atm, ch.wavelength_m, geom.elevation_rad);
  return {pointing_smeared_fraction(ch, geom.slant_range_m), t_atm.value,
          db_to_fraction(ch.excess_loss_db), t_atm.wavelength_clamped};
}

struct ProfileSample {
  double t_s = 0.0;
  double eta1_a = 0.0;
  double eta1_b = 0.0;
  double eta2 = 0.0;
};

struct TransmissionProfile {
  std::vector<ProfileSample> samples;
  orbital::PassWindow window;
  double p0_avg = 0.0;       // time-averaged two-photon transmission
  double eta1_max = 0.0;     // best single-arm transmission during the pass
  double eta2_peak = 0.0;    // best two-photon transmission during the pass
  double integral_eta2 = 0.0; // int eta2 dt over the window, seconds
  bool wavelength_clamped = false;

  double flyby_time() const { return window.duration(); }
  double peak_loss_db() const { return loss_db(eta2_peak); }
};

/// Trapezoidal integral of eta2 over the samples.
inline double integrate_eta2(const std::vector<ProfileSample>& s) {
  double acc = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    acc += 0.5 * (s[i].eta2 + s[i - 1].eta2) * (s[i].t_s - s[i - 1].t_s);
  }
  return acc;
}

/// Samples both arms every step_s across the window (plus the window end).
/// A stationary geometry is sampled at the two window edges only.
inline TransmissionProfile two_photon_profile(const orbital::LinkGeometry& link,
                                              const orbital::OrbitSpec& orbit,
                                              const orbital::PassWindow& window,
                                              const OpticalChannel& ch,
                                              const AtmosphereModel& atm,
                                              const orbital::EarthModel& earth,
                                              double step_s = 10.0) {
  ch.validate();
  atm.validate();
  if (!(step_s > 0.0)) throw ConfigError("two_photon_profile: step_s must be positive");
  if (!(window.t_end_s >= window.t_start_s)) {
    throw ConfigError("two_photon_profile: window end precedes start");
  }

  std::vector<double> times;
  if (orbital::orbital_period(orbit, earth).stationary()) {
    times = {window.t_start_s, window.t_end_s};
  } else {
    for (long k = 0;; ++k) {
      const double t = window.t_start_s + static_cast<double>(k) * step_s;
      if (t >= window.t_end_s) break;
      times.push_back(t);
    }
    times.push_back(window.t_end_s);
  }

  TransmissionProfile prof;
  prof.window = window;
  prof.samples.reserve(times.size());
  for (double t : times) {
    const auto g = orbital::geometry_at(link.a, link.b, orbit, earth, t);
    const auto arm_a = single_photon_transmission(ch, atm, g.a);
    const auto arm_b = single_photon_transmission(ch, atm, g.b);
    ProfileSample s{t, arm_a.total(), arm_b.total(), 0.0};
    s.eta2 = s.eta1_a * s.eta1_b;
    prof.eta1_max = std::max({prof.eta1_max, s.eta1_a, s.eta1_b});
    prof.eta2_peak = std::max(prof.eta2_peak, s.eta2);
    prof.wavelength_clamped = prof.wavelength_clamped || arm_a.wavelength_clamped ||
                              arm_b.wavelength_clamped;
    prof.samples.push_back(s);
  }
  prof.integral_eta2 = integrate_eta2(prof.samples);
  const double tfb = window.duration();
  prof.p0_avg = tfb > 0.0 ? prof.integral_eta2 / tfb : prof.samples.front().eta2;
  return prof;
}

struct LinkPass {
  orbital::RepresentativePass pass;
  TransmissionProfile profile;
};

/// Representative pass over the link plus its transmission profile.
/// Throws NoVisibilityError when the stations never share the satellite.
inline LinkPass link_pass(const orbital::LinkGeometry& link, double altitude_m,
                          orbital::Direction direction, const OpticalChannel& ch,
                          const AtmosphereModel& atm, const orbital::EarthModel& earth,
                          double step_s = 10.0) {
  auto pass = orbital::representative_pass(link, altitude_m, direction, earth, step_s);
  if (!pass) {
    throw NoVisibilityError("no mutual visibility for this link geometry");
  }
  auto prof = two_photon_profile(link, pass->orbit, pass->window, ch, atm, earth, step_s);
  return {*pass, std::move(prof)};
}

inline constexpr double kFiberAttenuationDbPerKm = 0.15;

inline double fiber_loss_db(double distance_m, double atten_db_per_km = kFiberAttenuationDbPerKm) {
  if (!(distance_m >= 0.0)) throw ConfigError("fiber: distance must be >= 0");
  return atten_db_per_km * (distance_m / 1000.0);
}

inline double fiber_transmission(double distance_m,
                                 double atten_db_per_km = kFiberAttenuationDbPerKm) {
  return db_to_fraction(fiber_loss_db(distance_m, atten_db_per_km));
}

} // namespace satrep::linkbudget
