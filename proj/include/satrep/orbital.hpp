#pragma once

// Circular equatorial orbits, ground-station visibility and flyby windows.
//
// Everything here works in the rotating Earth frame restricted to the
// equatorial great circle: positions are longitudes (radians), the satellite
// is described by the longitude of its sub-satellite point.

#include "satrep/constants.hpp"
#include "satrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace satrep::orbital {

struct EarthModel {
  double radius_m = 6'371.0e3;
  double mu_m3s2 = 3.986004418e14;
  double rotation_period_s = 86'164.1; // sidereal

  double rotation_rate() const { return kTwoPi / rotation_period_s; }

  void validate() const {
    if (!(radius_m > 0.0) || !(mu_m3s2 > 0.0) || !(rotation_period_s > 0.0)) {
      throw ConfigError("EarthModel: radius, GM and rotation period must be positive");
    }
  }
};

enum class Direction { co_rotating, counter_rotating };

inline std::string to_string(Direction d) {
  return d == Direction::co_rotating ? "co-rotating" : "counter-rotating";
}

struct OrbitSpec {
  double altitude_m = 1'000.0e3;
  Direction direction = Direction::counter_rotating;
  double phase0_rad = 0.0; // sub-satellite longitude at t = 0

  void validate() const {
    if (!(altitude_m > 0.0)) {
      throw ConfigError("OrbitSpec: altitude_m must be positive");
    }
    if (!(phase0_rad >= 0.0 && phase0_rad < kTwoPi)) {
      throw ConfigError("OrbitSpec: phase0_rad must lie in [0, 2pi)");
    }
  }
};

struct GroundStation {
  double longitude_rad = 0.0;
  double min_elevation_rad = deg_to_rad(10.0);

  void validate() const {
    if (!(min_elevation_rad >= 0.0 && min_elevation_rad < kPi / 2.0)) {
      throw ConfigError("GroundStation: min_elevation_rad must lie in [0, pi/2)");
    }
  }
};

struct ElevationRange {
  double elevation_rad = 0.0;
  double slant_range_m = 0.0;
};

struct GeometrySample {
  double t_s = 0.0;
  ElevationRange a;
  ElevationRange b;
};

struct PassWindow {
  double t_start_s = 0.0;
  double t_end_s = 0.0;

  double duration() const { return t_end_s - t_start_s; }
};

struct OrbitalPeriod {
  double absolute_s = 0.0;
  /// Revolution period seen from the rotating Earth; +inf for a stationary
  /// ground track (co-rotating at geostationary altitude).
  double synodic_s = 0.0;

  bool stationary() const { return std::isinf(synodic_s); }
};

/// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

/// Unsigned great-circle angle between two equatorial longitudes, in [0, pi].
inline double central_angle(double lon_a, double lon_b) {
  const double d = wrap_two_pi(lon_a - lon_b);
  return d > kPi ? kTwoPi - d : d;
}

inline double mean_motion(double altitude_m, const EarthModel& earth) {
  const double a = earth.radius_m + altitude_m;
  return std::sqrt(earth.mu_m3s2 / (a * a * a));
}

/// Altitude at which the inertial angular rate equals the Earth's rotation.
inline double geostationary_altitude(const EarthModel& earth) {
  const double w = earth.rotation_rate();
  return std::cbrt(earth.mu_m3s2 / (w * w)) - earth.radius_m;
}

namespace detail {
// Relative tolerance under which a co-rotating orbit counts as stationary.
inline constexpr double kStationaryTolerance = 1e-9;
} // namespace detail

/// Signed angular rate of the sub-satellite point in the Earth frame.
/// Co-rotating orbits drift eastward (+) at w - wE, counter-rotating orbits
/// drift westward (-) at w + wE. Returns exactly 0 for a stationary track.
inline double ground_track_rate(const OrbitSpec& orbit, const EarthModel& earth) {
  const double w = mean_motion(orbit.altitude_m, earth);
  const double we = earth.rotation_rate();
  if (orbit.direction == Direction::counter_rotating) {
    return -(w + we);
  }
  const double rel = w - we;
  return std::abs(rel) <= detail::kStationaryTolerance * we ? 0.0 : rel;
}

inline OrbitalPeriod orbital_period(const OrbitSpec& orbit, const EarthModel& earth) {
  const double w = mean_motion(orbit.altitude_m, earth);
  const double rate = std::abs(ground_track_rate(orbit, earth));
  return {kTwoPi / w,
          rate == 0.0 ? std::numeric_limits<double>::infinity() : kTwoPi / rate};
}

/// Longitude of the sub-satellite point at time t, in [0, 2pi).
inline double subsatellite_angle(const OrbitSpec& orbit, const EarthModel& earth, double t_s) {
  return wrap_two_pi(orbit.phase0_rad + ground_track_rate(orbit, earth) * t_s);
}

inline ElevationRange elevation_and_range(const GroundStation& station, double subsat_angle,
                                          double altitude_m, const EarthModel& earth) {
  const double re = earth.radius_m;
  const double rs = re + altitude_m;
  const double cos_d = std::cos(central_angle(station.longitude_rad, subsat_angle));
  const double slant = std::sqrt(std::max(re * re + rs * rs - 2.0 * re * rs * cos_d, 0.0));
  if (slant == 0.0) {
    return {kPi / 2.0, 0.0};
  }
  const double sin_el = std::clamp((rs * cos_d - re) / slant, -1.0, 1.0);
  return {std::asin(sin_el), slant};
}

/// Central angle from a station at which the satellite sits at the given
/// elevation (inverse of elevation_and_range).
inline double central_angle_at_elevation(double elevation_rad, double altitude_m,
                                         const EarthModel& earth) {
  const double ratio = earth.radius_m * std::cos(elevation_rad) / (earth.radius_m + altitude_m);
  return std::acos(std::clamp(ratio, -1.0, 1.0)) - elevation_rad;
}

/// Largest ground distance over which two stations can both see the
/// satellite above the given elevation (satellite over the midpoint).
inline double max_mutual_visibility_distance(double altitude_m, const EarthModel& earth,
                                             double min_elevation_rad = 0.0) {
  return 2.0 * earth.radius_m * central_angle_at_elevation(min_elevation_rad, altitude_m, earth);
}

inline GeometrySample geometry_at(const GroundStation& a, const GroundStation& b,
                                  const OrbitSpec& orbit, const EarthModel& earth, double t_s) {
  const double sub = subsatellite_angle(orbit, earth, t_s);
  return {t_s, elevation_and_range(a, sub, orbit.altitude_m, earth),
          elevation_and_range(b, sub, orbit.altitude_m, earth)};
}

namespace detail {

inline double visibility_margin(const GroundStation& a, const GroundStation& b,
                                const OrbitSpec& orbit, const EarthModel& earth, double t) {
  const auto g = geometry_at(a, b, orbit, earth, t);
  return std::min(g.a.elevation_rad - a.min_elevation_rad, g.b.elevation_rad - b.min_elevation_rad);
}

// Bisects a visibility transition between lo (state `lo_visible`) and hi.
template <class Margin>
double refine_boundary(Margin&& margin, double lo, double hi, bool lo_visible) {
  for (int i = 0; i < 100 && hi - lo > 1e-9; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((margin(mid) >= 0.0) == lo_visible) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Report the visible side of the bracket.
  return lo_visible ? lo : hi;
}

} // namespace detail

/// Maximal intervals in [0, horizon_s] during which both stations see the
/// satellite at or above their elevation cutoffs. Visibility is sampled every
/// step_s and each transition is refined by bisection; windows shorter than a
/// step that fall between two samples are not reported.
inline std::vector<PassWindow> find_pass_windows(const GroundStation& a, const GroundStation& b,
                                                 const OrbitSpec& orbit, const EarthModel& earth,
                                                 double horizon_s, double step_s = 10.0) {
  earth.validate();
  orbit.validate();
  a.validate();
  b.validate();
  if (!(step_s > 0.0)) {
    throw ConfigError("find_pass_windows: step_s must be positive");
  }
  const auto period = orbital_period(orbit, earth);
  if (!period.stationary() && horizon_s < period.synodic_s) {
    throw ConfigError("find_pass_windows: horizon must cover at least one synodic period");
  }
  if (!(horizon_s > 0.0)) {
    throw ConfigError("find_pass_windows: horizon must be positive");
  }

  auto margin = [&](double t) { return detail::visibility_margin(a, b, orbit, earth, t); };
  std::vector<PassWindow> windows;

  if (period.stationary()) {
    if (margin(0.0) >= 0.0) windows.push_back({0.0, horizon_s});
    return windows;
  }

  const auto steps = static_cast<long>(std::ceil(horizon_s / step_s));
  double prev_t = 0.0;
  bool prev_visible = margin(0.0) >= 0.0;
  bool open = prev_visible;
  double open_t = 0.0;

  for (long k = 1; k <= steps; ++k) {
    const double t = std::min(static_cast<double>(k) * step_s, horizon_s);
    const bool visible = margin(t) >= 0.0;
    if (visible != prev_visible) {
      const double edge = detail::refine_boundary(margin, prev_t, t, prev_visible);
      if (visible) {
        open = true;
        open_t = edge;
      } else if (open) {
        windows.push_back({open_t, edge});
        open = false;
      }
    }
    prev_t = t;
    prev_visible = visible;
  }
  if (open) windows.push_back({open_t, horizon_s});
  return windows;
}

/// Two ground stations placed symmetrically about a midpoint longitude.
struct LinkGeometry {
  GroundStation a;
  GroundStation b;
  double midpoint_rad = 0.0;
  double ground_distance_m = 0.0;
};

inline LinkGeometry make_link(double ground_distance_m, const EarthModel& earth,
                              double min_elevation_rad = deg_to_rad(10.0),
                              double midpoint_rad = 0.0) {
  if (!(ground_distance_m >= 0.0) || ground_distance_m > kPi * earth.radius_m) {
    throw ConfigError("make_link: ground distance must lie in [0, pi * R_e]");
  }
  const double half = 0.5 * ground_distance_m / earth.radius_m;
  return {{wrap_two_pi(midpoint_rad - half), min_elevation_rad},
          {wrap_two_pi(midpoint_rad + half), min_elevation_rad},
          wrap_two_pi(midpoint_rad),
          ground_distance_m};
}

/// Stations of a chain of `links` equal elementary links spanning
/// total_distance_m along the equator, starting at longitude 0.
inline std::vector<GroundStation> chain_stations(double total_distance_m, int links,
                                                 const EarthModel& earth,
                                                 double min_elevation_rad = deg_to_rad(10.0)) {
  if (links < 1) throw ConfigError("chain_stations: need at least one link");
  std::vector<GroundStation> out;
  const double dphi = total_distance_m / earth.radius_m / links;
  for (int i = 0; i <= links; ++i) {
    out.push_back({wrap_two_pi(i * dphi), min_elevation_rad});
  }
  return out;
}

struct RepresentativePass {
  OrbitSpec orbit;   // phased so the pass is centred on the link midpoint
  PassWindow window;
  bool stationary = false;
};

/// Phases the orbit so that the sub-satellite point crosses the link midpoint
/// at half a synodic period, and returns the pass around that instant.
/// A stationary track is parked over the midpoint and the window spans a day.
/// Returns nullopt when the two stations never share visibility.
inline std::optional<RepresentativePass> representative_pass(const LinkGeometry& link,
                                                             double altitude_m,
                                                             Direction direction,
                                                             const EarthModel& earth,
                                                             double step_s = 10.0) {
  OrbitSpec orbit{altitude_m, direction, 0.0};
  const double rate = ground_track_rate(orbit, earth);
  const auto period = orbital_period(orbit, earth);

  if (period.stationary()) {
    orbit.phase0_rad = link.midpoint_rad;
    auto w = find_pass_windows(link.a, link.b, orbit, earth, kSecondsPerDay, step_s);
    if (w.empty()) return std::nullopt;
    return RepresentativePass{orbit, w.front(), true};
  }

  const double t_mid = 0.5 * period.synodic_s;
  orbit.phase0_rad = wrap_two_pi(link.midpoint_rad - rate * t_mid);
  const auto windows = find_pass_windows(link.a, link.b, orbit, earth, period.synodic_s, step_s);
  for (const auto& w : windows) {
    if (w.t_start_s <= t_mid && t_mid <= w.t_end_s) {
      return RepresentativePass{orbit, w, false};
    }
  }
  return std::nullopt;
}

/// Long-run average number of passes per day (one per synodic period).
inline double mean_passes_per_day(const OrbitSpec& orbit, const EarthModel& earth) {
  const auto p = orbital_period(orbit, earth);
  return p.stationary() ? 1.0 : kSecondsPerDay / p.synodic_s;
}

} // namespace satrep::orbital
