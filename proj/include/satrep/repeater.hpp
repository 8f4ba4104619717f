#pragma once

// Analytic rates for the nested satellite repeater chain and for direct
// transmission, plus the memory requirements that go with them.

#include "satrep/constants.hpp"
#include "satrep/error.hpp"
#include "satrep/linkbudget.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace satrep::repeater {

struct Efficiencies {
  double source = 0.9;
  double qnd = 0.9;
  double mem_write = 0.9;
  double mem_read = 0.9;
  double detector = 0.9;

  void validate() const {
    for (double v : {source, qnd, mem_write, mem_read, detector}) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("Efficiencies: every efficiency must lie in [0, 1]");
      }
    }
  }
};

enum class EfficiencyParam { source, qnd, mem_write, mem_read, detector };

inline constexpr std::array kAllEfficiencyParams{EfficiencyParam::source, EfficiencyParam::qnd,
                                                 EfficiencyParam::mem_write,
                                                 EfficiencyParam::mem_read,
                                                 EfficiencyParam::detector};

inline std::string_view name(EfficiencyParam p) {
  switch (p) {
  case EfficiencyParam::source: return "eta_s";
  case EfficiencyParam::qnd: return "eta_q";
  case EfficiencyParam::mem_write: return "eta_w";
  case EfficiencyParam::mem_read: return "eta_r";
  case EfficiencyParam::detector: return "eta_d";
  }
  return "?";
}

inline double& field(Efficiencies& e, EfficiencyParam p) {
  switch (p) {
  case EfficiencyParam::source: return e.source;
  case EfficiencyParam::qnd: return e.qnd;
  case EfficiencyParam::mem_write: return e.mem_write;
  case EfficiencyParam::mem_read: return e.mem_read;
  case EfficiencyParam::detector: return e.detector;
  }
  return e.source;
}

struct ChainConfig {
  int nesting_n = 3;
  double source_rate_hz = 10e6;
  double total_ground_distance_m = 20'000e3;
  double satellite_altitude_m = 1'000e3;

  int link_count() const { return 1 << nesting_n; }
  double link_length_m() const { return std::ldexp(total_ground_distance_m, -nesting_n); }

  void validate() const {
    if (nesting_n < 0 || nesting_n > 30) {
      throw ConfigError("ChainConfig: nesting level must lie in [0, 30]");
    }
    if (!(source_rate_hz > 0.0)) throw ConfigError("ChainConfig: source rate must be positive");
    if (!(total_ground_distance_m >= 0.0)) {
      throw ConfigError("ChainConfig: ground distance must be >= 0");
    }
    if (!(satellite_altitude_m > 0.0)) throw ConfigError("ChainConfig: altitude must be positive");
  }
};

/// Probability of creating, transmitting and storing one elementary-link
/// pair per source shot: eta_s * P0 * eta_q^2 * eta_w^2.
inline double entanglement_generation_prob(const Efficiencies& eff, double p0_avg) {
  return eff.source * p0_avg * eff.qnd * eff.qnd * eff.mem_write * eff.mem_write;
}

/// Linear-optics Bell measurement with memory readout: eta_r^2 eta_d^2 / 2.
inline double swap_success_prob(const Efficiencies& eff) {
  return eff.mem_read * eff.mem_read * eff.detector * eff.detector / 2.0;
}

/// R_s * T_FB * P_EG * (2/3 * P_ES)^n
inline double pairs_per_flyby(const ChainConfig& chain, double p_eg, double p_es, double t_fb_s) {
  if (!(t_fb_s >= 0.0)) throw ConfigError("pairs_per_flyby: T_FB must be >= 0");
  return chain.source_rate_hz * t_fb_s * p_eg * std::pow(2.0 / 3.0 * p_es, chain.nesting_n);
}

inline double pairs_per_flyby(const ChainConfig& chain, const Efficiencies& eff, double p0_avg,
                              double t_fb_s) {
  return pairs_per_flyby(chain, entanglement_generation_prob(eff, p0_avg), swap_success_prob(eff),
                         t_fb_s);
}

/// Temporal modes a ground memory holds while the far-end herald travels:
/// R_s * eta_s * eta1_max * L0 / c.
inline double memory_mode_requirement(const ChainConfig& chain, const Efficiencies& eff,
                                      double eta1_max) {
  return chain.source_rate_hz * eff.source * eta1_max * chain.link_length_m() / kSpeedOfLight;
}

inline double required_storage_time(double total_distance_m) {
  if (!(total_distance_m >= 0.0)) throw ConfigError("storage time: distance must be >= 0");
  return total_distance_m / kSpeedOfLight;
}

/// Link-level quantities taken from a transmission profile.
struct LinkInputs {
  double p0_avg = 0.0;
  double t_fb_s = 0.0;
  double eta1_max = 0.0;
  double flybys_per_day = 0.0;
};

struct RateResult {
  double p0_avg = 0.0;
  double p_eg = 0.0;
  double p_es = 0.0;
  double pairs_per_flyby = 0.0;
  double flybys_per_day = 0.0;
  double pairs_per_day = 0.0;
  double t_fb_s = 0.0;
  double n_mod = 0.0;
  double storage_time_s = 0.0;
  ChainConfig chain;
  Efficiencies eff;
};

inline RateResult pairs_per_day(const ChainConfig& chain, const Efficiencies& eff,
                                const LinkInputs& link) {
  chain.validate();
  eff.validate();
  RateResult r;
  r.chain = chain;
  r.eff = eff;
  r.p0_avg = link.p0_avg;
  r.t_fb_s = link.t_fb_s;
  r.flybys_per_day = link.flybys_per_day;
  r.p_eg = entanglement_generation_prob(eff, link.p0_avg);
  r.p_es = swap_success_prob(eff);
  r.pairs_per_flyby = pairs_per_flyby(chain, r.p_eg, r.p_es, link.t_fb_s);
  r.pairs_per_day = r.pairs_per_flyby * r.flybys_per_day;
  r.n_mod = memory_mode_requirement(chain, eff, link.eta1_max);
  r.storage_time_s = required_storage_time(chain.total_ground_distance_m);
  return r;
}

inline LinkInputs link_inputs(const linkbudget::LinkPass& lp, const orbital::EarthModel& earth) {
  return {lp.profile.p0_avg, lp.profile.flyby_time(), lp.profile.eta1_max,
          orbital::mean_passes_per_day(lp.pass.orbit, earth)};
}

inline constexpr double kDirectSourceRateHz = 1e9;

/// Direct transmission: every source shot is a pair and no device
/// efficiencies apply, so pairs/day = R_s * int eta2 dt summed over the
/// day's passes.
inline RateResult direct_rate_from_profile(double source_rate_hz, double distance_m,
                                           double altitude_m, double integral_eta2_per_pass,
                                           double t_fb_s, double passes_per_day) {
  RateResult r;
  r.chain = {0, source_rate_hz, distance_m, altitude_m};
  r.eff = {1.0, 1.0, 1.0, 1.0, 1.0};
  r.t_fb_s = t_fb_s;
  r.p0_avg = t_fb_s > 0.0 ? integral_eta2_per_pass / t_fb_s : 0.0;
  r.p_eg = r.p0_avg;
  r.p_es = 1.0;
  r.pairs_per_flyby = source_rate_hz * integral_eta2_per_pass;
  r.flybys_per_day = passes_per_day;
  r.pairs_per_day = r.pairs_per_flyby * r.flybys_per_day;
  return r;
}

struct DirectOutcome {
  RateResult rate;
  std::optional<linkbudget::LinkPass> pass; // empty without mutual visibility
};

/// Direct downlink of both photons from one satellite to stations
/// distance_m apart. Zero rate when the stations never share visibility.
inline DirectOutcome direct_transmission_rate(double distance_m, double altitude_m,
                                              orbital::Direction direction,
                                              const linkbudget::OpticalChannel& ch,
                                              const linkbudget::AtmosphereModel& atm,
                                              const orbital::EarthModel& earth,
                                              double min_elevation_rad = deg_to_rad(10.0),
                                              double source_rate_hz = kDirectSourceRateHz,
                                              double step_s = 10.0) {
  const auto link = orbital::make_link(distance_m, earth, min_elevation_rad);
  try {
    auto lp = linkbudget::link_pass(link, altitude_m, direction, ch, atm, earth, step_s);
    auto r = direct_rate_from_profile(source_rate_hz, distance_m, altitude_m,
                                      lp.profile.integral_eta2, lp.profile.flyby_time(),
                                      orbital::mean_passes_per_day(lp.pass.orbit, earth));
    return {r, std::move(lp)};
  } catch (const NoVisibilityError&) {
    return {direct_rate_from_profile(source_rate_hz, distance_m, altitude_m, 0.0, 0.0, 0.0),
            std::nullopt};
  }
}

/// Exponent with which the rate scales in one efficiency.
inline int rate_exponent(EfficiencyParam p, int nesting_n) {
  switch (p) {
  case EfficiencyParam::source: return 1;
  case EfficiencyParam::qnd:
  case EfficiencyParam::mem_write: return 2;
  case EfficiencyParam::mem_read:
  case EfficiencyParam::detector: return 2 * nesting_n;
  }
  return 0;
}

struct SensitivityRow {
  double value = 0.0;
  double pairs_per_day = 0.0;
};

struct SensitivityTable {
  EfficiencyParam param = EfficiencyParam::source;
  int exponent = 0;
  std::vector<SensitivityRow> rows;
};

/// Rate versus one efficiency, every other input held at the baseline.
inline SensitivityTable sensitivity_sweep(const ChainConfig& chain, const Efficiencies& baseline,
                                          const LinkInputs& link, EfficiencyParam param,
                                          std::span<const double> grid) {
  SensitivityTable t{param, rate_exponent(param, chain.nesting_n), {}};
  for (double v : grid) {
    Efficiencies e = baseline;
    field(e, param) = v;
    t.rows.push_back({v, pairs_per_day(chain, e, link).pairs_per_day});
  }
  return t;
}

/// Least-squares slope of log(rate) against log(value); zero rates skipped.
inline double loglog_slope(std::span<const SensitivityRow> rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.value > 0.0 && r.pairs_per_day > 0.0) {
      pts.emplace_back(std::log(r.value), std::log(r.pairs_per_day));
    }
  }
  if (pts.size() < 2) throw NumericalError("loglog_slope: need two positive points");
  double mx = 0, my = 0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw NumericalError("loglog_slope: grid values are all equal");
  return sxy / sxx;
}

} // namespace satrep::repeater
