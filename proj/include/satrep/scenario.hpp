#pragma once

// Scenario configuration and the orbital -> link budget -> rate -> noise
// pipeline behind the command-line tool.
//
// Config files are flat `key = value` text, one entry per line, `#` starts a
// comment, string values may be double-quoted. Unknown keys are rejected.

#include "satrep/linkbudget.hpp"
#include "satrep/montecarlo.hpp"
#include "satrep/noise.hpp"
#include "satrep/orbital.hpp"
#include "satrep/repeater.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace satrep {

inline constexpr std::string_view kVersion = "1.0.0";

enum class Mode { repeater, direct, fiber };

inline std::string to_string(Mode m) {
  switch (m) {
  case Mode::repeater: return "repeater";
  case Mode::direct: return "direct";
  case Mode::fiber: return "fiber";
  }
  return "repeater";
}

struct Scenario {
  Mode mode = Mode::repeater;
  double distance_m = 20'000e3;
  double altitude_m = 1'000e3;
  std::optional<int> nesting_n; // empty: best of auto_candidates
  std::vector<int> auto_candidates{2, 3};
  orbital::Direction direction = orbital::Direction::counter_rotating;
  linkbudget::OpticalChannel channel{580e-9, 0.5, 1.0, 0.5e-6, linkbudget::kCalibratedExcessLossDb};
  linkbudget::AtmosphereModel atmosphere = linkbudget::default_atmosphere();
  repeater::Efficiencies eff;
  double source_rate_hz = 10e6;
  noise::Regime background = noise::Regime::day;
  double fov_rad = 10e-6;
  double filter_bw_hz = 10e6;
  bool noise_both_stations = true;
  double step_s = 10.0;
  double min_elevation_rad = deg_to_rad(10.0);
  orbital::EarthModel earth;

  void validate() const {
    earth.validate();
    channel.validate();
    atmosphere.validate();
    eff.validate();
    if (!(distance_m >= 0.0) || distance_m > kPi * earth.radius_m) {
      throw ConfigError("distance_km: must lie in [0, half the Earth's circumference]");
    }
    if (!(altitude_m > 0.0)) throw ConfigError("altitude_km: must be positive");
    if (nesting_n && (*nesting_n < 0 || *nesting_n > 30)) {
      throw ConfigError("nesting: must be 'auto' or an integer in [0, 30]");
    }
    if (auto_candidates.empty()) throw ConfigError("nesting_candidates: must not be empty");
    if (!(source_rate_hz > 0.0)) throw ConfigError("source_rate_hz: must be positive");
    if (!(fov_rad > 0.0)) throw ConfigError("fov_urad: must be positive");
    if (!(filter_bw_hz > 0.0)) throw ConfigError("filter_bw_hz: must be positive");
    if (!(step_s > 0.0)) throw ConfigError("step_s: must be positive");
    if (!(min_elevation_rad >= 0.0 && min_elevation_rad < kPi / 2.0)) {
      throw ConfigError("min_elevation_deg: must lie in [0, 90)");
    }
  }
};

// ---------------------------------------------------------------------------
// Config text

namespace config {

struct Entry {
  std::string value;
  int line = 0;
};

using Table = std::map<std::string, Entry>;

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline Table parse(std::istream& in) {
  Table t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (t.count(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    t[key] = {value, lineno};
  }
  return t;
}

inline double to_double(const std::string& key, const Entry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size() || !std::isfinite(v)) throw std::invalid_argument("bad");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(key + " (line " + std::to_string(e.line) + "): expected a number, got '" +
                      e.value + "'");
  }
}

inline int to_int(const std::string& key, const Entry& e) {
  const double v = to_double(key, e);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ConfigError(key + " (line " + std::to_string(e.line) + "): expected an integer");
  }
  return static_cast<int>(v);
}

inline bool to_bool(const std::string& key, const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ConfigError(key + " (line " + std::to_string(e.line) + "): expected true or false");
}

/// `nm:T;nm:T;...`
inline linkbudget::AtmosphereModel parse_inline_table(const std::string& key, const Entry& e) {
  std::string text = "wavelength_nm,zenith_transmittance\n";
  std::istringstream items(e.value);
  std::string item;
  while (std::getline(items, item, ';')) {
    const auto c = item.find(':');
    if (c == std::string::npos) {
      throw ConfigError(key + " (line " + std::to_string(e.line) + "): expected 'nm:T' entries");
    }
    text += trim(item.substr(0, c)) + "," + trim(item.substr(c + 1)) + "\n";
  }
  std::istringstream csv(text);
  try {
    return linkbudget::parse_atmosphere_csv(csv, "inline");
  } catch (const ConfigError& err) {
    throw ConfigError(key + " (line " + std::to_string(e.line) + "): " + err.what());
  }
}

/// Shortest decimal d with read(stod(d)) == v, where `read` is the unit
/// conversion applied when the text is parsed back.
template <class Read>
std::string format_exact(double v, double shown, Read read) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, shown);
    const double d = std::stod(buf);
    if (read(d) == v) {
      if (d == std::floor(d) && std::abs(d) < 1e15) std::snprintf(buf, sizeof buf, "%.0f", d);
      return buf;
    }
  }
  std::snprintf(buf, sizeof buf, "%.17g", shown);
  return buf;
}

inline std::string format_double(double v) {
  return format_exact(v, v, [](double x) { return x; });
}

/// Values stored in SI and written in a larger unit (km).
inline std::string format_times(double v, double unit) {
  return format_exact(v, v / unit, [unit](double x) { return x * unit; });
}

/// Values stored in SI and written in a smaller unit (nm, urad).
inline std::string format_per(double v, double per) {
  return format_exact(v, v * per, [per](double x) { return x / per; });
}

inline std::string format_degrees(double rad) {
  return format_exact(rad, rad_to_deg(rad), [](double x) { return deg_to_rad(x); });
}

} // namespace config

/// Builds a fully resolved scenario. Mode-dependent defaults:
/// repeater 580 nm at 10 MHz; direct 670 nm up to 2000 km altitude and
/// 470 nm above, at 1 GHz; the filter bandwidth follows the source rate.
/// `altitude_km = geo` selects the geostationary altitude, co-rotating.
/// A relative `atmosphere` path is taken relative to base_dir.
inline Scenario resolve_scenario(const config::Table& t, const std::string& base_dir = {}) {
  using config::to_double;
  static const std::vector<std::string> known{
      "mode", "distance_km", "altitude_km", "nesting", "nesting_candidates", "direction",
      "wavelength_nm", "tx_aperture_m", "rx_aperture_m", "pointing_sigma_urad", "excess_loss_db",
      "atmosphere", "atmosphere_table", "atmosphere_label", "airmass_cap_deg", "eta_s", "eta_q", "eta_w", "eta_r",
      "eta_d", "source_rate_hz", "background", "fov_urad", "filter_bw_hz", "noise_both_stations",
      "step_s", "min_elevation_deg", "earth_radius_km", "earth_mu_m3s2", "earth_rotation_s"};
  for (const auto& [k, e] : t) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw ConfigError(k + " (line " + std::to_string(e.line) + "): unknown key");
    }
  }
  auto get = [&](const char* k) -> const config::Entry* {
    auto it = t.find(k);
    return it == t.end() ? nullptr : &it->second;
  };

  Scenario s;
  if (auto e = get("mode")) {
    if (e->value == "repeater") s.mode = Mode::repeater;
    else if (e->value == "direct") s.mode = Mode::direct;
    else if (e->value == "fiber") s.mode = Mode::fiber;
    else throw ConfigError("mode (line " + std::to_string(e->line) + "): expected repeater|direct|fiber");
  }

  if (auto e = get("earth_radius_km")) s.earth.radius_m = to_double("earth_radius_km", *e) * 1e3;
  if (auto e = get("earth_mu_m3s2")) s.earth.mu_m3s2 = to_double("earth_mu_m3s2", *e);
  if (auto e = get("earth_rotation_s")) s.earth.rotation_period_s = to_double("earth_rotation_s", *e);

  if (auto e = get("distance_km")) s.distance_m = to_double("distance_km", *e) * 1e3;

  bool geo = false;
  if (auto e = get("altitude_km")) {
    if (e->value == "geo") {
      geo = true;
      s.altitude_m = orbital::geostationary_altitude(s.earth);
    } else {
      s.altitude_m = to_double("altitude_km", *e) * 1e3;
    }
  } else if (s.mode == Mode::direct) {
    s.altitude_m = 10'000e3;
  }

  if (auto e = get("direction")) {
    if (e->value == "co-rotating") s.direction = orbital::Direction::co_rotating;
    else if (e->value == "counter-rotating") s.direction = orbital::Direction::counter_rotating;
    else if (e->value != "auto") {
      throw ConfigError("direction (line " + std::to_string(e->line) +
                        "): expected co-rotating|counter-rotating|auto");
    }
  }
  if (geo && !get("direction")) s.direction = orbital::Direction::co_rotating;

  if (auto e = get("nesting")) {
    if (e->value != "auto") s.nesting_n = config::to_int("nesting", *e);
  }
  if (auto e = get("nesting_candidates")) {
    s.auto_candidates.clear();
    std::istringstream items(e->value);
    std::string item;
    while (std::getline(items, item, ',')) {
      s.auto_candidates.push_back(config::to_int("nesting_candidates", {config::trim(item), e->line}));
    }
  }

  if (auto e = get("wavelength_nm")) {
    s.channel.wavelength_m = to_double("wavelength_nm", *e) / 1e9;
  } else if (s.mode == Mode::direct) {
    s.channel.wavelength_m = s.altitude_m <= 2'000e3 + 1.0 ? 670e-9 : 470e-9;
  }
  if (auto e = get("tx_aperture_m")) s.channel.tx_aperture_m = to_double("tx_aperture_m", *e);
  if (auto e = get("rx_aperture_m")) s.channel.rx_aperture_m = to_double("rx_aperture_m", *e);
  if (auto e = get("pointing_sigma_urad")) {
    s.channel.pointing_sigma_rad = to_double("pointing_sigma_urad", *e) / 1e6;
  }
  if (auto e = get("excess_loss_db")) s.channel.excess_loss_db = to_double("excess_loss_db", *e);

  if (get("atmosphere") && get("atmosphere_table")) {
    throw ConfigError("atmosphere: give either 'atmosphere' or 'atmosphere_table', not both");
  }
  if (auto e = get("atmosphere")) {
    if (e->value != "default") {
      try {
        std::filesystem::path path(e->value);
        if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
        s.atmosphere = linkbudget::load_atmosphere_csv(path.string());
      } catch (const ConfigError& err) {
        throw ConfigError("atmosphere (line " + std::to_string(e->line) + "): " + err.what());
      }
    }
  }
  if (auto e = get("atmosphere_table")) s.atmosphere = config::parse_inline_table("atmosphere_table", *e);
  if (auto e = get("atmosphere_label")) s.atmosphere.label = e->value;
  if (auto e = get("airmass_cap_deg")) {
    s.atmosphere.airmass_cap_elevation_rad = deg_to_rad(to_double("airmass_cap_deg", *e));
  }

  if (auto e = get("eta_s")) s.eff.source = to_double("eta_s", *e);
  if (auto e = get("eta_q")) s.eff.qnd = to_double("eta_q", *e);
  if (auto e = get("eta_w")) s.eff.mem_write = to_double("eta_w", *e);
  if (auto e = get("eta_r")) s.eff.mem_read = to_double("eta_r", *e);
  if (auto e = get("eta_d")) s.eff.detector = to_double("eta_d", *e);

  if (auto e = get("source_rate_hz")) {
    s.source_rate_hz = to_double("source_rate_hz", *e);
  } else if (s.mode != Mode::repeater) {
    s.source_rate_hz = repeater::kDirectSourceRateHz;
  }
  s.filter_bw_hz = s.source_rate_hz;
  if (auto e = get("filter_bw_hz")) s.filter_bw_hz = to_double("filter_bw_hz", *e);

  if (auto e = get("background")) {
    try {
      s.background = noise::parse_regime(e->value);
    } catch (const ConfigError& err) {
      throw ConfigError("background (line " + std::to_string(e->line) + "): " + err.what());
    }
  }
  if (auto e = get("fov_urad")) s.fov_rad = to_double("fov_urad", *e) / 1e6;
  if (auto e = get("noise_both_stations")) s.noise_both_stations = config::to_bool("noise_both_stations", *e);
  if (auto e = get("step_s")) s.step_s = to_double("step_s", *e);
  if (auto e = get("min_elevation_deg")) s.min_elevation_rad = deg_to_rad(to_double("min_elevation_deg", *e));

  s.validate();
  return s;
}

inline Scenario parse_scenario(std::istream& in, const std::string& base_dir = {}) {
  return resolve_scenario(config::parse(in), base_dir);
}

inline Scenario parse_scenario(const std::string& text, const std::string& base_dir = {}) {
  std::istringstream in(text);
  return parse_scenario(in, base_dir);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_scenario(in, std::filesystem::path(path).parent_path().string());
}

/// Canonical, fully explicit config text; parsing it back yields the same
/// scenario bit for bit.
inline std::string to_config_text(const Scenario& s) {
  using config::format_double;
  std::ostringstream os;
  os << "mode = \"" << to_string(s.mode) << "\"\n";
  os << "distance_km = " << config::format_times(s.distance_m, 1e3) << "\n";
  os << "altitude_km = " << config::format_times(s.altitude_m, 1e3) << "\n";
  os << "nesting = " << (s.nesting_n ? std::to_string(*s.nesting_n) : std::string("\"auto\"")) << "\n";
  os << "nesting_candidates = \"";
  for (std::size_t i = 0; i < s.auto_candidates.size(); ++i) {
    os << (i ? "," : "") << s.auto_candidates[i];
  }
  os << "\"\n";
  os << "direction = \"" << orbital::to_string(s.direction) << "\"\n";
  os << "wavelength_nm = " << config::format_per(s.channel.wavelength_m, 1e9) << "\n";
  os << "tx_aperture_m = " << format_double(s.channel.tx_aperture_m) << "\n";
  os << "rx_aperture_m = " << format_double(s.channel.rx_aperture_m) << "\n";
  os << "pointing_sigma_urad = " << config::format_per(s.channel.pointing_sigma_rad, 1e6) << "\n";
  os << "excess_loss_db = " << format_double(s.channel.excess_loss_db) << "\n";
  os << "atmosphere_table = \"";
  for (std::size_t i = 0; i < s.atmosphere.zenith.size(); ++i) {
    os << (i ? ";" : "") << config::format_per(s.atmosphere.zenith[i].wavelength_m, 1e9) << ":"
       << format_double(s.atmosphere.zenith[i].transmittance);
  }
  os << "\"\n";
  std::string label = s.atmosphere.label;
  std::replace_if(label.begin(), label.end(), [](char c) { return c == '"' || c == '\n' || c == '\r'; }, '_');
  os << "atmosphere_label = \"" << label << "\"\n";
  os << "airmass_cap_deg = " << config::format_degrees(s.atmosphere.airmass_cap_elevation_rad) << "\n";
  os << "eta_s = " << format_double(s.eff.source) << "\n";
  os << "eta_q = " << format_double(s.eff.qnd) << "\n";
  os << "eta_w = " << format_double(s.eff.mem_write) << "\n";
  os << "eta_r = " << format_double(s.eff.mem_read) << "\n";
  os << "eta_d = " << format_double(s.eff.detector) << "\n";
  os << "source_rate_hz = " << format_double(s.source_rate_hz) << "\n";
  os << "background = \"" << noise::to_string(s.background) << "\"\n";
  os << "fov_urad = " << config::format_per(s.fov_rad, 1e6) << "\n";
  os << "filter_bw_hz = " << format_double(s.filter_bw_hz) << "\n";
  os << "noise_both_stations = " << (s.noise_both_stations ? "true" : "false") << "\n";
  os << "step_s = " << format_double(s.step_s) << "\n";
  os << "min_elevation_deg = " << config::format_degrees(s.min_elevation_rad) << "\n";
  os << "earth_radius_km = " << config::format_times(s.earth.radius_m, 1e3) << "\n";
  os << "earth_mu_m3s2 = " << format_double(s.earth.mu_m3s2) << "\n";
  os << "earth_rotation_s = " << format_double(s.earth.rotation_period_s) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Pipeline

struct ScenarioResult {
  Mode mode = Mode::repeater;
  repeater::RateResult rate;
  int n_links = 1;
  double eta1_max = 0.0;
  double eta2_peak = 0.0;
  double noise_rate_hz = 0.0;
  double noise_error_fraction = 0.0;
  double peak_loss_db = 0.0; // +inf without visibility
  bool no_visibility = false;
  bool wavelength_clamped = false;
  /// Pairs/day of every nesting level tried in auto mode, for the log.
  std::vector<std::pair<int, double>> candidates;
};

namespace detail {

inline double noise_error(const Scenario& s, double eta1_max, double eta2_peak, double* rate_out) {
  const auto env = noise::preset(s.background, s.channel.wavelength_m);
  const double rate = noise::background_rate(env, s.channel.rx_aperture_m, s.filter_bw_hz, s.fov_rad);
  if (rate_out) *rate_out = rate;
  const auto coinc = noise::coincidence_for_source(s.source_rate_hz, eta1_max, s.noise_both_stations);
  return noise::false_coincidence_error_fraction(coinc, rate, eta2_peak);
}

struct RepeaterPoint {
  repeater::RateResult rate;
  std::optional<linkbudget::LinkPass> pass;
};

inline RepeaterPoint repeater_point(const Scenario& s, int n) {
  repeater::ChainConfig chain{n, s.source_rate_hz, s.distance_m, s.altitude_m};
  chain.validate();
  const auto link = orbital::make_link(chain.link_length_m(), s.earth, s.min_elevation_rad);
  try {
    auto lp = linkbudget::link_pass(link, s.altitude_m, s.direction, s.channel, s.atmosphere,
                                    s.earth, s.step_s);
    return {repeater::pairs_per_day(chain, s.eff, repeater::link_inputs(lp, s.earth)), std::move(lp)};
  } catch (const NoVisibilityError&) {
    return {repeater::pairs_per_day(chain, s.eff, {}), std::nullopt};
  }
}

inline int chosen_nesting(const Scenario& s, std::vector<std::pair<int, double>>* log,
                          std::optional<RepeaterPoint>* best_out) {
  if (s.nesting_n) {
    *best_out = repeater_point(s, *s.nesting_n);
    return *s.nesting_n;
  }
  int best_n = s.auto_candidates.front();
  for (int n : s.auto_candidates) {
    auto p = repeater_point(s, n);
    log->emplace_back(n, p.rate.pairs_per_day);
    if (!*best_out || p.rate.pairs_per_day > (*best_out)->rate.pairs_per_day) {
      best_n = n;
      *best_out = std::move(p);
    }
  }
  return best_n;
}

} // namespace detail

inline ScenarioResult run_scenario(const Scenario& s) {
  s.validate();
  ScenarioResult r;
  r.mode = s.mode;

  switch (s.mode) {
  case Mode::repeater: {
    std::optional<detail::RepeaterPoint> best;
    const int n = detail::chosen_nesting(s, &r.candidates, &best);
    r.rate = best->rate;
    r.n_links = 1 << n;
    if (best->pass) {
      const auto& prof = best->pass->profile;
      r.eta1_max = prof.eta1_max;
      r.eta2_peak = prof.eta2_peak;
      r.peak_loss_db = prof.peak_loss_db();
      r.wavelength_clamped = prof.wavelength_clamped;
    } else {
      r.no_visibility = true;
    }
    break;
  }
  case Mode::direct: {
    auto out = repeater::direct_transmission_rate(s.distance_m, s.altitude_m, s.direction, s.channel,
                                                  s.atmosphere, s.earth, s.min_elevation_rad,
                                                  s.source_rate_hz, s.step_s);
    r.rate = out.rate;
    r.n_links = 1;
    if (out.pass) {
      r.eta1_max = out.pass->profile.eta1_max;
      r.eta2_peak = out.pass->profile.eta2_peak;
      r.peak_loss_db = out.pass->profile.peak_loss_db();
      r.wavelength_clamped = out.pass->profile.wavelength_clamped;
    } else {
      r.no_visibility = true;
    }
    break;
  }
  case Mode::fiber: {
    // Source at the midpoint, each photon crosses half the fiber.
    const double eta = linkbudget::fiber_transmission(s.distance_m);
    r.rate = repeater::direct_rate_from_profile(s.source_rate_hz, s.distance_m, s.altitude_m,
                                                eta * kSecondsPerDay, kSecondsPerDay, 1.0);
    r.n_links = 1;
    r.eta1_max = linkbudget::fiber_transmission(0.5 * s.distance_m);
    r.eta2_peak = eta;
    r.peak_loss_db = linkbudget::fiber_loss_db(s.distance_m);
    return r; // background light does not reach a fiber
  }
  }

  if (r.no_visibility) {
    r.peak_loss_db = std::numeric_limits<double>::infinity();
    r.noise_error_fraction = 0.0;
  } else {
    r.noise_error_fraction = detail::noise_error(s, r.eta1_max, r.eta2_peak, &r.noise_rate_hz);
  }
  return r;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kCsvHeader =
    "mode,distance_km,altitude_km,n_links,T_FB_s,flybys_per_day,P0_avg,P_EG,P_ES,"
    "pairs_per_flyby,pairs_per_day,N_mod,storage_ms,noise_error_fraction,peak_loss_db";

namespace detail {
inline std::string csv_number(double v) {
  if (!std::isfinite(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
} // namespace detail

/// One CSV row (no trailing newline). A non-finite value, which only occurs
/// for peak_loss_db without visibility, is written as an empty cell.
inline std::string csv_row(const ScenarioResult& r) {
  using detail::csv_number;
  const auto& q = r.rate;
  std::string out = to_string(r.mode);
  for (double v : {q.chain.total_ground_distance_m / 1e3, q.chain.satellite_altitude_m / 1e3,
                   static_cast<double>(r.n_links), q.t_fb_s, q.flybys_per_day, q.p0_avg, q.p_eg,
                   q.p_es, q.pairs_per_flyby, q.pairs_per_day, q.n_mod, q.storage_time_s * 1e3,
                   r.noise_error_fraction, r.peak_loss_db}) {
    out += ',';
    out += csv_number(v);
  }
  return out;
}

inline std::string csv_table(const std::vector<ScenarioResult>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += csv_row(r);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class Axis { ground_distance, altitude, eta_s, eta_q, eta_w, eta_r, eta_d };

inline Axis parse_axis(std::string_view s) {
  if (s == "ground_distance") return Axis::ground_distance;
  if (s == "altitude") return Axis::altitude;
  if (s == "eta_s") return Axis::eta_s;
  if (s == "eta_q") return Axis::eta_q;
  if (s == "eta_w") return Axis::eta_w;
  if (s == "eta_r") return Axis::eta_r;
  if (s == "eta_d") return Axis::eta_d;
  throw ConfigError("axis: expected ground_distance|altitude|eta_s|eta_q|eta_w|eta_r|eta_d, got '" +
                    std::string(s) + "'");
}

inline std::string to_string(Axis a) {
  switch (a) {
  case Axis::ground_distance: return "ground_distance";
  case Axis::altitude: return "altitude";
  case Axis::eta_s: return "eta_s";
  case Axis::eta_q: return "eta_q";
  case Axis::eta_w: return "eta_w";
  case Axis::eta_r: return "eta_r";
  case Axis::eta_d: return "eta_d";
  }
  return "?";
}

/// Distances and altitudes are in km, efficiencies dimensionless.
inline Scenario apply_axis(Scenario s, Axis a, double v) {
  switch (a) {
  case Axis::ground_distance: s.distance_m = v * 1e3; break;
  case Axis::altitude: s.altitude_m = v * 1e3; break;
  case Axis::eta_s: s.eff.source = v; break;
  case Axis::eta_q: s.eff.qnd = v; break;
  case Axis::eta_w: s.eff.mem_write = v; break;
  case Axis::eta_r: s.eff.mem_read = v; break;
  case Axis::eta_d: s.eff.detector = v; break;
  }
  return s;
}

/// from, from + step, ... up to `to` (inclusive within rounding).
inline std::vector<double> make_grid(double from, double to, double step) {
  if (!std::isfinite(from) || !std::isfinite(to) || !(step > 0.0) || from > to) {
    throw ConfigError("sweep grid is empty: need finite from <= to and step > 0");
  }
  std::vector<double> g;
  const double slack = 1e-9 * std::max({std::abs(from), std::abs(to), step});
  for (long i = 0;; ++i) {
    const double v = from + static_cast<double>(i) * step;
    if (v > to + slack) break;
    g.push_back(v);
    if (i > 1'000'000) throw ConfigError("sweep grid has more than a million points");
  }
  return g;
}

struct SweepPoint {
  double series_altitude_km = 0.0; // 0 when no altitude series is given
  double axis_value = 0.0;
  ScenarioResult result;
};

/// Runs every (altitude series value, grid value) combination. Rows are
/// sorted by altitude then axis value, independent of grid order and worker
/// count. A failing point aborts the sweep naming the point.
inline std::vector<SweepPoint> sweep(const Scenario& base, Axis axis, std::vector<double> grid,
                                     const std::vector<double>& altitudes_km = {},
                                     unsigned workers = 1) {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  std::sort(grid.begin(), grid.end());
  std::vector<double> series = altitudes_km;
  std::sort(series.begin(), series.end());

  std::vector<SweepPoint> points;
  if (series.empty()) {
    for (double v : grid) points.push_back({0.0, v, {}});
  } else {
    for (double h : series) {
      for (double v : grid) points.push_back({h, v, {}});
    }
  }

  struct Failure {
    std::string message;
    bool config = false;
  };
  std::vector<Failure> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      auto& p = points[i];
      try {
        Scenario s = base;
        if (!series.empty()) s.altitude_m = p.series_altitude_km * 1e3;
        s = apply_axis(std::move(s), axis, p.axis_value);
        p.result = run_scenario(s);
      } catch (const Error& e) {
        std::ostringstream os;
        os << "sweep point " << to_string(axis) << "=" << p.axis_value;
        if (!series.empty()) os << " (altitude_km=" << p.series_altitude_km << ")";
        os << ": " << e.what();
        errors[i] = {os.str(), dynamic_cast<const ConfigError*>(&e) != nullptr};
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& f : errors) {
    if (f.message.empty()) continue;
    if (f.config) throw ConfigError(f.message);
    throw NumericalError(f.message);
  }
  return points;
}

inline std::vector<ScenarioResult> results_of(const std::vector<SweepPoint>& pts) {
  std::vector<ScenarioResult> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.result);
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo cross-check of the analytic repeater rate

struct ValidationReport {
  ScenarioResult analytic;
  int nesting_n = 0;
  montecarlo::McConfig mc_config;
  montecarlo::McEstimate mc;
  double ratio = 0.0;  // analytic / Monte Carlo
  double z_score = 0.0; // (analytic - MC) / std_error
};

inline montecarlo::McConfig mc_config_for(const repeater::RateResult& r, std::uint64_t trials,
                                          std::uint64_t seed) {
  montecarlo::McConfig c;
  c.p_link = r.p_eg;
  c.p_swap = r.p_es;
  c.nesting_n = r.chain.nesting_n;
  c.slots_per_flyby = r.chain.source_rate_hz * r.t_fb_s;
  c.trials = trials;
  c.rng_seed = seed;
  return c;
}

inline ValidationReport validate_scenario(const Scenario& s, std::uint64_t trials, std::uint64_t seed,
                                          unsigned workers = 1) {
  if (s.mode != Mode::repeater) {
    throw ConfigError("validate: only repeater scenarios have a Monte Carlo oracle");
  }
  ValidationReport v;
  v.analytic = run_scenario(s);
  if (v.analytic.no_visibility) {
    throw NoVisibilityError("validate: no mutual visibility, nothing to simulate");
  }
  v.nesting_n = v.analytic.rate.chain.nesting_n;
  v.mc_config = mc_config_for(v.analytic.rate, trials, seed);
  v.mc = montecarlo::estimate_rate(v.mc_config, workers);
  v.ratio = v.analytic.rate.pairs_per_flyby / v.mc.pairs_per_flyby;
  v.z_score = (v.analytic.rate.pairs_per_flyby - v.mc.pairs_per_flyby) / v.mc.std_error;
  return v;
}

} // namespace satrep
