// satrep: command-line front end for scenario runs, sweeps, Monte Carlo
// validation and manifest replay.
//
// Exit codes: 0 success, 1 replay digest mismatch, 2 config/usage error,
// 3 numerical failure.

#include "satrep/satrep.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config_path;
  std::string background;
  std::string out_dir;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());

  // sweep
  std::string axis;
  double from = 0.0, to = 0.0, step = 0.0;
  std::vector<double> altitudes_km;

  // validate
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 1;

  // replay
  std::string manifest_path;
};

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw satrep::ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size()))) {
    throw satrep::ConfigError("cannot write '" + p.string() + "'");
  }
}

// Resolves the scenario and round-trips it through its canonical text, so a
// manifest replay starts from exactly the same values.
struct Resolved {
  satrep::Scenario scenario;
  std::string text;
  std::string atmosphere_label;
};

Resolved resolve(const std::string& config_path, const std::string& background) {
  auto s = satrep::load_scenario(config_path);
  if (!background.empty()) s.background = satrep::noise::parse_regime(background);
  Resolved r;
  r.atmosphere_label = s.atmosphere.label;
  r.text = satrep::to_config_text(s);
  r.scenario = satrep::parse_scenario(r.text);
  return r;
}

json intermediates(const satrep::ScenarioResult& r) {
  return {{"distance_km", r.rate.chain.total_ground_distance_m / 1e3},
          {"altitude_km", r.rate.chain.satellite_altitude_m / 1e3},
          {"n_links", r.n_links},
          {"T_FB_s", r.rate.t_fb_s},
          {"P0_avg", r.rate.p0_avg},
          {"eta1_max", r.eta1_max},
          {"no_mutual_visibility", r.no_visibility}};
}

void report_flags(const satrep::ScenarioResult& r, const std::string& where) {
  if (r.no_visibility) {
    std::cerr << "satrep: no mutual visibility" << where << ", rate is 0\n";
  }
  if (r.wavelength_clamped) {
    std::cerr << "satrep: wavelength outside the atmosphere table" << where
              << ", edge value used\n";
  }
}

struct Output {
  std::string file;
  std::string csv;
  json intermediates = json::array();
};

Output do_run(const satrep::Scenario& s) {
  const auto r = satrep::run_scenario(s);
  for (const auto& [n, rate] : r.candidates) {
    std::cerr << "satrep: nesting n=" << n << " gives " << rate << " pairs/day\n";
  }
  report_flags(r, "");
  Output o{"results.csv", satrep::csv_table({r}), json::array({intermediates(r)})};
  return o;
}

Output do_sweep(const satrep::Scenario& s, const Options& opt) {
  const auto axis = satrep::parse_axis(opt.axis);
  const auto grid = satrep::make_grid(opt.from, opt.to, opt.step);
  const auto pts = satrep::sweep(s, axis, grid, opt.altitudes_km, opt.workers);
  Output o{"results.csv", satrep::csv_table(satrep::results_of(pts)), json::array()};
  for (const auto& p : pts) {
    std::ostringstream where;
    where << " at " << satrep::to_string(axis) << "=" << p.axis_value;
    if (!opt.altitudes_km.empty()) where << " altitude_km=" << p.series_altitude_km;
    report_flags(p.result, where.str());
    o.intermediates.push_back(intermediates(p.result));
  }
  return o;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Output do_validate(const satrep::Scenario& s, const Options& opt) {
  const auto v = satrep::validate_scenario(s, opt.trials, opt.seed, opt.workers);
  std::string csv =
      "n_links,trials,seed,p_link,p_swap,slots_per_flyby,analytic_pairs_per_flyby,"
      "mc_pairs_per_flyby,mc_std_error,ratio,z_score\n";
  csv += std::to_string(v.analytic.n_links) + "," + std::to_string(v.mc.trials) + "," +
         std::to_string(opt.seed) + "," + fmt(v.mc_config.p_link) + "," + fmt(v.mc_config.p_swap) +
         "," + fmt(v.mc_config.slots_per_flyby) + "," + fmt(v.analytic.rate.pairs_per_flyby) + "," +
         fmt(v.mc.pairs_per_flyby) + "," + fmt(v.mc.std_error) + "," + fmt(v.ratio) + "," +
         fmt(v.z_score) + "\n";
  return {"validation.csv", csv, json::array({intermediates(v.analytic)})};
}

json args_json(const std::string& command, const Options& opt) {
  json a = json::object();
  if (command == "sweep") {
    a = {{"axis", opt.axis}, {"from", opt.from}, {"to", opt.to}, {"step", opt.step},
         {"altitudes_km", opt.altitudes_km}};
  } else if (command == "validate") {
    a = {{"trials", opt.trials}, {"seed", opt.seed}};
  }
  a["workers"] = opt.workers;
  return a;
}

Output execute(const std::string& command, const satrep::Scenario& s, const Options& opt) {
  if (command == "run") return do_run(s);
  if (command == "sweep") return do_sweep(s, opt);
  if (command == "validate") return do_validate(s, opt);
  throw satrep::ConfigError("unknown command '" + command + "'");
}

void emit(const Output& o, const std::string& out_dir, const json* manifest) {
  if (out_dir.empty()) {
    std::cout << o.csv;
    return;
  }
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / o.file, o.csv);
  if (manifest) write_file(fs::path(out_dir) / "manifest.json", manifest->dump(2) + "\n");
  std::cerr << "satrep: wrote " << (fs::path(out_dir) / o.file).string() << "\n";
}

int run_command(const std::string& command, const Options& opt) {
  const auto r = resolve(opt.config_path, opt.background);
  const auto out = execute(command, r.scenario, opt);

  json m;
  m["tool"] = "satrep";
  m["version"] = std::string(satrep::kVersion);
  m["command"] = command;
  m["args"] = args_json(command, opt);
  m["source_config"] = opt.config_path;
  m["config"] = r.text;
  m["atmosphere_label"] = r.atmosphere_label;
  m["rng"] = {{"algorithm", std::string(satrep::montecarlo::kRngAlgorithm)},
              {"version", satrep::montecarlo::kRngVersion},
              {"seed", command == "validate" ? json(opt.seed) : json(nullptr)}};
  m["intermediates"] = out.intermediates;
  m["outputs"] = {{out.file, {{"sha256", sha256_hex(out.csv)}, {"bytes", out.csv.size()}}}};
  emit(out, opt.out_dir, &m);
  return 0;
}

int replay(const Options& opt) {
  json m;
  try {
    m = json::parse(read_file(opt.manifest_path));
  } catch (const json::exception& e) {
    throw satrep::ConfigError("manifest: " + std::string(e.what()));
  }
  Options o = opt;
  std::string command;
  std::string config;
  json outputs;
  try {
    command = m.at("command").get<std::string>();
    config = m.at("config").get<std::string>();
    outputs = m.at("outputs");
    const auto& a = m.at("args");
    if (command == "sweep") {
      o.axis = a.at("axis").get<std::string>();
      o.from = a.at("from").get<double>();
      o.to = a.at("to").get<double>();
      o.step = a.at("step").get<double>();
      o.altitudes_km = a.at("altitudes_km").get<std::vector<double>>();
    } else if (command == "validate") {
      o.trials = a.at("trials").get<std::uint64_t>();
      o.seed = a.at("seed").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw satrep::ConfigError("manifest: " + std::string(e.what()));
  }
  if (m.value("version", std::string()) != satrep::kVersion) {
    std::cerr << "satrep: manifest was written by version " << m.value("version", std::string("?"))
              << ", this is " << satrep::kVersion << "\n";
  }

  const auto scenario = satrep::parse_scenario(config);
  const auto out = execute(command, scenario, o);
  emit(out, o.out_dir, nullptr);

  const auto it = outputs.find(out.file);
  if (it == outputs.end()) throw satrep::ConfigError("manifest: no digest for " + out.file);
  const std::string want = it->at("sha256").get<std::string>();
  const std::string got = sha256_hex(out.csv);
  if (want != got) {
    std::cerr << "satrep: replay MISMATCH for " << out.file << ": expected " << want << ", got "
              << got << "\n";
    return kExitMismatch;
  }
  std::cerr << "satrep: replay matches " << out.file << " (sha256 " << got << ")\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satellite quantum repeater rate and link-budget calculator"};
  app.set_version_flag("--version", std::string(satrep::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--background", opt.background, "Override the background preset")
      ->check(CLI::IsMember({"day", "night", "none"}));
  app.add_option("--out", opt.out_dir, "Write CSV and manifest.json into this directory");
  app.add_option("--workers", opt.workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Evaluate one scenario");
  run->add_option("config", opt.config_path, "Scenario file")->required();

  auto* sw = app.add_subcommand("sweep", "Evaluate a scenario over a grid");
  sw->add_option("config", opt.config_path, "Scenario file")->required();
  sw->add_option("--axis", opt.axis, "ground_distance|altitude|eta_s|eta_q|eta_w|eta_r|eta_d")
      ->required();
  sw->add_option("--from", opt.from, "First grid value (km for distances)")->required();
  sw->add_option("--to", opt.to, "Last grid value")->required();
  sw->add_option("--step", opt.step, "Grid step")->required();
  sw->add_option("--altitudes", opt.altitudes_km, "Altitude series in km")->delimiter(',');

  auto* val = app.add_subcommand("validate", "Check the analytic rate against Monte Carlo");
  val->add_option("config", opt.config_path, "Scenario file")->required();
  val->add_option("--trials", opt.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  val->add_option("--seed", opt.seed, "RNG seed");

  auto* rep = app.add_subcommand("replay", "Re-execute a manifest and compare digests");
  rep->add_option("manifest", opt.manifest_path, "manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (rep->parsed()) return replay(opt);
    if (run->parsed()) return run_command("run", opt);
    if (sw->parsed()) return run_command("sweep", opt);
    return run_command("validate", opt);
  } catch (const satrep::ConfigError& e) {
    std::cerr << "satrep: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const satrep::NoVisibilityError& e) {
    std::cerr << "satrep: " << e.what() << "\n";
    return kExitConfig;
  } catch (const satrep::Error& e) {
    std::cerr << "satrep: numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "satrep: " << e.what() << "\n";
    return kExitConfig;
  }
}
