// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "satrep/satrep.hpp"

#include "oracles/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace satrep;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!c.ok) ++failures;
  std::printf("%s %2d %s:%s (%.2f s)\n", c.ok ? "PASS" : "FAIL", id, title.c_str(), c.detail.str().c_str(),
              secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct ChainCase {
  double altitude_km;
  int n;
};

const std::vector<ChainCase> kChainCases{{500, 2}, {500, 3}, {1000, 2}, {1000, 3}, {1500, 2}, {1500, 3}};

Scenario chain_scenario(const ChainCase& c, double distance_km = 20'000) {
  Scenario s;
  s.distance_m = distance_km * 1e3;
  s.altitude_m = c.altitude_km * 1e3;
  s.nesting_n = c.n;
  return s;
}

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

int main() {
  const orbital::EarthModel earth;

  criterion(1, "link-budget anchor 40 +/- 5 dB", [&](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s;
    const auto link = orbital::make_link(2000e3, earth, s.min_elevation_rad);
    const auto lp = linkbudget::link_pass(link, 1000e3, orbital::Direction::counter_rotating, s.channel,
                                          s.atmosphere, earth, s.step_s);
    const double peak = lp.profile.peak_loss_db();
    const double avg = linkbudget::loss_db(lp.profile.p0_avg);
    const double secs = elapsed_since(t0);
    c.detail << " peak two-photon loss " << peak << " dB, pass-averaged " << avg << " dB, atmosphere '"
             << s.atmosphere.label << "', excess " << s.channel.excess_loss_db << " dB/arm";
    c.require(std::abs(peak - 40.0) <= 5.0, "peak loss within 40 +/- 5 dB");
    c.require(secs < 1.0, "runtime < 1 s");
  });

  criterion(2, "fiber baseline exactly 300 dB", [&](Check& c) {
    const double db = linkbudget::fiber_loss_db(2000e3);
    const auto r = run_scenario(parse_scenario("mode = fiber\ndistance_km = 2000\n"));
    c.detail << " fiber_loss_db = " << db << ", pipeline peak_loss_db = " << r.peak_loss_db;
    c.require(db == 300.0 && r.peak_loss_db == 300.0, "exactly 300");
  });

  criterion(3, "storage time 67 ms for 20,000 km", [&](Check& c) {
    const double t = repeater::required_storage_time(20'000e3);
    const auto r = run_scenario(chain_scenario({1000, 3}));
    c.detail << " " << t * 1e3 << " ms, pipeline " << r.rate.storage_time_s * 1e3 << " ms";
    c.require(std::abs(t / 0.067 - 1.0) < 0.01, "within 1% of 67 ms");
    c.require(r.rate.storage_time_s == t, "pipeline agrees");
  });

  criterion(4, "memory modes within 1e3-1e4 (factor 3 at edges)", [&](Check& c) {
    int evaluated = 0;
    for (const auto& fc : kChainCases) {
      const auto r = run_scenario(chain_scenario(fc));
      c.detail << " h=" << fc.altitude_km << "/n=" << fc.n << ":";
      if (r.no_visibility) {
        c.detail << "no-visibility";
        continue;
      }
      ++evaluated;
      c.detail << r.rate.n_mod;
      c.require(r.rate.n_mod >= 1e3 / 3.0 && r.rate.n_mod <= 3e4, "N_mod in [333, 3e4]");
    }
    c.require(evaluated > 0, "at least one visible scenario");
  });

  criterion(5, "GEO reachability", [&](Check& c) {
    const double h = orbital::geostationary_altitude(earth);
    const auto r = run_scenario(parse_scenario("mode = direct\ndistance_km = 20000\naltitude_km = geo\n"));
    const double dmax = orbital::max_mutual_visibility_distance(h, earth);
    const double closed = 2.0 * earth.radius_m * std::acos(earth.radius_m / (earth.radius_m + h));
    c.detail << " direct GEO rate at 20,000 km = " << r.rate.pairs_per_day
             << " (no_visibility=" << r.no_visibility << "), max mutual distance " << dmax / 1e3 << " km";
    c.require(r.rate.pairs_per_day == 0.0 && r.no_visibility, "rate 0 and flagged");
    c.require(std::abs(dmax - closed) < 1e-3, "matches closed form");
    c.require(std::abs(dmax / 1e3 - 18'100.0) < 100.0, "about 18,100 km");
  });

  criterion(6, "daytime noise", [&](Check& c) {
    for (const auto& fc : kChainCases) {
      const auto r = run_scenario(chain_scenario(fc));
      if (r.no_visibility) continue;
      c.detail << " h=" << fc.altitude_km << "/n=" << fc.n << ":" << r.noise_error_fraction * 100 << "%";
      c.require(r.noise_error_fraction >= 0.01 / 3.0 && r.noise_error_fraction <= 0.03,
                "repeater error within 1% x/ 3");
    }
    double worst = 0.0, worst_d = 0.0;
    for (double d = 1000; d <= 14'000; d += 1000) {
      std::ostringstream cfg;
      cfg << "mode = direct\naltitude_km = geo\ndistance_km = " << d << "\n";
      const auto r = run_scenario(parse_scenario(cfg.str()));
      if (!r.no_visibility && r.noise_error_fraction > worst) {
        worst = r.noise_error_fraction;
        worst_d = d;
      }
    }
    c.detail << "; GEO direct max error " << worst * 100 << "% at " << worst_d << " km";
    c.require(worst > 0.5, "GEO direct error > 50% somewhere <= 14,000 km");
  });

  criterion(7, "orbital mechanics", [&](Check& c) {
    const double h_geo = orbital::geostationary_altitude(earth) / 1e3;
    const double t500 = orbital::orbital_period({500e3, orbital::Direction::counter_rotating, 0.0}, earth).absolute_s;
    c.detail << " GEO altitude " << h_geo << " km, 500 km period " << t500 << " s";
    c.require(std::abs(h_geo - 35'793.0) <= 20.0, "GEO 35,793 +/- 20 km");
    c.require(std::abs(t500 - 5669.0) <= 2.0, "period 5669 +/- 2 s");
  });

  criterion(8, "diffraction numerics", [&](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const double x = 3.8317059702075123;
    const double closed = linkbudget::airy_encircled_energy(x);
    const double radial = oracle::airy_energy_radial(x);
    c.detail << " E(first null) " << closed << " vs radial " << radial << ";";
    c.require(std::abs(radial - 0.838) <= 0.001 && std::abs(closed - radial) <= 0.001, "Airy 0.838");

    struct Set {
      double lambda, tx, rx, z, sigma;
    };
    for (const Set& p : {Set{580e-9, 0.5, 1.0, 1414e3, 0.5e-6}, Set{470e-9, 0.5, 1.0, 1000e3, 1.0e-6},
                         Set{670e-9, 0.5, 1.0, 800e3, 0.3e-6}}) {
      const double grid = oracle::pointing_grid(p.lambda, p.tx, p.rx, p.z, p.sigma);
      const double quad = linkbudget::pointing_smeared_fraction({p.lambda, p.tx, p.rx, p.sigma, 0.0}, p.z);
      c.detail << " |" << quad << "-" << grid << "|=" << std::abs(quad - grid);
      c.require(std::abs(quad - grid) <= 1e-4, "quadrature within 1e-4 of grid");
    }
    c.require(elapsed_since(t0) < 10.0, "runtime < 10 s");
  });

  criterion(9, "Monte Carlo vs analytic and curve shape", [&](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    montecarlo::McConfig base;
    base.slots_per_flyby = 4e9;
    base.rng_seed = 2024;

    auto m0 = base;
    m0.p_link = 5.9e-5;
    m0.nesting_n = 0;
    m0.trials = 100'000;
    const auto e0 = montecarlo::estimate_rate(m0);
    const double a0 = m0.slots_per_flyby * m0.p_link;
    c.detail << " n=0 z=" << (a0 - e0.pairs_per_flyby) / e0.std_error << ";";
    c.require(std::abs(a0 - e0.pairs_per_flyby) <= 3.0 * e0.std_error, "n=0 within 3 sigma");

    auto m1 = base;
    m1.p_link = 5.9e-5;
    m1.p_swap = 0.32805;
    m1.nesting_n = 1;
    const auto e1 = montecarlo::estimate_rate(m1);
    const double a1 = m1.slots_per_flyby * m1.p_swap / oracle::expected_max_two_geometric(m1.p_link);
    c.detail << " n=1 MC/closed=" << e1.pairs_per_flyby / a1 << ";";
    c.require(std::abs(e1.pairs_per_flyby / a1 - 1.0) <= 0.05, "n=1 within 5%");

    for (const auto& fc : kChainCases) {
      const auto s = chain_scenario(fc);
      if (run_scenario(s).no_visibility) continue;
      const auto v = validate_scenario(s, 20'000, 11);
      c.detail << " h=" << fc.altitude_km << "/n=" << fc.n << " ratio " << v.ratio;
      c.require(v.ratio >= 0.5 && v.ratio <= 2.0, "analytic/MC in [0.5, 2]");
    }

    // Curve shape over 2,000-20,000 km. A rate below one pair per thousand
    // days counts as zero.
    constexpr double kZero = 1e-3;
    for (double h : {500.0, 1000.0, 1500.0}) {
      Scenario s;
      s.altitude_m = h * 1e3;
      s.nesting_n = 3;
      const auto pts = sweep(s, Axis::ground_distance, make_grid(2000, 20'000, 1000));
      for (std::size_t i = 1; i < pts.size(); ++i) {
        c.require(pts[i].result.rate.pairs_per_day < pts[i - 1].result.rate.pairs_per_day,
                  "repeater rate decreasing in distance (h=" + std::to_string(int(h)) + ")");
      }
      c.require(pts.back().result.rate.pairs_per_day > kZero, "repeater nonzero at 20,000 km");
    }
    for (double d = 16'000; d <= 20'000; d += 1000) {
      for (const char* alt : {"1000", "10000", "geo"}) {
        std::ostringstream cfg;
        cfg << "mode = direct\ndistance_km = " << d << "\naltitude_km = " << alt << "\n";
        const auto r = run_scenario(parse_scenario(cfg.str()));
        c.require(r.rate.pairs_per_day < kZero, std::string("direct ") + alt + " zero beyond 16,000 km");
      }
      std::ostringstream fib;
      fib << "mode = fiber\ndistance_km = " << d << "\n";
      c.require(run_scenario(parse_scenario(fib.str())).rate.pairs_per_day < kZero,
                "fiber zero beyond 16,000 km");
    }
    const double secs = elapsed_since(t0);
    c.detail << "; " << secs << " s";
    c.require(secs < 60.0, "runtime < 60 s");
  });

  criterion(10, "sensitivity exponents", [&](Check& c) {
    const repeater::LinkInputs link{1e-4, 400.0, 1e-2, 16.0};
    const std::vector<double> grid{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    for (int n : {1, 2, 3}) {
      const repeater::ChainConfig chain{n, 1e7, 20'000e3, 1000e3};
      c.detail << " n=" << n << ":";
      std::vector<double> slopes;
      for (auto p : repeater::kAllEfficiencyParams) {
        const auto t = repeater::sensitivity_sweep(chain, {}, link, p, grid);
        const double sl = repeater::loglog_slope(t.rows);
        slopes.push_back(sl);
        c.detail << " " << repeater::name(p) << "=" << sl;
        c.require(std::abs(sl - repeater::rate_exponent(p, n)) <= 1e-9, "slope matches exponent");
      }
      if (n >= 2) {
        c.require(slopes[3] > slopes[1] && slopes[4] > slopes[2] && slopes[1] > slopes[0],
                  "read and detector dominate");
      }
    }
  });

  criterion(11, "manifest replay byte-identical across worker counts", [&](Check& c) {
    const fs::path dir = fs::temp_directory_path() / "satrep_acceptance_replay";
    fs::remove_all(dir);
    const std::string cli = SATREP_CLI_PATH;
    const std::string cfg = std::string(SATREP_CONFIG_DIR) + "/repeater_leo1000.toml";
    const int a = shell(cli + " --workers 1 --out " + (dir / "a").string() + " sweep " + cfg +
                        " --axis ground_distance --from 2000 --to 20000 --step 1000 --altitudes 500,1000,1500");
    const int v = shell(cli + " --workers 1 --out " + (dir / "va").string() + " validate " + cfg +
                        " --trials 2000 --seed 5");
    const int b = shell(cli + " --workers 3 --out " + (dir / "b").string() + " replay " +
                        (dir / "a" / "manifest.json").string());
    const int vb = shell(cli + " --workers 2 --out " + (dir / "vb").string() + " replay " +
                         (dir / "va" / "manifest.json").string());
    const std::string csv_a = slurp(dir / "a" / "results.csv");
    const std::string csv_b = slurp(dir / "b" / "results.csv");
    std::size_t rows = 0;
    for (char ch : csv_a) rows += ch == '\n';
    c.detail << " sweep rows " << (rows ? rows - 1 : 0) << ", exit codes " << a << "/" << b << "/" << v << "/"
             << vb;
    c.require(a == 0 && b == 0 && v == 0 && vb == 0, "commands succeed and digests match");
    c.require(!csv_a.empty() && csv_a == csv_b, "sweep CSV identical");
    c.require(slurp(dir / "va" / "validation.csv") == slurp(dir / "vb" / "validation.csv"),
              "validation CSV identical");
    c.require(rows == 58, "57 sweep rows");
    fs::remove_all(dir);
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
