#pragma once

// Waiting-time Monte Carlo for the nested repeater protocol.
//
// Every random number is a pure function of (seed, trial, position in the
// protocol tree, attempt, draw), so results do not depend on evaluation
// order or worker count, and two configurations run with the same seed see
// the same underlying uniforms. That coupling makes the sampled waiting time
// pathwise monotone in p_link and p_swap.

#include "satrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <thread>
#include <vector>

namespace satrep::montecarlo {

inline constexpr std::string_view kRngAlgorithm = "splitmix64-keyed";
inline constexpr int kRngVersion = 1;

namespace rng {

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives a child key; distinct tags give independent streams.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t tag) {
  return mix(key ^ mix(tag + 0x632BE59BD9B4E019ULL));
}

/// Uniform double in (0, 1].
constexpr double uniform(std::uint64_t key) {
  return (static_cast<double>(key >> 11) + 1.0) * 0x1.0p-53;
}

constexpr std::uint64_t trial_key(std::uint64_t seed, std::uint64_t trial) {
  return derive(mix(seed), trial);
}

} // namespace rng

/// One stretch of constant per-slot success probability.
struct ScheduleSegment {
  double slots = 0.0;
  double p_link = 0.0;
};

struct McConfig {
  double p_link = 0.0;          // per-slot elementary-link success probability
  double p_swap = 1.0;          // entanglement swapping success probability
  int nesting_n = 0;
  double slots_per_flyby = 0.0; // R_s * T_FB
  std::uint64_t trials = 100'000;
  std::uint64_t rng_seed = 1;
  /// Optional time-varying link probability, repeated cyclically over the
  /// active slots of consecutive flybys. Empty means constant p_link.
  std::vector<ScheduleSegment> schedule;

  void validate() const {
    if (!(p_swap >= 0.0 && p_swap <= 1.0)) throw ConfigError("McConfig: p_swap must lie in [0, 1]");
    if (nesting_n < 0 || nesting_n > 30) throw ConfigError("McConfig: nesting level must lie in [0, 30]");
    if (trials < 1) throw ConfigError("McConfig: need at least one trial");
    if (!(slots_per_flyby >= 0.0)) throw ConfigError("McConfig: slots_per_flyby must be >= 0");
    if (nesting_n >= 1 && !(p_swap > 0.0)) {
      throw ConfigError("McConfig: p_swap must be positive when swapping is required");
    }
    if (schedule.empty()) {
      if (!(p_link > 0.0 && p_link <= 1.0)) throw ConfigError("McConfig: p_link must lie in (0, 1]");
    } else {
      bool any = false;
      for (const auto& s : schedule) {
        if (!(s.slots > 0.0) || !(s.p_link >= 0.0 && s.p_link <= 1.0)) {
          throw ConfigError("McConfig: schedule segments need slots > 0 and p_link in [0, 1]");
        }
        any = any || s.p_link > 0.0;
      }
      if (!any) throw ConfigError("McConfig: schedule has no slot with p_link > 0");
    }
  }
};

namespace detail {

enum : std::uint64_t { kTagSwap = 1, kTagLeft = 2, kTagRight = 3, kTagAttempt = 4, kTagDraw = 5 };

// Number of Bernoulli(p) slots up to and including the first success.
inline double geometric(double p, std::uint64_t key) {
  if (p >= 1.0) return 1.0;
  const double u = rng::uniform(key);
  return 1.0 + std::floor(std::log(u) / std::log1p(-p));
}

class Sampler {
public:
  explicit Sampler(const McConfig& cfg) : cfg_(cfg) {
    for (const auto& s : cfg_.schedule) cycle_ += s.slots;
  }

  // Completion time (in active slots) of a level-`level` pair whose
  // attempts start at `start`.
  double complete(int level, double start, std::uint64_t key) const {
    if (level == 0) return elementary(start, key);
    double t = start;
    for (std::uint64_t attempt = 0;; ++attempt) {
      const std::uint64_t ak = rng::derive(key, (attempt << 3) | kTagAttempt);
      const double left = complete(level - 1, t, rng::derive(ak, kTagLeft));
      const double right = complete(level - 1, t, rng::derive(ak, kTagRight));
      t = std::max(left, right);
      if (rng::uniform(rng::derive(ak, kTagSwap)) <= cfg_.p_swap) return t;
    }
  }

private:
  double elementary(double start, std::uint64_t key) const {
    if (cfg_.schedule.empty()) return start + geometric(cfg_.p_link, rng::derive(key, kTagDraw));
    double t = start;
    for (std::uint64_t draw = 0;; ++draw) {
      // Locate the segment that contains slot t.
      double pos = std::fmod(t, cycle_);
      std::size_t i = 0;
      while (i + 1 < cfg_.schedule.size() && pos >= cfg_.schedule[i].slots) {
        pos -= cfg_.schedule[i].slots;
        ++i;
      }
      const auto& seg = cfg_.schedule[i];
      const double left_in_segment = seg.slots - pos;
      if (seg.p_link > 0.0) {
        const double g = geometric(seg.p_link, rng::derive(key, (draw << 3) | kTagDraw));
        if (g <= left_in_segment) return t + g;
      }
      t += left_in_segment;
    }
  }

  const McConfig& cfg_;
  double cycle_ = 0.0;
};

} // namespace detail

/// Slots needed for one end-to-end pair in trial `trial`.
inline double sample_chain_waiting_time(const McConfig& cfg, std::uint64_t trial) {
  return detail::Sampler(cfg).complete(cfg.nesting_n, 0.0, rng::trial_key(cfg.rng_seed, trial));
}

struct McEstimate {
  double pairs_per_flyby = 0.0;
  double std_error = 0.0;  // delete-one jackknife
  double mean_wait_slots = 0.0;
  std::uint64_t trials = 0;
};

/// pairs per flyby = slots_per_flyby / mean waiting time. Trials are split
/// over `workers` threads; the result is identical for any worker count.
inline McEstimate estimate_rate(const McConfig& cfg, unsigned workers = 1) {
  cfg.validate();
  const std::uint64_t n = cfg.trials;
  std::vector<double> waits(n);
  const detail::Sampler sampler(cfg);
  auto run = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      waits[i] = sampler.complete(cfg.nesting_n, 0.0, rng::trial_key(cfg.rng_seed, i));
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(n, 1024))));
  if (workers == 1) {
    run(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t b = std::min<std::uint64_t>(n, w * chunk);
      const std::uint64_t e = std::min<std::uint64_t>(n, b + chunk);
      pool.emplace_back(run, b, e);
    }
  }

  double total = 0.0;
  for (double w : waits) total += w;
  const double mean = total / static_cast<double>(n);

  McEstimate est;
  est.trials = n;
  est.mean_wait_slots = mean;
  est.pairs_per_flyby = cfg.slots_per_flyby / mean;
  if (n > 1) {
    const double nn = static_cast<double>(n);
    double jk_mean = 0.0;
    for (double w : waits) jk_mean += cfg.slots_per_flyby / ((total - w) / (nn - 1.0));
    jk_mean /= nn;
    double ss = 0.0;
    for (double w : waits) {
      const double d = cfg.slots_per_flyby / ((total - w) / (nn - 1.0)) - jk_mean;
      ss += d * d;
    }
    est.std_error = std::sqrt((nn - 1.0) / nn * ss);
  } else {
    est.std_error = std::numeric_limits<double>::infinity();
  }
  return est;
}

} // namespace satrep::montecarlo
