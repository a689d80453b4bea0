#include "qkdfinite/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "qkdfinite/entropy.hpp"
#include "qkdfinite/random.hpp"

namespace qkdfinite {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Axis {
  double lo;
  double hi;
  double span() const { return hi - lo; }
};

struct Candidate {
  std::vector<double> x;
  double value = kNegInf;
  RateBreakdown breakdown;
  PointParams params;
};

// Higher r_raw wins; exact ties go to the lexicographically smaller point.
bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.x < b.x;
}

// Maps search coordinates to rate parameters and evaluates them.
class Objective {
 public:
  Objective(const Scenario& scenario, std::uint64_t n_signals)
      : n_signals_(n_signals),
        free_pz_(!scenario.fixed_p_z),
        definetti_(scenario.bound == BoundMode::kDeFinetti),
        fixed_pz_(scenario.fixed_p_z.value_or(0.5)) {
    inputs_.bound = scenario.bound;
    inputs_.input = observation_at(scenario, n_signals);
    inputs_.eps_security = scenario.eps_security;
    inputs_.eps_ec = scenario.eps_ec;
    inputs_.signal_dim = scenario.signal_dim;

    if (free_pz_) axes_.push_back({kLog10OneMinusPzMin, std::log10(1.0 - kPzMin)});
    axes_.push_back({-kLog10WeightRatioSpan, kLog10WeightRatioSpan});  // w_PA
    axes_.push_back({-kLog10WeightRatioSpan, kLog10WeightRatioSpan});  // w_bar
    if (definetti_) {
      axes_.push_back({-kLog10WeightRatioSpan, kLog10WeightRatioSpan});  // w_deF
      axes_.push_back({kLog10SplitFractionMin, std::log10(kSplitFractionMax)});
      axes_.push_back({kLog10SplitFractionMin, std::log10(kSplitFractionMax)});
    }
  }

  const std::vector<Axis>& axes() const { return axes_; }
  const ProtocolInput& input() const { return inputs_.input; }
  std::uint64_t evaluations() const { return evaluations_; }

  PointParams decode(const std::vector<double>& x) const {
    std::size_t i = 0;
    PointParams p;
    p.p_z = free_pz_ ? 1.0 - std::pow(10.0, x[i++]) : fixed_pz_;
    const double pa = std::pow(10.0, x[i++]);
    const double bar = std::pow(10.0, x[i++]);
    const double def = definetti_ ? std::pow(10.0, x[i++]) : 0.0;
    const double total = pa + bar + 1.0 + def;
    p.weights.pa = pa / total;
    p.weights.bar = bar / total;
    p.weights.pe = 1.0 / total;
    if (definetti_) {
      p.weights.def = def / total;
      const double n_sifted = static_cast<double>(
          SiftingPlan(n_signals_, p.p_z).sifted_count(inputs_.input.protocol));
      const auto count = [&](double log_fraction) {
        const double v = std::round(std::pow(10.0, log_fraction) * n_sifted);
        return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(v));
      };
      p.split = DeFinettiSplit{count(x[i]), count(x[i + 1])};
    }
    return p;
  }

  Candidate evaluate(std::vector<double> x) {
    ++evaluations_;
    Candidate c;
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = std::clamp(x[j], axes_[j].lo, axes_[j].hi);
    }
    c.x = std::move(x);
    try {
      c.params = decode(c.x);
      c.breakdown = evaluate_bound(inputs_, n_signals_, c.params);
      if (std::isfinite(c.breakdown.r_raw)) c.value = c.breakdown.r_raw;
    } catch (const Error&) {
      c.value = kNegInf;
    }
    return c;
  }

 private:
  std::uint64_t n_signals_;
  bool free_pz_;
  bool definetti_;
  double fixed_pz_;
  BoundInputs inputs_;
  std::vector<Axis> axes_;
  std::uint64_t evaluations_ = 0;
};

// Compass search on the full 3^D stencil, halving the step whenever no
// neighbour improves.
Candidate refine(Objective& objective, Candidate start,
                 std::vector<double> step, const SearchConfig& cfg) {
  const auto& axes = objective.axes();
  const std::size_t dims = axes.size();
  std::size_t stencil = 1;
  for (std::size_t j = 0; j < dims; ++j) stencil *= 3;

  Candidate best = std::move(start);
  for (int round = 0; round < cfg.refinement_rounds; ++round) {
    double relative = 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      relative = std::max(relative, step[j] / axes[j].span());
    }
    if (relative < cfg.tolerance) break;

    Candidate round_best = best;
    for (std::size_t code = 0; code < stencil; ++code) {
      std::vector<double> x = best.x;
      std::size_t rest = code;
      bool centre = true;
      for (std::size_t j = 0; j < dims; ++j) {
        const int offset = static_cast<int>(rest % 3) - 1;
        rest /= 3;
        if (offset != 0) centre = false;
        x[j] += offset * step[j];
      }
      if (centre) continue;
      Candidate c = objective.evaluate(std::move(x));
      if (better(c, round_best)) round_best = std::move(c);
    }
    if (round_best.value > best.value) {
      best = std::move(round_best);
    } else {
      for (double& s : step) s *= 0.5;
    }
  }
  return best;
}

OptResult finish(const Objective& objective, const Candidate& best,
                 std::uint64_t n_signals) {
  OptResult out;
  out.n_signals = n_signals;
  out.evaluations = objective.evaluations();
  out.q_observed = objective.input().qber;
  if (objective.input().protocol == Protocol::kRfi) {
    out.c_observed = objective.input().correlators.c();
  }
  out.feasible = std::isfinite(best.value);
  if (out.feasible) {
    out.breakdown = best.breakdown;
    out.params = best.params;
  }
  out.r_star = out.breakdown.r;
  return out;
}

unsigned resolve_workers(unsigned workers, std::size_t jobs) {
  unsigned pool =
      workers == 0 ? std::max(1U, std::thread::hardware_concurrency()) : workers;
  return static_cast<unsigned>(std::min<std::size_t>(pool, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, count) on a small pool; job writes its own slot.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& job) {
  const unsigned pool = resolve_workers(workers, count);
  if (pool <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> threads;
  for (unsigned w = 0; w < pool; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
}

}  // namespace

void SearchConfig::validate() const {
  if (grid_points_per_dim < 3) {
    throw Error(ErrorKind::kDomain, "grid_points_per_dim must be >= 3");
  }
  if (refinement_rounds < 1) {
    throw Error(ErrorKind::kDomain, "refinement_rounds must be >= 1");
  }
  if (multistart_count < 1) {
    throw Error(ErrorKind::kDomain, "multistart_count must be >= 1");
  }
  if (!(tolerance > 0.0)) {
    throw Error(ErrorKind::kDomain, "tolerance must be > 0");
  }
}

void Scenario::validate() const {
  if (signal_dim < 2) throw Error(ErrorKind::kDomain, "signal dimension must be >= 2");
  if (protocol == Protocol::kRfi) {
    if (!(qber >= 0.0 && qber <= kEveInfoMaxQber)) {
      throw Error(ErrorKind::kDomain, "RFI QBER must lie in [0, 0.159]");
    }
    if (!(c0 >= 0.0 && c0 <= 2.0)) {
      throw Error(ErrorKind::kDomain, "C0 must lie in [0, 2]");
    }
  } else if (!(qber >= 0.0 && qber < 0.5)) {
    throw Error(ErrorKind::kDomain, "BB84 QBER must lie in [0, 0.5)");
  }
  if (fixed_p_z && !(*fixed_p_z > 0.0 && *fixed_p_z < 1.0)) {
    throw Error(ErrorKind::kDomain, "p_Z must lie in (0, 1)");
  }
}

ProtocolInput observation_at(const Scenario& scenario, std::uint64_t n_signals) {
  ProtocolInput input;
  input.protocol = scenario.protocol;
  input.qber = scenario.qber;
  if (scenario.protocol == Protocol::kRfi) {
    const Phasor phasor = mean_phasor(scenario.drift, n_signals);
    input.correlators =
        canonical_correlators(scenario.c0, phasor.c_bar, phasor.s_bar);
  }
  return input;
}

OptResult optimize_rate(const Scenario& scenario, std::uint64_t n_signals,
                        const SearchConfig& cfg) {
  cfg.validate();
  scenario.validate();
  if (n_signals == 0) throw Error(ErrorKind::kDomain, "N must be >= 1");

  Objective objective(scenario, n_signals);
  const auto& axes = objective.axes();
  const std::size_t dims = axes.size();
  const int g = cfg.grid_points_per_dim;

  // Half-open grid lo + i span / g, i < g: doubling g keeps every old point.
  std::vector<double> coarse_step(dims);
  for (std::size_t j = 0; j < dims; ++j) coarse_step[j] = axes[j].span() / g;

  // Coarse grid, keeping the best few points as refinement starts.
  const std::size_t coarse_keep =
      static_cast<std::size_t>((cfg.multistart_count + 1) / 2);
  std::vector<Candidate> starts;
  std::size_t total = 1;
  for (std::size_t j = 0; j < dims; ++j) total *= static_cast<std::size_t>(g);
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<double> x(dims);
    std::size_t rest = code;
    for (std::size_t j = 0; j < dims; ++j) {
      x[j] = axes[j].lo + coarse_step[j] * static_cast<double>(rest % g);
      rest /= g;
    }
    Candidate c = objective.evaluate(std::move(x));
    if (!std::isfinite(c.value)) continue;
    auto pos = std::find_if(starts.begin(), starts.end(),
                            [&](const Candidate& s) { return better(c, s); });
    if (static_cast<std::size_t>(pos - starts.begin()) < coarse_keep) {
      starts.insert(pos, std::move(c));
      if (starts.size() > coarse_keep) starts.pop_back();
    }
  }

  // Seeded random starts cover basins the coarse grid steps over.
  const int random_starts = cfg.multistart_count / 2;
  for (int r = 0; r < random_starts; ++r) {
    SplitMix64 rng(SplitMix64::derive(cfg.seed, static_cast<std::uint64_t>(r)));
    std::vector<double> x(dims);
    for (std::size_t j = 0; j < dims; ++j) {
      x[j] = axes[j].lo + rng.uniform() * axes[j].span();
    }
    Candidate c = objective.evaluate(std::move(x));
    if (std::isfinite(c.value)) starts.push_back(std::move(c));
  }

  Candidate best;
  for (Candidate& start : starts) {
    Candidate refined = refine(objective, std::move(start), coarse_step, cfg);
    if (better(refined, best)) best = std::move(refined);
  }
  return finish(objective, best, n_signals);
}

std::string row_status(const OptResult& result) {
  if (!result.feasible) return "infeasible";
  return result.breakdown.r_raw > 0.0 ? "ok" : "nonpositive";
}

std::vector<SweepRow> sweep_n(std::span<const std::uint64_t> grid,
                              const Scenario& scenario, const SearchConfig& cfg,
                              unsigned workers) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) {
      throw Error(ErrorKind::kDomain, "N grid must be strictly increasing");
    }
  }
  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.n_signals = grid[i];
    try {
      row.result = optimize_rate(scenario, grid[i], cfg);
      row.status = row_status(*row.result);
    } catch (const Error& e) {
      row.status = std::string(to_string(e.kind()));
    }
  });
  return rows;
}

std::vector<std::uint64_t> log_grid(std::uint64_t lo, std::uint64_t hi,
                                    int points) {
  if (lo == 0 || hi < lo || points < 1) {
    throw Error(ErrorKind::kDomain, "log grid needs 1 <= lo <= hi, points >= 1");
  }
  std::vector<std::uint64_t> out;
  const double a = std::log10(static_cast<double>(lo));
  const double b = std::log10(static_cast<double>(hi));
  for (int i = 0; i < points; ++i) {
    std::uint64_t n;
    if (i == 0) {
      n = lo;
    } else if (i == points - 1) {
      n = hi;
    } else {
      n = static_cast<std::uint64_t>(
          std::llround(std::pow(10.0, a + (b - a) * i / (points - 1))));
    }
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  return out;
}

OptResult optimal_block_size(std::uint64_t n_min, std::uint64_t n_max,
                             const Scenario& scenario, const SearchConfig& cfg,
                             unsigned workers) {
  if (n_min == 0 || n_min >= n_max) {
    throw Error(ErrorKind::kDomain, "block-size bracket needs 1 <= N_min < N_max");
  }
  const auto no_rate = [] {
    return Error(ErrorKind::kNoPositiveRate,
                 "no block size in the bracket yields a positive rate");
  };

  if (scenario.drift.kind() == DriftKind::kFixed) {
    // Without drift the rate only improves with N.
    OptResult out = optimize_rate(scenario, n_max, cfg);
    out.n_star = n_max;
    out.at_boundary = true;
    if (!(out.r_star > 0.0)) throw no_rate();
    return out;
  }

  std::map<std::uint64_t, OptResult> cache;
  std::mutex cache_mutex;
  const auto value_of = [](const OptResult& r) {
    return r.feasible ? r.breakdown.r_raw : kNegInf;
  };
  const auto at = [&](std::uint64_t n) -> const OptResult& {
    {
      std::lock_guard lock(cache_mutex);
      auto it = cache.find(n);
      if (it != cache.end()) return it->second;
    }
    OptResult r = optimize_rate(scenario, n, cfg);
    std::lock_guard lock(cache_mutex);
    return cache.emplace(n, std::move(r)).first->second;
  };
  const double log_min = std::log10(static_cast<double>(n_min));
  const double log_max = std::log10(static_cast<double>(n_max));
  const auto to_n = [&](double log_n) {
    const auto n = static_cast<std::uint64_t>(std::llround(std::pow(10.0, log_n)));
    return std::clamp(n, n_min, n_max);
  };

  // Log scan (independent of unimodality).
  const std::vector<std::uint64_t> scan = log_grid(n_min, n_max, kBlockSizeScanPoints);
  std::vector<OptResult> scan_results(scan.size());
  parallel_for(scan.size(), workers, [&](std::size_t i) {
    scan_results[i] = optimize_rate(scenario, scan[i], cfg);
  });
  for (std::size_t i = 0; i < scan.size(); ++i) cache.emplace(scan[i], scan_results[i]);

  const auto golden = [&](double a, double b) {
    constexpr double kInvPhi = 0.6180339887498949;
    const double resolution = std::log10(1.0 + std::max(cfg.tolerance, 1e-12));
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = value_of(at(to_n(c)));
    double fd = value_of(at(to_n(d)));
    while (b - a > resolution && to_n(b) - to_n(a) > 1) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = value_of(at(to_n(c)));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = value_of(at(to_n(d)));
      }
    }
  };

  golden(log_min, log_max);
  std::size_t scan_best = 0;
  for (std::size_t i = 1; i < scan.size(); ++i) {
    if (value_of(scan_results[i]) > value_of(scan_results[scan_best])) scan_best = i;
  }
  const std::size_t lo_index = scan_best == 0 ? 0 : scan_best - 1;
  const std::size_t hi_index = std::min(scan_best + 1, scan.size() - 1);
  golden(std::log10(static_cast<double>(scan[lo_index])),
         std::log10(static_cast<double>(scan[hi_index])));

  // Best over everything evaluated; ties go to the smaller N (map order).
  const OptResult* best = nullptr;
  for (const auto& [n, r] : cache) {
    if (best == nullptr || value_of(r) > value_of(*best)) best = &r;
  }
  OptResult out = *best;
  if (!(out.r_star > 0.0)) throw no_rate();
  out.n_star = out.n_signals;
  out.at_boundary = out.n_signals == n_min || out.n_signals == n_max;
  return out;
}

}  // namespace qkdfinite
