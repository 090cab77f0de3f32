#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pevcond/closedform.hpp"
#include "pevcond/conditioning.hpp"
#include "pevcond/ensembles.hpp"
#include "pevcond/errors.hpp"

namespace pevcond {

struct Estimates {
  std::size_t count = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  double mom = 0.0;
  double mom_spread = 0.0;  // median absolute deviation of the block means
  double trimmed = 0.0;
};

namespace detail {

// Median of a copy; even sizes average the two middle values.
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// Mean, normal-approximation CI, median-of-means over contiguous index blocks,
/// and a symmetric trimmed mean.
inline Estimates estimate(const std::vector<double>& samples, std::size_t mom_blocks, double trim) {
  if (samples.empty()) throw EmptyInput("no samples to estimate from");
  if (mom_blocks == 0 || mom_blocks > samples.size()) throw ConfigError("mom_blocks must be in [1, sample count]");
  if (!(trim >= 0.0 && trim < 0.5)) throw ConfigError("trim must be in [0, 0.5)");

  const std::size_t n = samples.size();
  Estimates e;
  e.count = n;
  double sum = 0.0;
  for (double x : samples) sum += x;
  e.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - e.mean) * (x - e.mean);
    e.stderr_mean = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  }
  e.ci95_lo = e.mean - 1.96 * e.stderr_mean;
  e.ci95_hi = e.mean + 1.96 * e.stderr_mean;

  std::vector<double> block_means(mom_blocks);
  for (std::size_t b = 0; b < mom_blocks; ++b) {
    const std::size_t lo = b * n / mom_blocks, hi = (b + 1) * n / mom_blocks;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += samples[i];
    block_means[b] = s / static_cast<double>(hi - lo);
  }
  e.mom = detail::median(block_means);
  std::vector<double> dev(mom_blocks);
  for (std::size_t b = 0; b < mom_blocks; ++b) dev[b] = std::abs(block_means[b] - e.mom);
  e.mom_spread = detail::median(std::move(dev));

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const auto cut = static_cast<std::size_t>(std::floor(trim * static_cast<double>(n)));
  double ts = 0.0;
  for (std::size_t i = cut; i < n - cut; ++i) ts += sorted[i];
  e.trimmed = ts / static_cast<double>(n - 2 * cut);
  return e;
}

inline std::size_t default_mom_blocks(std::size_t trials) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(trials))));
}

struct ExperimentConfig {
  EnsembleSpec spec;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::size_t mom_blocks = 0;  // 0 selects ceil(sqrt(trials))
  double trim = 0.0;
  std::size_t workers = 1;

  std::size_t effective_mom_blocks() const { return mom_blocks == 0 ? default_mom_blocks(trials) : mom_blocks; }

  void validate() const {
    spec.validate();
    if (trials == 0) throw ConfigError("trials must be positive");
    if (effective_mom_blocks() > trials) throw ConfigError("mom_blocks must not exceed trials");
    if (!(trim >= 0.0 && trim <= 0.05)) throw ConfigError("trim must be in [0, 0.05]");
    if (spec.n * spec.d > tolerances::kMaxDegree) throw ConfigError("n*d exceeds the solver budget of 64");
  }
};

struct McReport {
  ExperimentConfig config;
  std::size_t n_finite = 0;
  std::size_t n_infinite = 0;
  std::size_t n_failed = 0;
  Estimates est;
  std::optional<ClosedFormValue> closed_form;
  std::optional<ClosedFormValue> asymptotic;
  ClosedFormValue bound;
  double elapsed_s = 0.0;
  /// Per-trial mu in trial order; +inf for infinite, NaN for failed trials.
  std::vector<double> samples;

  std::size_t invalid_count() const { return n_infinite + n_failed; }
};

inline std::optional<ClosedFormValue> closed_form_for(const EnsembleSpec& spec) {
  switch (spec.kind) {
    case EnsembleKind::FullGaussian: return expected_mu_full_gaussian(spec.n, spec.d);
    case EnsembleKind::Goe: return expected_mu_goe(spec.n, spec.d);
    case EnsembleKind::Subspace: return std::nullopt;
  }
  return std::nullopt;
}

inline std::optional<ClosedFormValue> asymptotic_for(const EnsembleSpec& spec) {
  switch (spec.kind) {
    case EnsembleKind::FullGaussian: return asymptotic_full_gaussian(spec.n, spec.d);
    case EnsembleKind::Goe: return asymptotic_goe(spec.n, spec.d);
    case EnsembleKind::Subspace: return std::nullopt;
  }
  return std::nullopt;
}

/// mu(A) of one trial; NaN when the solver or conditioning step fails.
inline double trial_mu(const EnsembleSpec& spec, RngKey key) {
  try {
    return total_condition(sample(spec, key)).total_mu;
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

/// Evaluates `fn(t)` for t in [0, count) into a vector, over `workers` threads.
/// Each slot depends only on its index, so the output is schedule independent.
template <typename Fn>
std::vector<double> parallel_map(std::size_t count, std::size_t workers, Fn fn) {
  std::vector<double> out(count);
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t t = 0; t < count; ++t) out[t] = fn(t);
    return out;
  }
  std::atomic<std::size_t> next{0};
  constexpr std::size_t kChunk = 64;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t start = next.fetch_add(kChunk);
        if (start >= count) return;
        const std::size_t stop = std::min(count, start + kChunk);
        for (std::size_t t = start; t < stop; ++t) out[t] = fn(t);
      }
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

inline McReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  McReport rep;
  rep.config = cfg;
  rep.samples = parallel_map(cfg.trials, cfg.workers, [&](std::size_t t) {
    return trial_mu(cfg.spec, RngKey{cfg.seed, static_cast<std::uint64_t>(t)});
  });

  std::vector<double> finite;
  finite.reserve(cfg.trials);
  for (double mu : rep.samples) {
    if (std::isnan(mu)) ++rep.n_failed;
    else if (std::isinf(mu)) ++rep.n_infinite;
    else finite.push_back(mu);
  }
  rep.n_finite = finite.size();
  if (finite.empty()) throw EmptyInput("every trial was invalid");
  rep.est = estimate(finite, std::min(cfg.effective_mom_blocks(), finite.size()), cfg.trim);

  rep.closed_form = closed_form_for(cfg.spec);
  rep.asymptotic = asymptotic_for(cfg.spec);
  rep.bound = upper_bound(cfg.spec.n, cfg.spec.dimension(), cfg.spec.d);
  rep.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

struct SweepGrid {
  std::vector<EnsembleKind> ensembles{EnsembleKind::FullGaussian};
  std::vector<std::size_t> ns{1, 2, 3};
  std::vector<std::size_t> ds{1, 2};
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::size_t mom_blocks = 0;
  double trim = 0.0;
  std::size_t workers = 1;
};

struct SweepRow {
  EnsembleKind ensemble = EnsembleKind::FullGaussian;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double mom = 0.0;
  double trimmed = 0.0;
  std::optional<double> closed_form;
  std::optional<double> asymptotic;
  double bound = 0.0;
  std::size_t invalid_count = 0;
  double elapsed_s = 0.0;
  std::string error;  // non-empty when the cell failed
};

/// One McReport-derived row per (ensemble, n, d) cell; failing cells are
/// recorded and the sweep continues.
inline std::vector<SweepRow> sweep(const SweepGrid& grid) {
  std::vector<SweepRow> rows;
  for (EnsembleKind kind : grid.ensembles)
    for (std::size_t n : grid.ns)
      for (std::size_t d : grid.ds) {
        SweepRow row;
        row.ensemble = kind;
        row.n = n;
        row.d = d;
        row.trials = grid.trials;
        row.seed = grid.seed;
        try {
          if (kind == EnsembleKind::Subspace) throw ConfigError("sweep supports gaussian and goe ensembles");
          ExperimentConfig cfg{{kind, n, d, {}}, grid.trials, grid.seed, grid.mom_blocks, grid.trim, grid.workers};
          const McReport rep = run_experiment(cfg);
          row.mean = rep.est.mean;
          row.stderr_mean = rep.est.stderr_mean;
          row.mom = rep.est.mom;
          row.trimmed = rep.est.trimmed;
          if (rep.closed_form) row.closed_form = rep.closed_form->value;
          if (rep.asymptotic) row.asymptotic = rep.asymptotic->value;
          row.bound = rep.bound.value;
          row.invalid_count = rep.invalid_count();
          row.elapsed_s = rep.elapsed_s;
        } catch (const Error& e) {
          row.error = e.what();
        }
        rows.push_back(std::move(row));
      }
  return rows;
}

}  // namespace pevcond
