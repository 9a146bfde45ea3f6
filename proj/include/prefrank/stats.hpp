// Copyright 2026 The prefrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PREFRANK_STATS_HPP_
#define PREFRANK_STATS_HPP_

// Rank correlation, bootstrap intervals and signed-rank tests used to compare
// personal rankings against the aggregate one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "prefrank/error.hpp"
#include "prefrank/parallel.hpp"
#include "prefrank/ratings.hpp"
#include "prefrank/rng.hpp"

namespace prefrank {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 1-based ranks; tied values share the average of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

inline double mean_of(std::span<const double> v) {
  if (v.empty()) return kNaN;
  // Shifted so that a constant sample returns its value exactly.
  const double shift = v[0];
  double s = 0.0;
  for (double x : v) s += x - shift;
  return shift + s / static_cast<double>(v.size());
}

inline double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return kNaN;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Pearson correlation of average ranks.
inline double spearman_rho(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::kLengthMismatch, "spearman_rho");
  if (a.size() < 3) throw Error(Errc::kTooFewItems, std::to_string(a.size()) + " items");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw Error(Errc::kInvalidArgument, "non-finite score");
    }
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double center = 0.5 * static_cast<double>(a.size() + 1);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - center;
    const double db = rb[i] - center;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw Error(Errc::kZeroVariance, "constant ranking");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Two-sided p-value of a Spearman coefficient. Exact over all n! orderings
// for n <= 8, Student-t approximation with n - 2 degrees of freedom beyond.
inline double spearman_p_value(double rho, std::size_t n) {
  if (n < 3) throw Error(Errc::kTooFewItems, std::to_string(n) + " items");
  if (n <= 8) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const double denom = static_cast<double>(n) * (static_cast<double>(n * n) - 1.0);
    const double target = std::abs(rho) - 1e-12;
    std::uint64_t hits = 0, total = 0;
    do {
      double d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(perm[i]) - static_cast<double>(i);
        d2 += d * d;
      }
      const double r = 1.0 - 6.0 * d2 / denom;
      if (std::abs(r) >= target) ++hits;
      ++total;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
  }
  if (std::abs(rho) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(rho) * std::sqrt(df / (1.0 - rho * rho));
  boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

struct BootstrapSummary {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
  double confidence = 0.95;
};

// Linear-interpolation quantile of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Percentile bootstrap of the mean. Resample b draws from its own stream
// mix_seed(seed, b), so the result does not depend on the worker count.
inline BootstrapSummary bootstrap_mean_ci(std::span<const double> values,
                                          std::size_t resamples, double confidence,
                                          std::uint64_t seed,
                                          unsigned workers = default_workers()) {
  if (values.empty()) throw Error(Errc::kEmptyInput, "bootstrap of an empty sample");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(Errc::kInvalidArgument, "confidence must lie in (0, 1)");
  }
  if (resamples == 0) throw Error(Errc::kInvalidArgument, "resamples must be > 0");
  const std::size_t n = values.size();
  std::vector<double> means(resamples);
  parallel_for(
      resamples,
      [&](std::size_t b) {
        Rng rng(mix_seed(seed, b));
        const double shift = values[0];
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += values[rng.below(n)] - shift;
        means[b] = shift + s / static_cast<double>(n);
      },
      workers);
  std::sort(means.begin(), means.end());
  const double alpha = 1.0 - confidence;
  BootstrapSummary out;
  out.mean = mean_of(values);
  out.ci_low = quantile_sorted(means, 0.5 * alpha);
  out.ci_high = quantile_sorted(means, 1.0 - 0.5 * alpha);
  out.resamples = resamples;
  out.seed = seed;
  out.confidence = confidence;
  return out;
}

enum class WilcoxonMode { kOneSample, kPaired };
enum class WilcoxonMethod { kExact, kNormalApprox };

struct WilcoxonResult {
  double statistic = 0.0;  // sum of ranks of positive differences
  double p_value = 1.0;
  std::size_t n_effective = 0;
  WilcoxonMode mode = WilcoxonMode::kOneSample;
  WilcoxonMethod method = WilcoxonMethod::kExact;
};

enum class WilcoxonForce { kAuto, kExact, kNormalApprox };

namespace detail {

inline WilcoxonResult signed_rank(std::vector<double> diffs, WilcoxonMode mode,
                                  WilcoxonForce force) {
  std::erase_if(diffs, [](double d) { return d == 0.0; });
  if (diffs.empty()) throw Error(Errc::kAllZeroDifferences, "no non-zero differences");
  const std::size_t n = diffs.size();
  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(diffs[i]);
  const auto ranks = average_ranks(mags);
  WilcoxonResult out;
  out.mode = mode;
  out.n_effective = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (diffs[i] > 0.0) out.statistic += ranks[i];
  }
  const bool exact = force == WilcoxonForce::kExact ||
                     (force == WilcoxonForce::kAuto && n <= 12);
  if (exact) {
    if (n > 30) throw Error(Errc::kInvalidArgument, "exact test limited to n <= 30");
    // Null distribution of the doubled statistic over all 2^n sign patterns.
    std::vector<long> twice(n);
    long total_twice = 0;
    for (std::size_t i = 0; i < n; ++i) {
      twice[i] = std::lround(2.0 * ranks[i]);
      total_twice += twice[i];
    }
    std::vector<double> counts(static_cast<std::size_t>(total_twice) + 1, 0.0);
    counts[0] = 1.0;
    long reach = 0;
    for (long r : twice) {
      for (long s = reach; s >= 0; --s) {
        if (counts[static_cast<std::size_t>(s)] != 0.0) {
          counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
        }
      }
      reach += r;
    }
    const long observed = std::lround(2.0 * out.statistic);
    const double all = std::ldexp(1.0, static_cast<int>(n));
    double lower = 0.0, upper = 0.0;
    for (long s = 0; s <= total_twice; ++s) {
      if (s <= observed) lower += counts[static_cast<std::size_t>(s)];
      if (s >= observed) upper += counts[static_cast<std::size_t>(s)];
    }
    out.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / all);
    out.method = WilcoxonMethod::kExact;
    return out;
  }
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double tie_term = 0.0;
  std::vector<double> sorted = mags;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  const double z = std::max(0.0, std::abs(out.statistic - mean) - 0.5) / std::sqrt(var);
  out.p_value = std::min(1.0, std::erfc(z / std::numbers::sqrt2));
  out.method = WilcoxonMethod::kNormalApprox;
  return out;
}

}  // namespace detail

// Signed-rank test of values against a null median mu0. Zero differences are
// dropped; exact enumeration for up to 12 remaining differences, otherwise a
// normal approximation with tie-corrected variance and continuity correction.
inline WilcoxonResult wilcoxon_one_sample(std::span<const double> values, double mu0 = 0.0,
                                          WilcoxonForce force = WilcoxonForce::kAuto) {
  std::vector<double> diffs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) diffs[i] = values[i] - mu0;
  return detail::signed_rank(std::move(diffs), WilcoxonMode::kOneSample, force);
}

inline WilcoxonResult wilcoxon_paired(std::span<const double> first,
                                      std::span<const double> second,
                                      WilcoxonForce force = WilcoxonForce::kAuto) {
  if (first.size() != second.size()) throw Error(Errc::kLengthMismatch, "wilcoxon_paired");
  std::vector<double> diffs(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) diffs[i] = first[i] - second[i];
  return detail::signed_rank(std::move(diffs), WilcoxonMode::kPaired, force);
}

struct TTestResult {
  double statistic = kNaN;
  double p_value = kNaN;
  std::size_t df = 0;
};

// One-sample Student t-test of the mean against mu0, two-sided.
inline TTestResult t_test_one_sample(std::span<const double> values, double mu0 = 0.0) {
  if (values.size() < 2) throw Error(Errc::kTooFewItems, "t-test needs two values");
  TTestResult out;
  out.df = values.size() - 1;
  const double se = sample_sd(values) / std::sqrt(static_cast<double>(values.size()));
  out.statistic = (mean_of(values) - mu0) / se;
  if (!std::isfinite(out.statistic)) {
    out.p_value = se == 0.0 && mean_of(values) == mu0 ? 1.0 : 0.0;
    return out;
  }
  boost::math::students_t dist(static_cast<double>(out.df));
  out.p_value = std::min(
      1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.statistic))));
  return out;
}

struct CorrelationRecord {
  std::string user_id;
  RatingSystem system = RatingSystem::kElo;
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n_models = 0;
};

struct PopulationSummary {
  RatingSystem system = RatingSystem::kElo;
  std::size_t n = 0;
  double mean = kNaN;
  double sd = kNaN;
  double median = kNaN;
  double min = kNaN;
  double max = kNaN;
  double frac_below_0_1 = kNaN;
  double frac_below_0_5 = kNaN;
  double frac_significant = kNaN;
  std::size_t count_below_0_1 = 0;
  std::size_t count_below_0_5 = 0;
  std::size_t count_significant = 0;
};

inline PopulationSummary summarize_population(std::span<const CorrelationRecord> records) {
  if (records.empty()) throw Error(Errc::kEmptyInput, "no correlation records");
  PopulationSummary s;
  s.system = records.front().system;
  std::vector<double> rhos;
  rhos.reserve(records.size());
  for (const auto& r : records) {
    if (r.system != s.system) throw Error(Errc::kMixedSystems, "summarize_population");
    rhos.push_back(r.rho);
    if (r.rho < 0.1) ++s.count_below_0_1;
    if (r.rho < 0.5) ++s.count_below_0_5;
    if (r.p_value < 0.05) ++s.count_significant;
  }
  const double n = static_cast<double>(records.size());
  s.n = records.size();
  s.mean = mean_of(rhos);
  s.sd = sample_sd(rhos);
  s.median = median_of(rhos);
  s.min = *std::min_element(rhos.begin(), rhos.end());
  s.max = *std::max_element(rhos.begin(), rhos.end());
  s.frac_below_0_1 = static_cast<double>(s.count_below_0_1) / n;
  s.frac_below_0_5 = static_cast<double>(s.count_below_0_5) / n;
  s.frac_significant = static_cast<double>(s.count_significant) / n;
  return s;
}

}  // namespace prefrank

#endif  // PREFRANK_STATS_HPP_
