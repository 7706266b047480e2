#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patterndyn/distributions.hpp"
#include "patterndyn/model.hpp"
#include "patterndyn/training.hpp"

namespace patterndyn {

/// value ~ exp(intercept) * t^exponent, fitted by least squares in log-log.
struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::array<double, 2> fit_window{};
  std::size_t n_points = 0;
};

inline constexpr std::size_t kMinFitPoints = 8;
inline constexpr double kMinFitDecades = 1.5;

/// Fits the points of (t, value) with t inside `window`. Needs at least 8 such
/// points, a window of at least 1.5 decades and positive values (fit-domain
/// otherwise). r_squared is 1 for a constant series.
RateFit fit_power_law(std::span<const double> t, std::span<const double> value, std::array<double, 2> window);

/// [t_max / 10^decades, t_max].
std::array<double, 2> trailing_window(double t_max, double decades);

/// sin theta of filter i over the records, skipping step 0.
struct Series {
  std::vector<double> t;
  std::vector<double> value;
};
Series sin_theta_series(std::span<const TrajectoryRecord> records, std::size_t filter);

struct Accuracy {
  double accuracy = 0.0;
  double tie_fraction = 0.0;
  std::size_t n = 0;
};

/// Accuracy on n fresh samples of spec's law. Ties (F = 0) count as errors.
Accuracy mc_accuracy(const FilterBank& bank, const DistSpec& spec, std::size_t n, Rng& rng);
/// Accuracy on a fixed set.
Accuracy dataset_accuracy(const FilterBank& bank, const Dataset& data);

struct MuEstimate {
  double mu_pos = 0.0;
  double mu_neg = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_directions = 0;
};

/// Probe directions uniform on the unit sphere of span{p}^perp.
std::vector<Vector> orthocomplement_probes(const DistSpec& spec, std::size_t n_directions, Rng& rng);

/// Minimum over probe directions of the empirical P{y = +-1, f(x; w_perp) = 0}.
/// A response counts as zero when it is at most 1e-12.
MuEstimate estimate_mu(const Dataset& data, std::size_t n_directions, Rng& rng);

struct A2Check {
  double max_abs_mean = 0.0;
  bool pass = false;
  std::size_t n_directions = 0;
};

/// Max over probe directions of |mean over S of y f(x; w_perp)|, against epsilon.
A2Check check_A2(const Dataset& data, std::size_t n_directions, double epsilon, Rng& rng);

struct NormDomination {
  double top_norm_ratio = 1.0;
  bool aligned_are_dominant = false;
};

/// Largest norm over the median norm, and whether every filter in the top
/// quarter by norm has sin theta strictly below the bank's median sin theta.
NormDomination norm_domination(const TrajectoryRecord& record);

double median(std::vector<double> values);

/// Wilson score interval at 95%.
std::array<double, 2> wilson_interval(std::size_t successes, std::size_t n);

struct TheoremReport {
  std::string theorem_id;
  bool pass = false;
  std::map<std::string, double> statistics;
  std::vector<std::string> notes;
  std::string config_digest;
  std::vector<std::uint64_t> seed_list;

  std::string to_json() const;
};

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Seed of sweep member i under a master seed.
std::uint64_t member_seed(std::uint64_t master, std::size_t i);

/// Worker count for sweeps: hardware concurrency capped by PATTERNDYN_THREADS.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on worker_count() threads. Results are stored by
/// index, so they do not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

struct AccuracyOne {
  std::size_t n_test = 1000;
};
struct SinThetaBelow {
  double bound = 0.1;
};
using SuccessCriterion = std::variant<AccuracyOne, SinThetaBelow>;

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool success = false;
  double accuracy = 0.0;
  double tie_fraction = 0.0;
  double max_sin_theta = 0.0;
  TrajectoryRecord final_record;
};

struct SweepResult {
  TheoremReport report;
  std::vector<SeedOutcome> seeds;
};

/// Trains config under n_seeds member seeds of config.seed. A seed succeeds
/// when its final bank classifies n_test fresh samples without error, or when
/// every filter's final sin theta is below the bound. `rebuild` maps a member
/// seed to that member's sampler (fresh patterns, dataset); when empty the
/// config's sampler is reused. The report passes when the success fraction
/// reaches required_fraction.
SweepResult success_probability_sweep(const TrainConfig& config, std::size_t n_seeds,
                                      const SuccessCriterion& criterion, double required_fraction = 0.9,
                                      const std::function<Sampler(std::uint64_t)>& rebuild = {});

}  // namespace patterndyn
