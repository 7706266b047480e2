#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "patterndyn/distributions.hpp"
#include "patterndyn/model.hpp"
#include "patterndyn/targets.hpp"

namespace patterndyn {

/// Which steps of a run get a TrajectoryRecord. Step 0 and the final step are
/// always included.
struct LogSchedule {
  enum class Kind { linear, geometric };
  Kind kind = Kind::geometric;
  std::size_t stride = 1;
  double ratio = 1.25;

  static LogSchedule linear(std::size_t stride) { return {Kind::linear, stride, 1.25}; }
  static LogSchedule geometric(double ratio) { return {Kind::geometric, 1, ratio}; }

  /// Sorted, duplicate-free step list for a run of `total` steps; `extra`
  /// steps inside [0, total] are merged in.
  std::vector<std::size_t> steps(std::size_t total, std::span<const std::size_t> extra = {}) const;
};

struct IidSampler {
  DistSpec spec;
};
/// Uniform resampling from a fixed training set.
struct DatasetSampler {
  std::shared_ptr<const Dataset> dataset;
};
struct AlternatingSampler {
  DistSpec spec;
};
using Sampler = std::variant<IidSampler, DatasetSampler, AlternatingSampler>;

const DistSpec& sampler_spec(const Sampler& sampler);

struct TrainConfig {
  TrainConfig(Sampler sampler_, Regime regime_) : sampler(std::move(sampler_)), regime(regime_) {}

  Sampler sampler;
  /// Target geometry used for alpha / sin theta in the records.
  Regime regime;
  double eta = 0.01;
  std::size_t steps = 1;
  Index h = 8;
  Mode mode = Mode::fixed_output;
  /// Force |{a_i = 1}| = |{a_i = -1}| (fixed_output only; h must be even).
  bool balanced = false;
  LogSchedule log_schedule = LogSchedule::geometric(1.25);
  std::uint64_t seed = 0;
  /// Burn-in T; the step is always logged so cone tests can read it.
  std::size_t burn_in = 0;

  /// Throws invalid-config naming the first failing field.
  void validate() const;
};

struct FilterSnapshot {
  double a = 0.0;
  double norm = 0.0;
  /// Projection coefficients onto decomposition_basis(patterns, regime).
  Vector alpha;
  double perp_norm = 0.0;
  double sin_theta = 0.0;
  double cos_theta = 0.0;
  std::string target_id;
};

struct TrajectoryRecord {
  std::size_t step = 0;
  std::vector<FilterSnapshot> filters;
};

struct FilterEvent {
  bool fired = false;
  Index active_slot = 0;
};

/// Fixed-output initialization: w_i uniform on the unit sphere, a_i uniform +-1.
/// Filter i draws from rng.substream(i).
FilterBank init_filters(Index h, Index d, Rng& rng, bool balanced = false);

/// Joint-mode initialization: a_i = +-1, ||w_i|| uniform in (0, eta).
FilterBank init_filters_joint(Index h, Index d, double eta, Rng& rng);

/// One batch-size-one SGD step on -yF with a fixed. Returns per-filter events.
std::vector<FilterEvent> sgd_step_fixed(FilterBank& bank, const LabeledSample& sample, double eta);

/// One simultaneous step of the batch-summed loss in both a and W; the batch
/// must hold as many positive as negative samples.
void sgd_step_joint(FilterBank& bank, std::span<const LabeledSample> batch, double eta);

/// Snapshot of a bank against the regime targets. `initial` supplies the
/// initial inner products the multi regime needs.
TrajectoryRecord snapshot(std::size_t step, const FilterBank& bank, const FilterBank& initial,
                          const PatternBasis& patterns, Regime regime);

struct TrainResult {
  FilterBank initial;
  FilterBank final_bank;
  std::vector<TrajectoryRecord> records;
};

/// Runs config.steps updates. Deterministic in config.seed.
TrainResult run_training(const TrainConfig& config);

}  // namespace patterndyn
