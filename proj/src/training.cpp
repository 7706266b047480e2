#include "patterndyn/training.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace patterndyn {

std::vector<std::size_t> LogSchedule::steps(std::size_t total, std::span<const std::size_t> extra) const {
  std::vector<std::size_t> out{0};
  if (kind == Kind::linear) {
    require(stride >= 1, ErrorCode::invalid_config, "log stride must be positive");
    for (std::size_t t = stride; t <= total; t += stride) out.push_back(t);
  } else {
    require(ratio > 1.0, ErrorCode::invalid_config, "geometric log ratio must exceed 1");
    for (double t = 1.0; t <= static_cast<double>(total); t *= ratio)
      out.push_back(static_cast<std::size_t>(std::llround(t)));
  }
  out.push_back(total);
  for (std::size_t t : extra)
    if (t <= total) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  while (!out.empty() && out.back() > total) out.pop_back();
  return out;
}

const DistSpec& sampler_spec(const Sampler& sampler) {
  return std::visit(
      [](const auto& s) -> const DistSpec& {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DatasetSampler>) {
          require(s.dataset != nullptr, ErrorCode::invalid_config, "dataset sampler without a dataset");
          return s.dataset->spec;
        } else {
          return s.spec;
        }
      },
      sampler);
}

void TrainConfig::validate() const {
  require(eta > 0.0 && std::isfinite(eta), ErrorCode::invalid_config, "training.eta must be positive");
  require(steps >= 1, ErrorCode::invalid_config, "training.steps must be at least 1");
  require(h >= 1, ErrorCode::invalid_config, "training.h must be at least 1");
  if (log_schedule.kind == LogSchedule::Kind::geometric)
    require(log_schedule.ratio > 1.0, ErrorCode::invalid_config, "training.log_schedule.ratio must exceed 1");
  else
    require(log_schedule.stride >= 1, ErrorCode::invalid_config, "training.log_schedule.stride must be positive");
  if (balanced)
    require(h % 2 == 0, ErrorCode::invalid_config, "training.balanced needs an even filter count h");

  const DistSpec& spec = sampler_spec(sampler);
  if (std::holds_alternative<DatasetSampler>(sampler)) {
    require(!std::get<DatasetSampler>(sampler).dataset->samples.empty(), ErrorCode::empty_dataset,
            "training set is empty");
  }
  if (std::holds_alternative<AlternatingSampler>(sampler))
    require(spec.kind == DistKind::clean, ErrorCode::invalid_config,
            "training.sampler alternating needs a clean distribution");
  if (mode == Mode::joint) {
    require(std::holds_alternative<IidSampler>(sampler), ErrorCode::invalid_config,
            "training.mode joint draws balanced i.i.d. batches");
    require(!balanced, ErrorCode::invalid_config, "training.balanced applies to fixed_output mode");
  }
  require((regime == Regime::multi) == (spec.kind == DistKind::multi_clean), ErrorCode::invalid_config,
          "analysis.regime multi goes with the multi_clean distribution");
  check_regime(spec.patterns, regime);
}

FilterBank init_filters(Index h, Index d, Rng& rng, bool balanced) {
  require(h >= 1 && d >= 1, ErrorCode::invalid_config, "need h >= 1 and d >= 1");
  require(!balanced || h % 2 == 0, ErrorCode::invalid_config, "balanced output weights need an even h");
  Matrix filters(h, d);
  for (Index i = 0; i < h; ++i) {
    Rng filter_rng = rng.substream(static_cast<std::uint64_t>(i));
    filters.row(i) = sample_unit_sphere(d, filter_rng).coords().transpose();
  }
  Rng weight_rng = rng.substream(static_cast<std::uint64_t>(h));
  Vector weights(h);
  if (balanced) {
    for (Index i = 0; i < h; ++i) weights[i] = i < h / 2 ? 1.0 : -1.0;
    for (Index i = h - 1; i > 0; --i)
      std::swap(weights[i], weights[static_cast<Index>(weight_rng.below(static_cast<std::uint64_t>(i + 1)))]);
  } else {
    for (Index i = 0; i < h; ++i) weights[i] = weight_rng.sign();
  }
  return FilterBank::make(std::move(filters), std::move(weights), Mode::fixed_output);
}

FilterBank init_filters_joint(Index h, Index d, double eta, Rng& rng) {
  require(h >= 1 && d >= 1, ErrorCode::invalid_config, "need h >= 1 and d >= 1");
  require(eta > 0.0, ErrorCode::invalid_config, "eta must be positive");
  if (eta >= 1.0) std::cerr << "warning: joint initialization with eta >= 1 leaves the small-init regime\n";
  Matrix filters(h, d);
  for (Index i = 0; i < h; ++i) {
    Rng filter_rng = rng.substream(static_cast<std::uint64_t>(i));
    const UnitVector dir = sample_unit_sphere(d, filter_rng);
    double r = 0.0;
    while (r == 0.0) r = eta * filter_rng.uniform();
    filters.row(i) = r * dir.coords().transpose();
  }
  Rng weight_rng = rng.substream(static_cast<std::uint64_t>(h));
  Vector weights(h);
  for (Index i = 0; i < h; ++i) weights[i] = weight_rng.sign();
  return FilterBank::make(std::move(filters), std::move(weights), Mode::joint);
}

namespace {

void require_input(const FilterBank& bank, const LabeledSample& s) {
  require(s.x.size() >= bank.d() && s.x.size() % bank.d() == 0, ErrorCode::shape_mismatch,
          "sample length must be a multiple of the filter width");
}

}  // namespace

std::vector<FilterEvent> sgd_step_fixed(FilterBank& bank, const LabeledSample& sample, double eta) {
  require(bank.mode == Mode::fixed_output, ErrorCode::invalid_config, "sgd_step_fixed on a joint bank");
  require_input(bank, sample);
  const auto view = slots(sample.x, bank.d());
  const Matrix values = bank.filters * view;
  const double y = sample.y;

  std::vector<FilterEvent> events(static_cast<std::size_t>(bank.h()));
  for (Index i = 0; i < bank.h(); ++i) {
    auto& ev = events[static_cast<std::size_t>(i)];
    double best = values(i, 0);
    for (Index u = 1; u < values.cols(); ++u) {
      if (values(i, u) > best) {
        best = values(i, u);
        ev.active_slot = u;
      }
    }
    ev.fired = best > 0.0;
    if (ev.fired) bank.filters.row(i) += (eta * bank.weights[i] * y) * view.col(ev.active_slot).transpose();
  }
  return events;
}

void sgd_step_joint(FilterBank& bank, std::span<const LabeledSample> batch, double eta) {
  require(bank.mode == Mode::joint, ErrorCode::invalid_config, "sgd_step_joint on a fixed_output bank");
  Index balance = 0;
  for (const auto& s : batch) balance += s.y;
  require(!batch.empty() && balance == 0, ErrorCode::invalid_batch,
          "joint batches need as many positive as negative samples");

  Vector grad_a = Vector::Zero(bank.h());
  Matrix grad_w = Matrix::Zero(bank.h(), bank.d());
  for (const auto& s : batch) {
    require_input(bank, s);
    const auto view = slots(s.x, bank.d());
    const auto responses = bank_responses(s.x, bank);
    for (Index i = 0; i < bank.h(); ++i) {
      const Response& r = responses[static_cast<std::size_t>(i)];
      grad_a[i] += s.y * r.value;
      if (r.value > 0.0) grad_w.row(i) += (bank.weights[i] * s.y) * view.col(r.active_slot).transpose();
    }
  }
  bank.weights += eta * grad_a;
  bank.filters += eta * grad_w;
}

TrajectoryRecord snapshot(std::size_t step, const FilterBank& bank, const FilterBank& initial,
                          const PatternBasis& patterns, Regime regime) {
  const PatternBasis basis = decomposition_basis(patterns, regime);
  TrajectoryRecord rec{step, {}};
  rec.filters.reserve(static_cast<std::size_t>(bank.h()));
  for (Index i = 0; i < bank.h(); ++i) {
    const Vector w = bank.filters.row(i).transpose();
    const int sign = bank.weights[i] >= 0.0 ? 1 : -1;
    std::array<double, 2> inner{};
    if (regime == Regime::multi) {
      const Index base = sign == 1 ? 0 : 2;
      const Vector w0 = initial.filters.row(i).transpose();
      inner = {patterns[base].coords().dot(w0), patterns[base + 1].coords().dot(w0)};
    }
    const Target target = target_pattern(patterns, sign, regime,
                                         regime == Regime::multi ? std::span<const double>(inner)
                                                                 : std::span<const double>());
    const Decomposition dec = decompose(w, basis);
    FilterSnapshot snap;
    snap.a = bank.weights[i];
    snap.norm = w.norm();
    snap.alpha = dec.coefficients;
    snap.perp_norm = dec.perp_norm;
    snap.sin_theta = sine_angle(w, target.direction.coords());
    snap.cos_theta = cosine_angle(w, target.direction.coords());
    snap.target_id = target.id;
    rec.filters.push_back(std::move(snap));
  }
  return rec;
}

TrainResult run_training(const TrainConfig& config) {
  config.validate();
  const DistSpec& spec = sampler_spec(config.sampler);
  const Rng master(config.seed);
  Rng init_rng = master.substream(stream::init);
  Rng data_rng = master.substream(stream::data);

  FilterBank bank = config.mode == Mode::joint ? init_filters_joint(config.h, spec.d, config.eta, init_rng)
                                               : init_filters(config.h, spec.d, init_rng, config.balanced);
  TrainResult result{bank, bank, {}};

  const std::array<std::size_t, 1> extra{config.burn_in};
  const auto log_steps = config.log_schedule.steps(config.steps, extra);
  result.records.reserve(log_steps.size());
  auto next_log = log_steps.begin();
  auto log_if_due = [&](std::size_t t) {
    if (next_log != log_steps.end() && *next_log == t) {
      result.records.push_back(snapshot(t, bank, result.initial, spec.patterns, config.regime));
      ++next_log;
    }
  };

  std::optional<AlternatingStream> alternating;
  if (const auto* alt = std::get_if<AlternatingSampler>(&config.sampler)) alternating.emplace(alt->spec);

  log_if_due(0);
  std::array<LabeledSample, 2> batch;
  for (std::size_t t = 1; t <= config.steps; ++t) {
    if (config.mode == Mode::joint) {
      batch[0] = sample_with_label(spec, 1, data_rng);
      batch[1] = sample_with_label(spec, -1, data_rng);
      sgd_step_joint(bank, batch, config.eta);
    } else if (alternating) {
      sgd_step_fixed(bank, alternating->next(data_rng), config.eta);
    } else if (const auto* ds = std::get_if<DatasetSampler>(&config.sampler)) {
      const auto& samples = ds->dataset->samples;
      sgd_step_fixed(bank, samples[data_rng.below(samples.size())], config.eta);
    } else {
      sgd_step_fixed(bank, sample(spec, data_rng), config.eta);
    }
    log_if_due(t);
  }
  result.final_bank = std::move(bank);
  return result;
}

}  // namespace patterndyn
