#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "patterndyn/distributions.hpp"
#include "patterndyn/model.hpp"
#include "patterndyn/targets.hpp"
#include "patterndyn/training.hpp"

namespace patterndyn {

/// How the key patterns of a run are drawn from its patterns substream.
/// gaussian: independent uniform unit vectors. opposite: (p, -p).
/// inner_product: <p+, p-> = distribution.inner_product. orthogonal: mutually
/// orthogonal.
enum class PatternKind { gaussian, opposite, inner_product, orthogonal };
enum class SamplerKind { iid, dataset, alternating };

std::string_view to_string(PatternKind kind);
std::string_view to_string(SamplerKind kind);

struct ExperimentConfig {
  struct Distribution {
    DistKind kind = DistKind::general_noisy;
    Index d = 10;
    Index k = 10;
    double epsilon = 1e-3;
    PatternKind patterns = PatternKind::gaussian;
    double inner_product = 0.0;
    /// Size of generated datasets (gen, and the probe set of thm3).
    std::size_t n_samples = 1000;
  } distribution;

  struct Training {
    double eta = 1e-2;
    std::size_t steps = 10000;
    Index h = 50;
    Mode mode = Mode::fixed_output;
    SamplerKind sampler = SamplerKind::dataset;
    std::size_t dataset_size = 1000;
    LogSchedule log_schedule = LogSchedule::geometric(1.25);
    bool balanced = false;
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;
  } training;

  struct Analysis {
    /// Unset: inferred from the patterns.
    std::optional<Regime> regime;
    std::size_t n_test = 1000;
    std::size_t n_seeds = 10;
    std::size_t n_rate_seeds = 20;
    std::size_t n_trials = 1000;
    double rate_window = 1.5;
    std::size_t n_directions = 256;
    double sigma = 0.05;
    double a2_epsilon = 0.02;
    double success_fraction = 0.9;
  } analysis;

  struct Output {
    std::string dir = "out";
    bool emit_svg = false;
  } output;
};

/// Defaults for a check id (prop1, ..., thm5, fig2); "" gives the synthetic
/// experiment defaults (D = 100, d = 10, k = 10, eps = 1e-3, h = 50).
nlohmann::json default_config_json(std::string_view theorem_id = "");

/// Strict parse: unknown keys and ill-typed values throw invalid-config naming
/// the field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

/// default_config_json(theorem_id) merge-patched with the file at `path`.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path, std::string_view theorem_id = "");

/// FNV-1a of the canonical JSON dump, output section excluded.
std::string config_digest(const ExperimentConfig& config);

PatternBasis build_patterns(const ExperimentConfig::Distribution& dist, Rng& rng);

/// The run's data law; patterns come from Rng(seed).substream(stream::patterns).
DistSpec build_spec(const ExperimentConfig& config, std::uint64_t seed);

Regime resolve_regime(const ExperimentConfig& config, const DistSpec& spec);

/// Training set (if the sampler needs one) from Rng(seed).substream(stream::dataset).
Sampler build_sampler(const ExperimentConfig& config, const DistSpec& spec, std::uint64_t seed);

/// Full training config for one seed.
TrainConfig build_train_config(const ExperimentConfig& config, std::uint64_t seed);

}  // namespace patterndyn
