#include "patterndyn/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "patterndyn/analysis.hpp"

namespace patterndyn {

using nlohmann::json;

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::gaussian: return "gaussian";
    case PatternKind::opposite: return "opposite";
    case PatternKind::inner_product: return "inner_product";
    case PatternKind::orthogonal: return "orthogonal";
  }
  return "unknown";
}

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::iid: return "iid";
    case SamplerKind::dataset: return "dataset";
    case SamplerKind::alternating: return "alternating";
  }
  return "unknown";
}

namespace {

PatternKind parse_pattern_kind(std::string_view s) {
  for (auto k : {PatternKind::gaussian, PatternKind::opposite, PatternKind::inner_product, PatternKind::orthogonal})
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::invalid_config, "distribution.patterns: unknown value '" + std::string(s) + "'");
}

SamplerKind parse_sampler_kind(std::string_view s) {
  for (auto k : {SamplerKind::iid, SamplerKind::dataset, SamplerKind::alternating})
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::invalid_config, "training.sampler: unknown value '" + std::string(s) + "'");
}

// Reads the members of one JSON object and rejects whatever is left over.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j_.is_object(), ErrorCode::invalid_config, path_ + ": expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      require(v->is_number() && std::isfinite(v->get<double>()), ErrorCode::invalid_config,
              field(key) + ": expected a finite number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      bool ok = v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0);
      if (!ok && v->is_number_float()) {
        const double x = v->get<double>();
        ok = x >= 0.0 && x == std::floor(x) && x < 1.8e19;
      }
      require(ok, ErrorCode::invalid_config, field(key) + ": expected a non-negative integer");
      out = v->is_number_float() ? static_cast<Int>(v->get<double>()) : static_cast<Int>(v->get<std::uint64_t>());
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      require(v->is_boolean(), ErrorCode::invalid_config, field(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  std::optional<std::string> string(const std::string& key) {
    if (const json* v = find(key)) {
      require(v->is_string(), ErrorCode::invalid_config, field(key) + ": expected a string");
      return v->get<std::string>();
    }
    return std::nullopt;
  }

  template <typename Parse, typename T>
  void choice(const std::string& key, Parse parse, T& out) {
    if (auto s = string(key)) {
      try {
        out = parse(*s);
      } catch (const Error& e) {
        throw Error(ErrorCode::invalid_config, field(key) + ": " + e.what());
      }
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      require(seen_.count(key) != 0, ErrorCode::invalid_config, path_ + ": unknown key '" + key + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void validate(const ExperimentConfig& c) {
  const auto& d = c.distribution;
  require(d.d >= 1, ErrorCode::invalid_config, "distribution.d must be positive");
  require(d.k >= 1, ErrorCode::invalid_config, "distribution.k must be positive");
  require(d.epsilon >= 0.0, ErrorCode::invalid_config, "distribution.epsilon must be non-negative");
  require(d.inner_product > -1.0 && d.inner_product < 1.0, ErrorCode::invalid_config,
          "distribution.inner_product must lie in (-1, 1)");
  require(d.n_samples >= 1, ErrorCode::invalid_config, "distribution.n_samples must be positive");
  const auto& t = c.training;
  require(t.eta > 0.0, ErrorCode::invalid_config, "training.eta must be positive");
  require(t.steps >= 1, ErrorCode::invalid_config, "training.steps must be at least 1");
  require(t.h >= 1, ErrorCode::invalid_config, "training.h must be at least 1");
  require(t.dataset_size >= 1, ErrorCode::invalid_config, "training.dataset_size must be positive");
  const auto& a = c.analysis;
  require(a.n_test >= 1, ErrorCode::invalid_config, "analysis.n_test must be positive");
  require(a.n_seeds >= 1, ErrorCode::invalid_config, "analysis.n_seeds must be positive");
  require(a.n_rate_seeds >= 1, ErrorCode::invalid_config, "analysis.n_rate_seeds must be positive");
  require(a.n_trials >= 1, ErrorCode::invalid_config, "analysis.n_trials must be positive");
  require(a.rate_window >= kMinFitDecades, ErrorCode::invalid_config, "analysis.rate_window must be at least 1.5 decades");
  require(a.n_directions >= 1, ErrorCode::invalid_config, "analysis.n_directions must be positive");
  require(a.sigma > 0.0 && a.sigma < 0.5, ErrorCode::invalid_config, "analysis.sigma must lie in (0, 1/2)");
  require(a.a2_epsilon > 0.0, ErrorCode::invalid_config, "analysis.a2_epsilon must be positive");
  require(a.success_fraction >= 0.0 && a.success_fraction <= 1.0, ErrorCode::invalid_config,
          "analysis.success_fraction must lie in [0, 1]");
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json j;
  const auto& d = c.distribution;
  j["distribution"] = {{"kind", to_string(d.kind)},     {"d", d.d},
                       {"k", d.k},                      {"epsilon", d.epsilon},
                       {"patterns", to_string(d.patterns)}, {"inner_product", d.inner_product},
                       {"n_samples", d.n_samples}};
  const auto& t = c.training;
  json schedule;
  if (t.log_schedule.kind == LogSchedule::Kind::linear)
    schedule = {{"kind", "linear"}, {"stride", t.log_schedule.stride}};
  else
    schedule = {{"kind", "geometric"}, {"ratio", t.log_schedule.ratio}};
  j["training"] = {{"eta", t.eta},
                   {"steps", t.steps},
                   {"h", t.h},
                   {"mode", to_string(t.mode)},
                   {"sampler", to_string(t.sampler)},
                   {"dataset_size", t.dataset_size},
                   {"log_schedule", schedule},
                   {"balanced", t.balanced},
                   {"burn_in", t.burn_in},
                   {"seed", t.seed}};
  const auto& a = c.analysis;
  j["analysis"] = {{"regime", a.regime ? std::string(to_string(*a.regime)) : std::string("auto")},
                   {"n_test", a.n_test},
                   {"n_seeds", a.n_seeds},
                   {"n_rate_seeds", a.n_rate_seeds},
                   {"n_trials", a.n_trials},
                   {"rate_window", a.rate_window},
                   {"n_directions", a.n_directions},
                   {"sigma", a.sigma},
                   {"a2_epsilon", a.a2_epsilon},
                   {"success_fraction", a.success_fraction}};
  j["output"] = {{"dir", c.output.dir}, {"emit_svg", c.output.emit_svg}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  Section root(j, "config");
  if (const json* v = root.find("distribution")) {
    Section s(*v, "distribution");
    auto& d = c.distribution;
    s.choice("kind", parse_dist_kind, d.kind);
    s.integer("d", d.d);
    s.integer("k", d.k);
    s.number("epsilon", d.epsilon);
    s.choice("patterns", parse_pattern_kind, d.patterns);
    s.number("inner_product", d.inner_product);
    s.integer("n_samples", d.n_samples);
    s.finish();
  }
  if (const json* v = root.find("training")) {
    Section s(*v, "training");
    auto& t = c.training;
    s.number("eta", t.eta);
    s.integer("steps", t.steps);
    s.integer("h", t.h);
    s.choice("mode", parse_mode, t.mode);
    s.choice("sampler", parse_sampler_kind, t.sampler);
    s.integer("dataset_size", t.dataset_size);
    if (const json* ls = s.find("log_schedule")) {
      Section l(*ls, "training.log_schedule");
      std::string kind = t.log_schedule.kind == LogSchedule::Kind::linear ? "linear" : "geometric";
      if (auto k = l.string("kind")) kind = *k;
      if (kind == "linear") {
        std::size_t stride = 1;
        l.integer("stride", stride);
        l.find("ratio");
        require(stride >= 1, ErrorCode::invalid_config, "training.log_schedule.stride must be positive");
        t.log_schedule = LogSchedule::linear(stride);
      } else if (kind == "geometric") {
        double ratio = 1.25;
        l.number("ratio", ratio);
        l.find("stride");
        require(ratio > 1.0, ErrorCode::invalid_config, "training.log_schedule.ratio must exceed 1");
        t.log_schedule = LogSchedule::geometric(ratio);
      } else {
        throw Error(ErrorCode::invalid_config, "training.log_schedule.kind: expected linear or geometric");
      }
      l.finish();
    }
    s.boolean("balanced", t.balanced);
    s.integer("burn_in", t.burn_in);
    s.integer("seed", t.seed);
    s.finish();
  }
  if (const json* v = root.find("analysis")) {
    Section s(*v, "analysis");
    auto& a = c.analysis;
    if (auto r = s.string("regime")) {
      if (*r == "auto") a.regime.reset();
      else s.choice("regime", parse_regime, a.regime.emplace());
    }
    s.integer("n_test", a.n_test);
    s.integer("n_seeds", a.n_seeds);
    s.integer("n_rate_seeds", a.n_rate_seeds);
    s.integer("n_trials", a.n_trials);
    s.number("rate_window", a.rate_window);
    s.integer("n_directions", a.n_directions);
    s.number("sigma", a.sigma);
    s.number("a2_epsilon", a.a2_epsilon);
    s.number("success_fraction", a.success_fraction);
    s.finish();
  }
  if (const json* v = root.find("output")) {
    Section s(*v, "output");
    if (auto dir = s.string("dir")) c.output.dir = *dir;
    s.boolean("emit_svg", c.output.emit_svg);
    s.finish();
  }
  root.finish();
  validate(c);
  return c;
}

json default_config_json(std::string_view id) {
  ExperimentConfig c;
  auto& d = c.distribution;
  auto& t = c.training;
  auto& a = c.analysis;
  auto small_clean = [&](PatternKind patterns) {
    d.kind = DistKind::clean;
    d.d = 10;
    d.k = 3;
    d.epsilon = 0.0;
    d.patterns = patterns;
    t.eta = 0.01;
    t.steps = 100000;
    t.h = 8;
    t.sampler = SamplerKind::iid;
    a.n_seeds = 20;
  };

  if (id.empty() || id == "fig2" || id == "prop2") {
    // synthetic experiment defaults as declared above
  } else if (id == "prop1") {
    d.kind = DistKind::noisy;
    d.d = 4;
    d.k = 5;
    d.epsilon = 0.5;
    d.patterns = PatternKind::opposite;
    a.n_trials = 1000;
  } else if (id == "thm1_opposite") {
    small_clean(PatternKind::opposite);
    a.regime = Regime::opposite;
    a.n_seeds = 50;
    a.n_rate_seeds = 20;
  } else if (id == "thm1_obtuse") {
    small_clean(PatternKind::inner_product);
    d.inner_product = -0.3;
    t.h = 16;
    a.regime = Regime::obtuse;
  } else if (id == "thm1_sharp") {
    small_clean(PatternKind::inner_product);
    d.inner_product = 0.45;
    t.h = 16;
    t.sampler = SamplerKind::alternating;
    t.burn_in = 10000;
    a.regime = Regime::sharp;
  } else if (id == "thm2") {
    small_clean(PatternKind::opposite);
    d.kind = DistKind::noisy;
    d.epsilon = std::ldexp(1.0, -8);
    t.steps = 200000;
    t.balanced = true;
    a.regime = Regime::opposite;
  } else if (id == "thm3") {
    small_clean(PatternKind::opposite);
    d.n_samples = 100000;
    t.sampler = SamplerKind::dataset;
    t.dataset_size = 10000;
    t.balanced = true;
    a.regime = Regime::opposite;
    a.n_directions = 256;
    a.a2_epsilon = 0.02;
  } else if (id == "thm4") {
    d.kind = DistKind::multi_clean;
    d.d = 12;
    d.k = 4;
    d.epsilon = 0.0;
    d.patterns = PatternKind::orthogonal;
    t.eta = 0.01;
    t.steps = 100000;
    t.h = 16;
    t.sampler = SamplerKind::iid;
    a.regime = Regime::multi;
    a.n_seeds = 20;
  } else if (id == "thm5") {
    small_clean(PatternKind::opposite);
    t.mode = Mode::joint;
    t.steps = 200;
    t.log_schedule = LogSchedule::linear(1);
    a.regime = Regime::opposite;
    a.n_seeds = 100;
  } else {
    throw Error(ErrorCode::invalid_config, "unknown check id '" + std::string(id) + "'");
  }
  return to_json(c);
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path, std::string_view theorem_id) {
  json merged = default_config_json(theorem_id);
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error(ErrorCode::io, "cannot read config file " + path->string());
    json user;
    try {
      user = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::invalid_config, "config file " + path->string() + ": " + e.what());
    }
    require(user.is_object(), ErrorCode::invalid_config, "config: expected a JSON object");
    merged.merge_patch(user);
  }
  return config_from_json(merged);
}

std::string config_digest(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("output");  // where results go is not part of what was run
  return fnv1a_hex(j.dump());
}

namespace {

UnitVector orthogonal_to(const std::vector<Vector>& basis, Index d, Rng& rng) {
  for (;;) {
    Vector g = sample_unit_sphere(d, rng).coords();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) g -= b.dot(g) * b;
    if (g.norm() > 1e-6) return UnitVector::normalized(g);
  }
}

}  // namespace

PatternBasis build_patterns(const ExperimentConfig::Distribution& dist, Rng& rng) {
  const bool multi = dist.kind == DistKind::multi_clean;
  const std::size_t n = multi ? 4 : 2;
  std::vector<UnitVector> p;
  switch (dist.patterns) {
    case PatternKind::gaussian:
      for (std::size_t i = 0; i < n; ++i) p.push_back(sample_unit_sphere(dist.d, rng));
      break;
    case PatternKind::opposite: {
      require(!multi, ErrorCode::invalid_config, "distribution.patterns opposite needs a single-pattern law");
      const UnitVector v = sample_unit_sphere(dist.d, rng);
      p = {v, -v};
      break;
    }
    case PatternKind::inner_product: {
      require(!multi, ErrorCode::invalid_config, "distribution.patterns inner_product needs a single-pattern law");
      require(dist.d >= 2, ErrorCode::invalid_config, "distribution.patterns inner_product needs d >= 2");
      const UnitVector a = sample_unit_sphere(dist.d, rng);
      const UnitVector q = orthogonal_to({a.coords()}, dist.d, rng);
      const double r = dist.inner_product;
      p = {a, UnitVector::normalized(r * a.coords() + std::sqrt(1.0 - r * r) * q.coords())};
      break;
    }
    case PatternKind::orthogonal: {
      require(dist.d >= static_cast<Index>(n), ErrorCode::invalid_config,
              "distribution.patterns orthogonal needs d >= pattern count");
      std::vector<Vector> done;
      for (std::size_t i = 0; i < n; ++i) {
        p.push_back(orthogonal_to(done, dist.d, rng));
        done.push_back(p.back().coords());
      }
      break;
    }
  }
  return PatternBasis(std::move(p));
}

DistSpec build_spec(const ExperimentConfig& config, std::uint64_t seed) {
  Rng rng = Rng(seed).substream(stream::patterns);
  return DistSpec::make(config.distribution.kind, config.distribution.k, config.distribution.epsilon,
                        build_patterns(config.distribution, rng));
}

Regime resolve_regime(const ExperimentConfig& config, const DistSpec& spec) {
  const Regime r = config.analysis.regime ? *config.analysis.regime : infer_regime(spec);
  check_regime(spec.patterns, r);
  return r;
}

Sampler build_sampler(const ExperimentConfig& config, const DistSpec& spec, std::uint64_t seed) {
  switch (config.training.sampler) {
    case SamplerKind::iid: return IidSampler{spec};
    case SamplerKind::alternating: return AlternatingSampler{spec};
    case SamplerKind::dataset: {
      Rng rng = Rng(seed).substream(stream::dataset);
      return DatasetSampler{std::make_shared<const Dataset>(empirical_dataset(spec, config.training.dataset_size, rng))};
    }
  }
  throw Error(ErrorCode::invalid_config, "training.sampler: unknown kind");
}

TrainConfig build_train_config(const ExperimentConfig& config, std::uint64_t seed) {
  const DistSpec spec = build_spec(config, seed);
  const Regime regime = resolve_regime(config, spec);
  TrainConfig tc(build_sampler(config, spec, seed), regime);
  const auto& t = config.training;
  tc.eta = t.eta;
  tc.steps = t.steps;
  tc.h = t.h;
  tc.mode = t.mode;
  tc.balanced = t.balanced;
  tc.log_schedule = t.log_schedule;
  tc.seed = seed;
  tc.burn_in = t.burn_in;
  tc.validate();
  return tc;
}

}  // namespace patterndyn
