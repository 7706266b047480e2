#include "patterndyn/distributions.hpp"

#include <cmath>
#include <utility>

namespace patterndyn {

std::string_view to_string(DistKind kind) {
  switch (kind) {
    case DistKind::clean: return "clean";
    case DistKind::noisy: return "noisy";
    case DistKind::general_noisy: return "general_noisy";
    case DistKind::multi_clean: return "multi_clean";
  }
  return "unknown";
}

DistKind parse_dist_kind(std::string_view name) {
  if (name == "clean") return DistKind::clean;
  if (name == "noisy") return DistKind::noisy;
  if (name == "general_noisy") return DistKind::general_noisy;
  if (name == "multi_clean") return DistKind::multi_clean;
  throw Error(ErrorCode::invalid_config, "unknown distribution kind '" + std::string(name) + "'");
}

DistSpec DistSpec::make(DistKind kind, Index k, double epsilon, PatternBasis patterns) {
  require(k >= 1, ErrorCode::invalid_config, "slot count k must be positive");
  require(epsilon >= 0.0 && std::isfinite(epsilon), ErrorCode::invalid_config,
          "epsilon must be finite and non-negative");
  if (kind == DistKind::multi_clean) {
    require(patterns.size() == 4, ErrorCode::invalid_config, "multi_clean needs 4 patterns");
    require(k >= 2, ErrorCode::invalid_config, "multi_clean needs k >= 2");
  } else {
    require(patterns.size() == 2, ErrorCode::invalid_config, "single-pattern laws need (p+, p-)");
  }
  if (kind == DistKind::clean || kind == DistKind::multi_clean)
    require(epsilon == 0.0, ErrorCode::invalid_config, "clean laws carry no noise radius");
  const Index d = patterns.dim();
  return DistSpec{kind, d, k, epsilon, std::move(patterns)};
}

const UnitVector& DistSpec::key_pattern(int y, Index which) const {
  require(y == 1 || y == -1, ErrorCode::invalid_argument, "label must be +1 or -1");
  if (kind == DistKind::multi_clean) return patterns[(y == 1 ? 0 : 2) + which];
  return patterns[y == 1 ? 0 : 1];
}

namespace {

void require_kind(const DistSpec& spec, DistKind kind) {
  require(spec.kind == kind, ErrorCode::invalid_config,
          "sampler expects kind " + std::string(to_string(kind)) + ", got " +
              std::string(to_string(spec.kind)));
}

// Clean law given the label. Draw order: key slot(s), then non-key slots.
LabeledSample clean_given_label(const DistSpec& spec, int y, Rng& rng) {
  LabeledSample s;
  s.y = y;
  s.x.resize(spec.input_dim());
  auto view = slots(s.x, spec.d);
  const auto k = static_cast<std::uint64_t>(spec.k);

  if (spec.kind == DistKind::multi_clean) {
    const auto u1 = static_cast<Index>(rng.below(k));
    auto u2 = static_cast<Index>(rng.below(k - 1));
    if (u2 >= u1) ++u2;
    s.key_slots = {u1, u2};
  } else {
    s.key_slots = {static_cast<Index>(rng.below(k))};
  }
  for (Index u = 0; u < spec.k; ++u) {
    bool filled = false;
    for (std::size_t j = 0; j < s.key_slots.size(); ++j) {
      if (s.key_slots[j] == u) {
        view.col(u) = spec.key_pattern(y, static_cast<Index>(j)).coords();
        filled = true;
      }
    }
    if (!filled) view.col(u) = sample_unit_orthocomplement(spec.patterns, rng).coords();
  }
  return s;
}

bool is_key(const LabeledSample& s, Index u) {
  for (Index k : s.key_slots)
    if (k == u) return true;
  return false;
}

void add_noisy_parts(const DistSpec& spec, LabeledSample& s, Rng& rng) {
  NoiseParts parts{s.x, {Vector::Zero(s.x.size()), Vector::Zero(s.x.size())}};
  auto in_span = slots(parts.terms[0], spec.d);
  auto orth = slots(parts.terms[1], spec.d);
  for (Index u = 0; u < spec.k; ++u) {
    if (is_key(s, u)) continue;
    in_span.col(u) = sample_ball_in_span(spec.patterns, spec.epsilon, rng);
    orth.col(u) = sample_ball_in_orthocomplement(spec.patterns, spec.epsilon, rng);
  }
  s.x = parts.clean + parts.terms[0] + parts.terms[1];
  s.parts = std::move(parts);
}

void add_general_noise(const DistSpec& spec, LabeledSample& s, Rng& rng) {
  NoiseParts parts{s.x, {Vector::Zero(s.x.size())}};
  auto noise = slots(parts.terms[0], spec.d);
  for (Index u = 0; u < spec.k; ++u) noise.col(u) = sample_ball(spec.d, spec.epsilon, rng);
  s.x = parts.clean + parts.terms[0];
  s.parts = std::move(parts);
}

}  // namespace

LabeledSample sample_clean(const DistSpec& spec, Rng& rng) {
  require_kind(spec, DistKind::clean);
  const int y = rng.sign();
  return clean_given_label(spec, y, rng);
}

LabeledSample sample_noisy(const DistSpec& spec, Rng& rng) {
  require_kind(spec, DistKind::noisy);
  const int y = rng.sign();
  LabeledSample s = clean_given_label(spec, y, rng);
  add_noisy_parts(spec, s, rng);
  return s;
}

LabeledSample sample_general_noisy(const DistSpec& spec, Rng& rng) {
  require_kind(spec, DistKind::general_noisy);
  const int y = rng.sign();
  LabeledSample s = clean_given_label(spec, y, rng);
  add_general_noise(spec, s, rng);
  return s;
}

LabeledSample sample_multi(const DistSpec& spec, Rng& rng) {
  require_kind(spec, DistKind::multi_clean);
  const int y = rng.sign();
  return clean_given_label(spec, y, rng);
}

LabeledSample sample(const DistSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case DistKind::clean: return sample_clean(spec, rng);
    case DistKind::noisy: return sample_noisy(spec, rng);
    case DistKind::general_noisy: return sample_general_noisy(spec, rng);
    case DistKind::multi_clean: return sample_multi(spec, rng);
  }
  throw Error(ErrorCode::invalid_config, "unknown distribution kind");
}

LabeledSample sample_with_label(const DistSpec& spec, int y, Rng& rng) {
  require(y == 1 || y == -1, ErrorCode::invalid_argument, "label must be +1 or -1");
  LabeledSample s = clean_given_label(spec, y, rng);
  if (spec.kind == DistKind::noisy) add_noisy_parts(spec, s, rng);
  if (spec.kind == DistKind::general_noisy) add_general_noise(spec, s, rng);
  return s;
}

AlternatingStream::AlternatingStream(DistSpec spec) : spec_(std::move(spec)) {
  require_kind(spec_, DistKind::clean);
}

LabeledSample AlternatingStream::next(Rng& rng) {
  LabeledSample s = clean_given_label(spec_, next_label_, rng);
  next_label_ = -next_label_;
  return s;
}

Dataset empirical_dataset(const DistSpec& spec, std::size_t n, Rng& rng) {
  require(n >= 1, ErrorCode::empty_dataset, "dataset size must be positive");
  Dataset ds{{}, spec, rng.key()};
  ds.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ds.samples.push_back(sample(spec, rng));
  return ds;
}

SupportCheck validate_sample(const LabeledSample& s, const DistSpec& spec, double tol) {
  auto fail = [](std::string why) { return SupportCheck{false, std::move(why)}; };
  if (s.x.size() != spec.input_dim()) return fail("input length differs from k*d");
  if (s.y != 1 && s.y != -1) return fail("label outside {-1,+1}");
  if (static_cast<Index>(s.key_slots.size()) != spec.key_count()) return fail("wrong number of key slots");
  for (std::size_t i = 0; i < s.key_slots.size(); ++i) {
    if (s.key_slots[i] < 0 || s.key_slots[i] >= spec.k) return fail("key slot out of range");
    for (std::size_t j = i + 1; j < s.key_slots.size(); ++j)
      if (s.key_slots[i] == s.key_slots[j]) return fail("key slots not distinct");
  }

  const double eps = spec.epsilon;
  const auto view = slots(s.x, spec.d);
  for (Index u = 0; u < spec.k; ++u) {
    const Vector slot = view.col(u);
    std::optional<Index> key_index;
    for (std::size_t j = 0; j < s.key_slots.size(); ++j)
      if (s.key_slots[j] == u) key_index = static_cast<Index>(j);

    if (key_index) {
      const double dist = (slot - spec.key_pattern(s.y, *key_index).coords()).norm();
      const double budget = spec.kind == DistKind::general_noisy ? eps : 0.0;
      if (dist > budget + tol) return fail("key slot " + std::to_string(u) + " is not its pattern");
      continue;
    }

    const Vector par = spec.patterns.project_onto_span(slot);
    const double par_norm = par.norm();
    const double perp_norm = (slot - par).norm();
    switch (spec.kind) {
      case DistKind::clean:
      case DistKind::multi_clean:
        if (par_norm > tol || std::abs(perp_norm - 1.0) > tol)
          return fail("non-key slot " + std::to_string(u) + " is not a unit vector orthogonal to the patterns");
        break;
      case DistKind::noisy:
        if (par_norm > eps + tol) return fail("in-span noise exceeds epsilon at slot " + std::to_string(u));
        if (std::abs(perp_norm - 1.0) > eps + tol)
          return fail("orthogonal part of slot " + std::to_string(u) + " outside [1-eps, 1+eps]");
        break;
      case DistKind::general_noisy:
        if (std::hypot(par_norm, perp_norm - 1.0) > eps + tol)
          return fail("slot " + std::to_string(u) + " farther than epsilon from the orthogonal unit sphere");
        break;
    }
  }
  return {};
}

namespace {

// Deterministic unit vector orthogonal to the span: the projected standard
// basis vector with the largest residual.
Vector any_unit_orthogonal(const PatternBasis& basis) {
  Vector best;
  double best_norm = -1.0;
  for (Index i = 0; i < basis.dim(); ++i) {
    const Vector r = basis.project_onto_complement(Vector::Unit(basis.dim(), i));
    if (r.norm() > best_norm) {
      best_norm = r.norm();
      best = r;
    }
  }
  return best / best_norm;
}

}  // namespace

LabeledSample separability_counterexample(const Eigen::Ref<const Vector>& w, double b,
                                          const DistSpec& spec) {
  require(spec.kind == DistKind::noisy, ErrorCode::invalid_config,
          "counterexamples live in the epsilon-noisy law");
  const Vector& p = spec.patterns[0].coords();
  require((p + spec.patterns[1].coords()).norm() <= kUnitTolerance, ErrorCode::precondition_violated,
          "counterexample construction needs p+ = -p-");
  require(spec.epsilon > 0.0 && static_cast<double>(spec.k) >= 2.0 / spec.epsilon + 1.0,
          ErrorCode::precondition_violated, "need k >= 2/eps + 1");
  require(spec.d >= 2, ErrorCode::no_orthocomplement, "non-key slots need d >= 2");
  require(w.size() == spec.input_dim(), ErrorCode::shape_mismatch, "w must have length k*d");

  const Index d = spec.d;
  const Index k = spec.k;
  const double eps = spec.epsilon;
  const auto wv = Eigen::Map<const Matrix>(w.data(), d, k);
  const Vector responses = wv.transpose() * p;

  // Orthogonal unit directions that push w.x toward the wrong side for label y.
  auto orth_direction = [&](Index u, int y) -> Vector {
    const Vector r = spec.patterns.project_onto_complement(Vector(wv.col(u)));
    if (r.norm() <= kUnitTolerance) return any_unit_orthogonal(spec.patterns);
    return (-static_cast<double>(y)) * r / r.norm();
  };

  auto build = [&](Index key, int y, bool negative_span_noise) {
    LabeledSample s;
    s.y = y;
    s.key_slots = {key};
    NoiseParts parts{Vector::Zero(spec.input_dim()),
                     {Vector::Zero(spec.input_dim()), Vector::Zero(spec.input_dim())}};
    auto clean = slots(parts.clean, d);
    auto in_span = slots(parts.terms[0], d);
    auto orth = slots(parts.terms[1], d);
    for (Index u = 0; u < k; ++u) {
      if (u == key) {
        clean.col(u) = static_cast<double>(y) * p;
        continue;
      }
      const Vector v = orth_direction(u, y);
      clean.col(u) = v;
      orth.col(u) = eps * v;
      if (negative_span_noise) in_span.col(u) = -eps * p;
    }
    s.x = parts.clean + parts.terms[0] + parts.terms[1];
    s.parts = std::move(parts);
    return s;
  };

  LabeledSample out;
  bool found = false;
  for (Index u = 0; u < k && !found; ++u) {
    if (b <= -responses[u]) {
      out = build(u, 1, false);
      found = true;
    } else if (b >= responses[u]) {
      out = build(u, -1, false);
      found = true;
    }
  }
  if (!found) {
    Index weakest = 0;
    responses.minCoeff(&weakest);
    out = build(weakest, 1, true);
  }

  const SupportCheck check = validate_sample(out, spec);
  require(check.ok, ErrorCode::precondition_violated, "constructed point left the support: " + check.reason);
  const double margin = static_cast<double>(out.y) * (w.dot(out.x) + b);
  require(margin <= 0.0, ErrorCode::precondition_violated, "constructed point is correctly classified");
  return out;
}

}  // namespace patterndyn
