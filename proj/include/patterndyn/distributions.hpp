#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patterndyn/vecspace.hpp"

namespace patterndyn {

enum class DistKind { clean, noisy, general_noisy, multi_clean };

std::string_view to_string(DistKind kind);
DistKind parse_dist_kind(std::string_view name);

/// Parameters of a planted-pattern data law.
///
/// Pattern order: (p+, p-) for the single-pattern kinds and
/// (p+1, p+2, p-1, p-2) for multi_clean. Inputs have k slots of width d.
struct DistSpec {
  DistKind kind = DistKind::clean;
  Index d = 0;
  Index k = 0;
  double epsilon = 0.0;
  PatternBasis patterns;

  /// Validates the invariants and returns the spec; throws invalid-config.
  static DistSpec make(DistKind kind, Index k, double epsilon, PatternBasis patterns);

  Index input_dim() const noexcept { return k * d; }
  /// Number of key slots per sample (1, or 2 for multi_clean).
  Index key_count() const noexcept { return kind == DistKind::multi_clean ? 2 : 1; }
  /// First key pattern of the class with label y.
  const UnitVector& key_pattern(int y, Index which = 0) const;
};

/// Additive split of a noisy input: x = clean + sum(terms).
/// noisy: terms = {in-span noise x1, orthocomplement noise x2};
/// general_noisy: terms = {isotropic noise x1}.
struct NoiseParts {
  Vector clean;
  std::vector<Vector> terms;
};

struct LabeledSample {
  Vector x;
  int y = 1;
  std::vector<Index> key_slots;
  std::optional<NoiseParts> parts;
};

/// Read-only d x k view of an input; column u is slot u.
inline Eigen::Map<const Matrix> slots(const Vector& x, Index d) {
  return Eigen::Map<const Matrix>(x.data(), d, x.size() / d);
}
inline Eigen::Map<Matrix> slots(Vector& x, Index d) {
  return Eigen::Map<Matrix>(x.data(), d, x.size() / d);
}

LabeledSample sample_clean(const DistSpec& spec, Rng& rng);
LabeledSample sample_noisy(const DistSpec& spec, Rng& rng);
LabeledSample sample_general_noisy(const DistSpec& spec, Rng& rng);
LabeledSample sample_multi(const DistSpec& spec, Rng& rng);

/// Dispatches on spec.kind.
LabeledSample sample(const DistSpec& spec, Rng& rng);
/// The law of spec.kind conditioned on the label.
LabeledSample sample_with_label(const DistSpec& spec, int y, Rng& rng);

/// Clean samples with labels +1, -1, +1, ...
class AlternatingStream {
 public:
  explicit AlternatingStream(DistSpec spec);
  LabeledSample next(Rng& rng);
  const DistSpec& spec() const noexcept { return spec_; }

 private:
  DistSpec spec_;
  int next_label_ = 1;
};

struct Dataset {
  std::vector<LabeledSample> samples;
  DistSpec spec;
  std::uint64_t seed = 0;
};

/// n i.i.d. samples of spec's law; `seed` records rng.key().
Dataset empirical_dataset(const DistSpec& spec, std::size_t n, Rng& rng);

struct SupportCheck {
  bool ok = true;
  std::string reason;
  explicit operator bool() const noexcept { return ok; }
};

/// Re-derives support membership from x, y and key_slots alone (slot norms,
/// orthogonality, noise budgets). Ignores `parts`.
SupportCheck validate_sample(const LabeledSample& s, const DistSpec& spec, double tol = 1e-10);

/// Builds a point of supp(D_eps) that (w, b) fails to classify with positive
/// margin. Requires p+ = -p-, d >= 2 and k >= 2/eps + 1.
LabeledSample separability_counterexample(const Eigen::Ref<const Vector>& w, double b,
                                          const DistSpec& spec);

}  // namespace patterndyn
