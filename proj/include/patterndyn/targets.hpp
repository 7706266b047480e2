#pragma once

#include <span>
#include <string>
#include <string_view>

#include "patterndyn/distributions.hpp"

namespace patterndyn {

/// Geometry of the key patterns, which fixes where each filter should align.
enum class Regime { opposite, obtuse, sharp, multi };

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view name);

/// Classifies a spec's patterns: p+ = -p- is opposite, <p+,p-> <= 0 obtuse,
/// > 0 sharp; multi_clean specs are multi.
Regime infer_regime(const DistSpec& spec);

/// Throws regime-mismatch if the patterns do not have the regime's geometry.
void check_regime(const PatternBasis& patterns, Regime regime);

struct Target {
  UnitVector direction;
  std::string id;
};

/// Alignment target of a filter with output sign `a_sign`.
///
/// opposite: a*p. obtuse: p+ / p-. sharp: normalized p+ - <p+,p->p- and
/// p- - <p+,p->p+. multi: whichever same-sign pattern had the larger initial
/// inner product, given as `init_inner_products` = (<p_s1,w0>, <p_s2,w0>).
Target target_pattern(const PatternBasis& patterns, int a_sign, Regime regime,
                      std::span<const double> init_inner_products = {});

/// Both single-pattern targets of a regime.
struct RegimeTarget {
  Regime regime;
  Target positive;
  Target negative;
};
RegimeTarget regime_targets(const PatternBasis& patterns, Regime regime);

/// Patterns a filter's alpha coefficients are reported against: {p} for the
/// opposite regime, every pattern otherwise.
PatternBasis decomposition_basis(const PatternBasis& patterns, Regime regime);

/// Whether a filter with output sign a_sign and weights w starts inside the
/// region from which the in-span dynamics provably reach its target. Only the
/// span component of w matters.
///
/// opposite: always. obtuse: <own, w> > 0 and <other, w> <= 0. sharp: the
/// quarter-turn that starts at the own pattern and opens away from the other
/// one. multi: max of the two same-sign inner products is positive.
bool in_convergence_cone(const PatternBasis& patterns, int a_sign, Regime regime,
                         const Eigen::Ref<const Vector>& w);

}  // namespace patterndyn
