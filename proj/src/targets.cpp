#include "patterndyn/targets.hpp"

#include <algorithm>

#include <cmath>

namespace patterndyn {

namespace {
constexpr double kOppositeTolerance = 1e-12;

double rho(const PatternBasis& patterns) { return patterns.gram()(0, 1); }

bool is_opposite(const PatternBasis& patterns) {
  return patterns.size() == 2 && (patterns[0].coords() + patterns[1].coords()).norm() <= kOppositeTolerance;
}

int checked_sign(int a_sign) {
  require(a_sign == 1 || a_sign == -1, ErrorCode::invalid_argument, "output sign must be +-1");
  return a_sign;
}
}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::opposite: return "opposite";
    case Regime::obtuse: return "obtuse";
    case Regime::sharp: return "sharp";
    case Regime::multi: return "multi";
  }
  return "unknown";
}

Regime parse_regime(std::string_view name) {
  if (name == "opposite") return Regime::opposite;
  if (name == "obtuse") return Regime::obtuse;
  if (name == "sharp") return Regime::sharp;
  if (name == "multi") return Regime::multi;
  throw Error(ErrorCode::invalid_config, "unknown regime '" + std::string(name) + "'");
}

Regime infer_regime(const DistSpec& spec) {
  if (spec.kind == DistKind::multi_clean) return Regime::multi;
  if (is_opposite(spec.patterns)) return Regime::opposite;
  return rho(spec.patterns) > 0.0 ? Regime::sharp : Regime::obtuse;
}

void check_regime(const PatternBasis& patterns, Regime regime) {
  if (regime == Regime::multi) {
    require(patterns.size() == 4, ErrorCode::regime_mismatch, "multi regime needs four patterns");
    return;
  }
  require(patterns.size() == 2, ErrorCode::regime_mismatch, "regime needs exactly (p+, p-)");
  switch (regime) {
    case Regime::opposite:
      require(is_opposite(patterns), ErrorCode::regime_mismatch, "opposite regime needs p+ = -p-");
      break;
    case Regime::obtuse:
      require(rho(patterns) <= 0.0 && !is_opposite(patterns), ErrorCode::regime_mismatch,
              "obtuse regime needs <p+,p-> <= 0 and p+ != -p-");
      break;
    case Regime::sharp:
      require(rho(patterns) > 0.0, ErrorCode::regime_mismatch, "sharp regime needs <p+,p-> > 0");
      break;
    case Regime::multi: break;
  }
}

Target target_pattern(const PatternBasis& patterns, int a_sign, Regime regime,
                      std::span<const double> init_inner_products) {
  checked_sign(a_sign);
  check_regime(patterns, regime);
  const bool pos = a_sign == 1;
  switch (regime) {
    case Regime::opposite:
      return pos ? Target{patterns[0], "p"} : Target{-patterns[0], "-p"};
    case Regime::obtuse:
      return pos ? Target{patterns[0], "p+"} : Target{patterns[1], "p-"};
    case Regime::sharp: {
      const double r = rho(patterns);
      const Vector& own = patterns[pos ? 0 : 1].coords();
      const Vector& other = patterns[pos ? 1 : 0].coords();
      return Target{UnitVector::normalized(own - r * other), pos ? "p+*" : "p-*"};
    }
    case Regime::multi: {
      require(init_inner_products.size() == 2, ErrorCode::invalid_argument,
              "multi regime needs the two initial inner products");
      const double first = init_inner_products[0];
      const double second = init_inner_products[1];
      require(first != second, ErrorCode::tie, "tied initial inner products");
      const bool pick_first = first > second;
      const Index base = pos ? 0 : 2;
      return Target{patterns[base + (pick_first ? 0 : 1)],
                    std::string(pos ? "p+" : "p-") + (pick_first ? "1" : "2")};
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown regime");
}

RegimeTarget regime_targets(const PatternBasis& patterns, Regime regime) {
  require(regime != Regime::multi, ErrorCode::regime_mismatch,
          "multi-regime targets depend on each filter's initialization");
  return RegimeTarget{regime, target_pattern(patterns, 1, regime), target_pattern(patterns, -1, regime)};
}

PatternBasis decomposition_basis(const PatternBasis& patterns, Regime regime) {
  if (regime == Regime::opposite) return PatternBasis({patterns[0]});
  return patterns;
}

bool in_convergence_cone(const PatternBasis& patterns, int a_sign, Regime regime,
                         const Eigen::Ref<const Vector>& w) {
  checked_sign(a_sign);
  check_regime(patterns, regime);
  const bool pos = a_sign == 1;
  switch (regime) {
    case Regime::opposite: return true;
    case Regime::obtuse: {
      const Vector& own = patterns[pos ? 0 : 1].coords();
      const Vector& other = patterns[pos ? 1 : 0].coords();
      return own.dot(w) > 0.0 && other.dot(w) <= 0.0;
    }
    case Regime::sharp: {
      const Vector& own = patterns[pos ? 0 : 1].coords();
      const Vector& other = patterns[pos ? 1 : 0].coords();
      const Vector toward_other = other - rho(patterns) * own;
      return own.dot(w) > 0.0 && toward_other.dot(w) <= 0.0;
    }
    case Regime::multi: {
      const Index base = pos ? 0 : 2;
      return std::max(patterns[base].coords().dot(w), patterns[base + 1].coords().dot(w)) > 0.0;
    }
  }
  return false;
}

}  // namespace patterndyn
