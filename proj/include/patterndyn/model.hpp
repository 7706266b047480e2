#pragma once

#include <array>
#include <string_view>

#include "patterndyn/distributions.hpp"
#include "patterndyn/vecspace.hpp"

namespace patterndyn {

enum class Mode { fixed_output, joint };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view name);

/// h filters (rows of `filters`) and their output weights.
struct FilterBank {
  Matrix filters;
  Vector weights;
  Mode mode = Mode::fixed_output;

  /// Validates shapes and, in fixed_output mode, that every weight is exactly +-1.
  static FilterBank make(Matrix filters, Vector weights, Mode mode);

  Index h() const noexcept { return filters.rows(); }
  Index d() const noexcept { return filters.cols(); }
};

/// Output of one conv + ReLU + max-pool unit. `active_slot` is the argmax slot
/// (lowest index on ties) and is reported even when the ReLU clamps to zero.
struct Response {
  double value = 0.0;
  Index active_slot = 0;
};

Response unit_response(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& w);

/// Responses of every filter of the bank to x.
std::vector<Response> bank_responses(const Eigen::Ref<const Vector>& x, const FilterBank& bank);

/// F(x; W, a) = sum_i a_i f(x; w_i).
double forward(const Eigen::Ref<const Vector>& x, const FilterBank& bank);

struct Classification {
  int label = -1;
  bool tie = false;  // forward was exactly zero
};

/// sign(F), with F = 0 mapped to -1 and flagged.
Classification classify(const Eigen::Ref<const Vector>& x, const FilterBank& bank);

/// The hinge variant -y F.
inline double loss(double f_value, int y) { return -static_cast<double>(y) * f_value; }

/// Expected loss of the single filter (w11, w12) with a_1 = -1 on the
/// four-point law D = 4, d = 2, p+ = (1,0), p- = (-1,0).
double phi_prop2(double w11, double w12);

struct ConvexityGap {
  Eigen::Vector2d u;
  Eigen::Vector2d v;
  double phi_u = 0.0;
  double phi_v = 0.0;
  double phi_mid = 0.0;
  /// phi(u) + phi(v) - 2 phi((u+v)/2); negative refutes convexity, positive refutes concavity.
  double gap = 0.0;
};

ConvexityGap convexity_gap(const Eigen::Vector2d& u, const Eigen::Vector2d& v);

/// The two witness pairs ((4,4),(3,-1)) and ((4,-3),(-3,-3)).
std::array<ConvexityGap, 2> nonconvexity_witness();

}  // namespace patterndyn
