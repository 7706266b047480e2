#include "patterndyn/model.hpp"

#include <algorithm>
#include <string>

namespace patterndyn {

std::string_view to_string(Mode mode) {
  return mode == Mode::joint ? "joint" : "fixed_output";
}

Mode parse_mode(std::string_view name) {
  if (name == "fixed_output") return Mode::fixed_output;
  if (name == "joint") return Mode::joint;
  throw Error(ErrorCode::invalid_config, "unknown training mode '" + std::string(name) + "'");
}

FilterBank FilterBank::make(Matrix filters, Vector weights, Mode mode) {
  require(filters.rows() >= 1 && filters.cols() >= 1, ErrorCode::shape_mismatch,
          "filter bank needs h >= 1 filters of dimension d >= 1");
  require(weights.size() == filters.rows(), ErrorCode::shape_mismatch, "one output weight per filter");
  if (mode == Mode::fixed_output)
    for (Index i = 0; i < weights.size(); ++i)
      require(weights[i] == 1.0 || weights[i] == -1.0, ErrorCode::invalid_argument,
              "fixed_output weights must be +-1");
  return FilterBank{std::move(filters), std::move(weights), mode};
}

namespace {

Response best_slot(const Eigen::Ref<const Vector>& slot_values) {
  Response r;
  double best = slot_values[0];
  for (Index u = 1; u < slot_values.size(); ++u) {
    if (slot_values[u] > best) {
      best = slot_values[u];
      r.active_slot = u;
    }
  }
  r.value = std::max(0.0, best);
  return r;
}

void require_shape(const Eigen::Ref<const Vector>& x, Index d) {
  require(d >= 1 && x.size() % d == 0 && x.size() >= d, ErrorCode::shape_mismatch,
          "input length must be a positive multiple of the filter width");
}

}  // namespace

Response unit_response(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& w) {
  require_shape(x, w.size());
  const Eigen::Map<const Matrix> view(x.data(), w.size(), x.size() / w.size());
  return best_slot(view.transpose() * w);
}

std::vector<Response> bank_responses(const Eigen::Ref<const Vector>& x, const FilterBank& bank) {
  require_shape(x, bank.d());
  const Eigen::Map<const Matrix> view(x.data(), bank.d(), x.size() / bank.d());
  const Matrix values = bank.filters * view;  // h x k
  std::vector<Response> out(static_cast<std::size_t>(bank.h()));
  for (Index i = 0; i < bank.h(); ++i) out[static_cast<std::size_t>(i)] = best_slot(values.row(i).transpose());
  return out;
}

double forward(const Eigen::Ref<const Vector>& x, const FilterBank& bank) {
  const auto responses = bank_responses(x, bank);
  double f = 0.0;
  for (Index i = 0; i < bank.h(); ++i) f += bank.weights[i] * responses[static_cast<std::size_t>(i)].value;
  return f;
}

Classification classify(const Eigen::Ref<const Vector>& x, const FilterBank& bank) {
  const double f = forward(x, bank);
  if (f > 0.0) return {1, false};
  return {-1, f == 0.0};
}

double phi_prop2(double w11, double w12) {
  auto m = [](double a, double b) { return std::max({0.0, a, b}); };
  return 0.25 * (m(w11, w12) + m(w11, -w12) - m(-w11, w12) - m(-w11, -w12));
}

ConvexityGap convexity_gap(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
  ConvexityGap g{u, v};
  const Eigen::Vector2d mid = 0.5 * (u + v);
  g.phi_u = phi_prop2(u[0], u[1]);
  g.phi_v = phi_prop2(v[0], v[1]);
  g.phi_mid = phi_prop2(mid[0], mid[1]);
  g.gap = g.phi_u + g.phi_v - 2.0 * g.phi_mid;
  return g;
}

std::array<ConvexityGap, 2> nonconvexity_witness() {
  return {convexity_gap({4.0, 4.0}, {3.0, -1.0}), convexity_gap({4.0, -3.0}, {-3.0, -3.0})};
}

}  // namespace patterndyn
