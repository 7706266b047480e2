#pragma once

#include <functional>
#include <span>
#include <string>

#include "patterndyn/training.hpp"

namespace patterndyn {

/// One polyline per filter (id "filter-<i>") of metric(record, i) against the
/// step, with a log-scaled step axis.
std::string curves_svg(std::span<const TrajectoryRecord> records, const std::string& title,
                       const std::function<double(const FilterSnapshot&)>& metric);

inline std::string norms_svg(std::span<const TrajectoryRecord> records) {
  return curves_svg(records, "filter norm vs step", [](const FilterSnapshot& f) { return f.norm; });
}
inline std::string sin_theta_svg(std::span<const TrajectoryRecord> records) {
  return curves_svg(records, "sin theta vs step", [](const FilterSnapshot& f) { return f.sin_theta; });
}

}  // namespace patterndyn
