#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace patterndyn {

enum class ErrorCode {
  invalid_dimension,
  invalid_argument,
  no_orthocomplement,
  degenerate_basis,
  undefined_angle,
  shape_mismatch,
  precondition_violated,
  invalid_config,
  invalid_batch,
  fit_domain,
  empty_dataset,
  regime_mismatch,
  tie,
  io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace patterndyn
