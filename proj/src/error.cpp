#include "patterndyn/error.hpp"

namespace patterndyn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::no_orthocomplement: return "no-orthocomplement";
    case ErrorCode::degenerate_basis: return "degenerate-basis";
    case ErrorCode::undefined_angle: return "undefined-angle";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::precondition_violated: return "precondition-violated";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::invalid_batch: return "invalid-batch";
    case ErrorCode::fit_domain: return "fit-domain";
    case ErrorCode::empty_dataset: return "empty-dataset";
    case ErrorCode::regime_mismatch: return "regime-mismatch";
    case ErrorCode::tie: return "tie";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace patterndyn
