#include "gwh/error.hpp"

namespace gwh {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ContractViolation: return "contract_violation";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::DegenerateInput: return "degenerate_input";
    case ErrorCode::Construction: return "construction_error";
    case ErrorCode::Rewiring: return "rewiring_error";
    case ErrorCode::Config: return "config_error";
    case ErrorCode::Io: return "io_error";
    case ErrorCode::Format: return "format_error";
    case ErrorCode::Runtime: return "runtime_error";
  }
  return "unknown_error";
}

}  // namespace gwh
