#include "kacdp/error.hpp"

namespace kacdp {

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_range: return "invalid-range";
    case ErrorKind::invalid_grid: return "invalid-grid";
    case ErrorKind::unsupported_degree: return "unsupported-degree";
    case ErrorKind::length_mismatch: return "length-mismatch";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::invalid_widths: return "invalid-widths";
    case ErrorKind::invalid_label: return "invalid-label";
    case ErrorKind::empty_batch: return "empty-batch";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::single_class_input: return "single-class-input";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::header_mismatch: return "header-mismatch";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::class_too_small: return "class-too-small";
    case ErrorKind::invalid_fraction: return "invalid-fraction";
    case ErrorKind::shape_mismatch: return "shape-mismatch";
    case ErrorKind::invalid_point_count: return "invalid-point-count";
    case ErrorKind::checkpoint_mismatch: return "checkpoint-mismatch";
    case ErrorKind::checkpoint_format: return "checkpoint-format";
    case ErrorKind::index_out_of_range: return "index-out-of-range";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + message), kind_(kind) {}

}  // namespace kacdp
