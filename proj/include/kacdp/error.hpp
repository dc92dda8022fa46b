#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kacdp {

// Every failure the library reports carries one of these kinds; the CLI
// prints `kind_name()` verbatim as the machine-readable part of its error line.
enum class ErrorKind {
  invalid_range,
  invalid_grid,
  unsupported_degree,
  length_mismatch,
  dimension_mismatch,
  invalid_widths,
  invalid_label,
  empty_batch,
  empty_input,
  single_class_input,
  io_error,
  header_mismatch,
  parse_error,
  class_too_small,
  invalid_fraction,
  shape_mismatch,
  invalid_point_count,
  checkpoint_mismatch,
  checkpoint_format,
  index_out_of_range,
  invalid_config,
  numerical_failure,
};

std::string_view kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kacdp
