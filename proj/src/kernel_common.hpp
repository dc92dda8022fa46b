#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "kacdp/error.hpp"
#include "kacdp/matrix.hpp"
#include "kacdp/network.hpp"

namespace kacdp::detail {

inline void check_features(const KanNetwork& net, const Matrix& x) {
  if (net.layers.empty() || x.cols != net.input_dim()) {
    throw Error(ErrorKind::dimension_mismatch,
                "network expects " + std::to_string(net.layers.empty() ? 0 : net.input_dim()) +
                    " features, batch has " + std::to_string(x.cols));
  }
}

inline std::size_t check_batch(const KanNetwork& net, const Matrix& x, const Labels& y,
                               std::span<const std::size_t> rows) {
  check_features(net, x);
  if (y.size() != x.rows) {
    throw Error(ErrorKind::dimension_mismatch, "label count does not match sample count");
  }
  const std::size_t n = rows.empty() ? x.rows : rows.size();
  if (n == 0) throw Error(ErrorKind::empty_batch, "batch has no samples");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = rows.empty() ? i : rows[i];
    if (r >= x.rows) throw Error(ErrorKind::dimension_mismatch, "row index out of range");
    if (y[r] > 1) throw Error(ErrorKind::invalid_label, "label must be 0 or 1");
  }
  return n;
}

}  // namespace kacdp::detail
