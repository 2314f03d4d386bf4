#pragma once

#include <cstdint>
#include <vector>

#include "bagg/types.hpp"

namespace bagg {

// Rows of x are observations; y is the response.
struct Dataset {
  Matrix x;
  Vector y;

  Eigen::Index rows() const { return y.size(); }
  Eigen::Index features() const { return x.cols(); }

  // Throws std::invalid_argument unless shapes agree, entries are finite and
  // there are at least `min_rows` rows.
  void validate(Eigen::Index min_rows = 4) const;

  Dataset subset(const std::vector<Eigen::Index>& rows) const;

  // FNV-1a over the raw bytes of x and y; used to check that paired runs saw
  // identical data.
  std::uint64_t hash() const;
};

}  // namespace bagg
