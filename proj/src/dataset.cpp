#include "bagg/dataset.hpp"

#include <cstring>
#include <stdexcept>
#include <string>

namespace bagg {

void Dataset::validate(Eigen::Index min_rows) const {
  if (x.rows() != y.size()) throw std::invalid_argument("feature rows must match response length");
  if (rows() < min_rows) {
    throw std::invalid_argument("dataset needs at least " + std::to_string(min_rows) + " rows");
  }
  if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("dataset contains non-finite values");
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& idx) const {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(idx.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
    out.y(static_cast<Eigen::Index>(i)) = y(idx[i]);
  }
  return out;
}

namespace {

void fnv_mix(std::uint64_t& h, const double* data, Eigen::Index count) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < static_cast<std::size_t>(count) * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
}

}  // namespace

std::uint64_t Dataset::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const Eigen::Index dims[2] = {x.rows(), x.cols()};
  const auto* dim_bytes = reinterpret_cast<const unsigned char*>(dims);
  for (std::size_t i = 0; i < sizeof(dims); ++i) {
    h ^= dim_bytes[i];
    h *= 0x100000001b3ull;
  }
  fnv_mix(h, x.data(), x.size());
  fnv_mix(h, y.data(), y.size());
  return h;
}

}  // namespace bagg
