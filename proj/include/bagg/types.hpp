#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace bagg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A sampler or estimator produced a value it cannot recover from
// (non-finite acceptance ratio, unmet approximation bound).
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bagg
