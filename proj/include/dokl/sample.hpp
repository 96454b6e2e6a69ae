#pragma once

#include <Eigen/Dense>

namespace dokl {

// One observation: feature point and scalar target.
struct Sample {
  Eigen::VectorXd x;
  double y = 0.0;
};

}  // namespace dokl
