#pragma once

#include <Eigen/Dense>

#include "bvarml/panel.hpp"

namespace bvarml {

// Response and lag design for a VAR(p): row t of X is (1, y_{t-1}', ..., y_{t-p}').
struct VARData {
  Eigen::MatrixXd Y;  // T x n
  Eigen::MatrixXd X;  // T x k, k = 1 + n p
  int p = 0;
  int n = 0;
  int T = 0;

  int k() const { return 1 + n * p; }
};

VARData build_var_data(const Panel& panel, int p);
VARData build_var_data(const Eigen::MatrixXd& values, int p);

}  // namespace bvarml
