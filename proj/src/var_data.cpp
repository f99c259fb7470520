#include "bvarml/var_data.hpp"

#include <stdexcept>

namespace bvarml {

VARData build_var_data(const Eigen::MatrixXd& values, int p) {
  if (p < 1) throw std::invalid_argument("build_var_data: lag order must be >= 1");
  const int rows = static_cast<int>(values.rows());
  const int n = static_cast<int>(values.cols());
  if (rows <= p) throw std::invalid_argument("build_var_data: panel needs more rows than lags");

  VARData d;
  d.p = p;
  d.n = n;
  d.T = rows - p;
  d.Y = values.bottomRows(d.T);
  d.X.resize(d.T, 1 + n * p);
  d.X.col(0).setOnes();
  for (int l = 1; l <= p; ++l)
    d.X.middleCols(1 + (l - 1) * n, n) = values.middleRows(p - l, d.T);
  return d;
}

VARData build_var_data(const Panel& panel, int p) {
  panel.validate();
  return build_var_data(panel.values, p);
}

}  // namespace bvarml
