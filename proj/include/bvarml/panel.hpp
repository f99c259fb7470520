#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bvarml {

enum class TransformCode { none, dlog400, d2log };

TransformCode transform_code_from_string(const std::string& s);
std::string to_string(TransformCode code);
int differencing_order(TransformCode code);

// Multivariate time-series panel after transformation, free of missing values.
struct Panel {
  Eigen::MatrixXd values;  // rows = time, cols = variables
  std::vector<std::string> names;
  std::vector<TransformCode> transform_codes;
  std::string frequency = "quarterly";

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
  void validate() const;  // throws std::invalid_argument on shape mismatch / NaN
};

// none -> identity; dlog400 -> 400 * (log x_t - log x_{t-1}); d2log -> second
// difference of logs. Output is shorter than the input by the differencing order.
std::vector<double> transform_series(const std::vector<double>& raw, TransformCode code);
Eigen::VectorXd transform_series(const Eigen::VectorXd& raw, TransformCode code);

// Residual sample variance of an OLS AR(4) fit with intercept, per column.
// Uses the maximum-likelihood divisor (effective sample size).
Eigen::VectorXd ar4_residual_variances(const Panel& panel);
double ar4_residual_variance(const Eigen::VectorXd& series);

// One entry of the quarterly variable presets (7 / 15 / 30 variables).
struct PresetVariable {
  std::string name;
  TransformCode transform;
};

// Variable list for n in {7, 15, 30}, in table order.
std::vector<PresetVariable> panel_preset(int n);

}  // namespace bvarml
