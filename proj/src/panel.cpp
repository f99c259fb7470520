#include "bvarml/panel.hpp"

#include <cmath>
#include <stdexcept>

namespace bvarml {

TransformCode transform_code_from_string(const std::string& s) {
  if (s == "none") return TransformCode::none;
  if (s == "dlog400") return TransformCode::dlog400;
  if (s == "d2log") return TransformCode::d2log;
  throw std::invalid_argument("unknown transform code: " + s);
}

std::string to_string(TransformCode code) {
  switch (code) {
    case TransformCode::none: return "none";
    case TransformCode::dlog400: return "dlog400";
    case TransformCode::d2log: return "d2log";
  }
  return "none";
}

int differencing_order(TransformCode code) {
  switch (code) {
    case TransformCode::none: return 0;
    case TransformCode::dlog400: return 1;
    case TransformCode::d2log: return 2;
  }
  return 0;
}

void Panel::validate() const {
  if (static_cast<int>(names.size()) != cols()) throw std::invalid_argument("Panel: names length != column count");
  if (static_cast<int>(transform_codes.size()) != cols())
    throw std::invalid_argument("Panel: transform_codes length != column count");
  if (!values.allFinite()) throw std::invalid_argument("Panel: values contain NaN or infinity");
}

std::vector<double> transform_series(const std::vector<double>& raw, TransformCode code) {
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(raw.size()));
  Eigen::VectorXd y = transform_series(x, code);
  return std::vector<double>(y.data(), y.data() + y.size());
}

Eigen::VectorXd transform_series(const Eigen::VectorXd& raw, TransformCode code) {
  const int order = differencing_order(code);
  const int T = static_cast<int>(raw.size());
  if (T < order + 1) throw std::invalid_argument("transform_series: series too short for transform");
  if (code == TransformCode::none) return raw;
  for (int t = 0; t < T; ++t)
    if (!(raw(t) > 0.0))
      throw std::domain_error("transform_series: nonpositive value at index " + std::to_string(t) +
                              " under a log transform");
  Eigen::VectorXd logs = raw.array().log();
  if (code == TransformCode::dlog400) return 400.0 * (logs.tail(T - 1) - logs.head(T - 1));
  Eigen::VectorXd d1 = logs.tail(T - 1) - logs.head(T - 1);
  return d1.tail(T - 2) - d1.head(T - 2);
}

double ar4_residual_variance(const Eigen::VectorXd& series) {
  constexpr int p = 4;
  const int T = static_cast<int>(series.size());
  if (T <= p + 2) throw std::invalid_argument("ar4_residual_variance: column too short for an AR(4) fit");
  const int Te = T - p;
  Eigen::MatrixXd X(Te, p + 1);
  Eigen::VectorXd y = series.tail(Te);
  X.col(0).setOnes();
  for (int l = 1; l <= p; ++l) X.col(l) = series.segment(p - l, Te);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < p + 1) throw std::runtime_error("ar4_residual_variance: collinear lags (rank-deficient design)");
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - X * beta;
  return resid.squaredNorm() / static_cast<double>(Te);
}

Eigen::VectorXd ar4_residual_variances(const Panel& panel) {
  const int n = panel.cols();
  Eigen::VectorXd s2(n);
  for (int i = 0; i < n; ++i) s2(i) = ar4_residual_variance(panel.values.col(i));
  return s2;
}

std::vector<PresetVariable> panel_preset(int n) {
  using TC = TransformCode;
  struct Row {
    const char* name;
    TC code;
    int min_preset;  // smallest preset containing the variable
  };
  // Table order; min_preset 7 means present in the 7/15/30 lists, etc.
  static const Row rows[] = {
      {"real_gdp", TC::dlog400, 7},
      {"pce", TC::dlog400, 15},
      {"real_pce_durables", TC::dlog400, 30},
      {"real_disposable_income", TC::dlog400, 30},
      {"industrial_production", TC::dlog400, 7},
      {"ip_final_products", TC::dlog400, 30},
      {"employees_total_nonfarm", TC::dlog400, 15},
      {"employees_manufacturing", TC::dlog400, 30},
      {"civilian_employment", TC::dlog400, 15},
      {"labor_force_participation", TC::none, 30},
      {"unemployment_rate", TC::none, 7},
      {"nonfarm_hours", TC::dlog400, 30},
      {"housing_starts", TC::dlog400, 15},
      {"building_permits", TC::dlog400, 30},
      {"pce_price_index", TC::dlog400, 15},
      {"gdp_price_index", TC::dlog400, 30},
      {"cpi_all_items", TC::dlog400, 7},
      {"ppi_all_commodities", TC::dlog400, 30},
      {"real_hourly_earnings_manufacturing", TC::dlog400, 7},
      {"output_per_hour", TC::dlog400, 30},
      {"fed_funds_rate", TC::none, 7},
      {"tbill_3m", TC::none, 30},
      {"treasury_1y", TC::none, 30},
      {"treasury_10y", TC::none, 7},
      {"baa_10y_spread", TC::none, 15},
      {"cp_tbill_spread", TC::none, 30},
      {"real_m1", TC::dlog400, 15},
      {"real_m2", TC::dlog400, 30},
      {"total_reserves", TC::d2log, 30},
      {"sp500", TC::dlog400, 15},
  };
  if (n != 7 && n != 15 && n != 30) throw std::invalid_argument("panel_preset: n must be 7, 15 or 30");
  std::vector<PresetVariable> out;
  for (const Row& r : rows)
    if (r.min_preset <= n) out.push_back({r.name, r.code});
  return out;
}

}  // namespace bvarml
