#include "bvarml/csv_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bvarml {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim whitespace and CR
    const auto a = field.find_first_not_of(" \t\r");
    const auto b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Panel ingest_csv(const std::string& path, const IngestSpec& spec) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open data file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty data file: " + path);
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2) throw IngestError("data file needs a date column plus at least one series");

  std::vector<std::vector<double>> columns(header.size() - 1);
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw IngestError("ragged row " + std::to_string(row_no) + ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(fields.size()));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(fields[c], &pos);
        if (pos != fields[c].size()) throw std::invalid_argument(fields[c]);
        columns[c - 1].push_back(v);
      } catch (const std::exception&) {
        throw IngestError("row " + std::to_string(row_no) + ", column '" + header[c] + "': cannot parse value '" +
                          fields[c] + "'");
      }
    }
  }

  std::vector<std::pair<std::string, TransformCode>> schema;
  if (spec.preset == 0) {
    if (spec.custom.empty()) throw IngestError("custom ingest spec has no variables");
    schema = spec.custom;
  } else {
    for (const PresetVariable& v : panel_preset(spec.preset)) schema.push_back({v.name, v.transform});
  }

  auto find_column = [&](const std::string& canonical) -> const std::vector<double>& {
    const auto mapped = spec.column_map.find(canonical);
    const std::string wanted = mapped == spec.column_map.end() ? canonical : mapped->second;
    for (std::size_t c = 1; c < header.size(); ++c)
      if (header[c] == wanted) return columns[c - 1];
    throw IngestError("variable '" + canonical + "' (column '" + wanted + "') not found in " + path);
  };

  int max_order = 0;
  for (const auto& [name, code] : schema) max_order = std::max(max_order, differencing_order(code));

  Panel panel;
  const int raw_rows = static_cast<int>(columns[0].size());
  if (raw_rows <= max_order) throw IngestError("too few rows for the requested transforms");
  const int out_rows = raw_rows - max_order;
  panel.values.resize(out_rows, static_cast<int>(schema.size()));
  int idx = 0;
  for (const auto& [name, code] : schema) {
    const std::vector<double>& raw = find_column(name);
    std::vector<double> transformed;
    try {
      transformed = transform_series(raw, code);
    } catch (const std::domain_error& e) {
      throw std::domain_error("variable '" + name + "': " + e.what());
    }
    const int skip = static_cast<int>(transformed.size()) - out_rows;
    for (int t = 0; t < out_rows; ++t) panel.values(t, idx) = transformed[static_cast<std::size_t>(skip + t)];
    panel.names.push_back(name);
    panel.transform_codes.push_back(code);
    ++idx;
  }
  panel.validate();
  return panel;
}

void write_panel_csv(const std::string& path, const Panel& panel) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot write panel file: " + path);
  out << "t";
  for (const auto& name : panel.names) out << ',' << name;
  out << '\n';
  for (int t = 0; t < panel.rows(); ++t) {
    out << (t + 1);
    for (int c = 0; c < panel.cols(); ++c) out << ',' << format_full(panel.values(t, c));
    out << '\n';
  }
}

namespace {

void header_and_rows(std::ofstream& out, const std::vector<std::string>& names,
                     const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_full(row[i]);
    out << '\n';
  }
}

}  // namespace

void write_chain_csv(const std::string& path, const ChainOutput& chain) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot write draw file: " + path);
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  auto name2 = [&](const std::string& base, int i, int j) {
    names.push_back(base + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  };
  auto name1 = [&](const std::string& base, int i) { names.push_back(base + "_" + std::to_string(i + 1)); };

  switch (chain.model) {
    case ModelTag::var:
    case ModelTag::csv: {
      const auto& draws = chain.csv_draws();
      const auto& first = draws.front();
      const int k = static_cast<int>(first.A.rows()), n = static_cast<int>(first.A.cols());
      const int T = static_cast<int>(first.h.size());
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < k; ++i) name2("A", i, j);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) name2("Sigma", i, j);
      for (int t = 0; t < T; ++t) name1("h", t);
      names.push_back("phi");
      names.push_back("sigma2");
      names.push_back("kappa");
      for (const auto& s : draws) {
        std::vector<double> row;
        row.reserve(names.size());
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < k; ++i) row.push_back(s.A(i, j));
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) row.push_back(s.Sigma(i, j));
        for (int t = 0; t < T; ++t) row.push_back(s.h(t));
        row.push_back(s.phi);
        row.push_back(s.sigma2);
        row.push_back(s.kappa);
        rows.push_back(std::move(row));
      }
      break;
    }
    case ModelTag::sv: {
      const auto& draws = chain.sv_draws();
      const auto& first = draws.front();
      const int k = static_cast<int>(first.alpha.rows()), n = static_cast<int>(first.alpha.cols());
      const int T = static_cast<int>(first.h.cols());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) name2("alpha", i, j);
      for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) name2("beta", i, j);
      for (int i = 0; i < n; ++i)
        for (int t = 0; t < T; ++t) name2("h", i, t);
      for (int i = 0; i < n; ++i) name1("mu", i);
      for (int i = 0; i < n; ++i) name1("phi", i);
      for (int i = 0; i < n; ++i) name1("sigma2", i);
      names.push_back("kappa1");
      names.push_back("kappa2");
      names.push_back("kappa3");
      for (const auto& s : draws) {
        std::vector<double> row;
        row.reserve(names.size());
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < k; ++j) row.push_back(s.alpha(j, i));
        for (int i = 1; i < n; ++i)
          for (int j = 0; j < i; ++j) row.push_back(s.beta[i](j));
        for (int i = 0; i < n; ++i)
          for (int t = 0; t < T; ++t) row.push_back(s.h(i, t));
        for (int i = 0; i < n; ++i) row.push_back(s.mu(i));
        for (int i = 0; i < n; ++i) row.push_back(s.phi(i));
        for (int i = 0; i < n; ++i) row.push_back(s.sigma2(i));
        row.push_back(s.kappa1);
        row.push_back(s.kappa2);
        row.push_back(s.kappa3);
        rows.push_back(std::move(row));
      }
      break;
    }
    case ModelTag::fsv: {
      const auto& draws = chain.fsv_draws();
      const auto& first = draws.front();
      const int k = static_cast<int>(first.alpha.rows()), n = static_cast<int>(first.alpha.cols());
      const int r = first.factor_count();
      const int T = static_cast<int>(first.h.cols());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) name2("alpha", i, j);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < std::min(i, r); ++j) name2("l", i, j);
      for (int j = 0; j < r; ++j)
        for (int t = 0; t < T; ++t) name2("f", j, t);
      for (int i = 0; i < n + r; ++i)
        for (int t = 0; t < T; ++t) name2("h", i, t);
      for (int i = 0; i < n + r; ++i) name1("mu", i);
      for (int i = 0; i < n + r; ++i) name1("phi", i);
      for (int i = 0; i < n + r; ++i) name1("sigma2", i);
      names.push_back("kappa1");
      names.push_back("kappa2");
      for (const auto& s : draws) {
        std::vector<double> row;
        row.reserve(names.size());
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < k; ++j) row.push_back(s.alpha(j, i));
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < std::min(i, r); ++j) row.push_back(s.loadings[i](j));
        for (int j = 0; j < r; ++j)
          for (int t = 0; t < T; ++t) row.push_back(s.f(j, t));
        for (int i = 0; i < n + r; ++i)
          for (int t = 0; t < T; ++t) row.push_back(s.h(i, t));
        for (int i = 0; i < n + r; ++i) row.push_back(s.mu(i));
        for (int i = 0; i < n + r; ++i) row.push_back(s.phi(i));
        for (int i = 0; i < n + r; ++i) row.push_back(s.sigma2(i));
        row.push_back(s.kappa1);
        row.push_back(s.kappa2);
        rows.push_back(std::move(row));
      }
      break;
    }
  }
  header_and_rows(out, names, rows);
}

}  // namespace bvarml
