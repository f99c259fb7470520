#pragma once

#include <map>
#include <string>
#include <vector>

#include "bvarml/panel.hpp"
#include "bvarml/states.hpp"

namespace bvarml {

struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IngestSpec {
  int preset = 0;  // 7, 15 or 30; 0 selects the custom schema below
  // canonical variable name -> CSV column header; identity when absent
  std::map<std::string, std::string> column_map;
  // custom schema: (column name, transform), applied in the given order
  std::vector<std::pair<std::string, TransformCode>> custom;
};

// Reads a CSV file with a leading date column, applies per-variable transforms
// and trims all series to the common sample. Preset variables appear in table
// order. Missing variables, nonpositive values under log transforms and
// ragged rows raise IngestError / domain errors by name.
Panel ingest_csv(const std::string& path, const IngestSpec& spec);

// Writes the (transformed) panel back out with a synthetic index column.
void write_panel_csv(const std::string& path, const Panel& panel);

// Columnar draw file: one row per kept sweep, named columns per parameter.
void write_chain_csv(const std::string& path, const ChainOutput& chain);

}  // namespace bvarml
