#pragma once

#include <string>
#include <vector>

#include "tvsar/panel.hpp"

namespace tvsar {

/// Column roles for a long-format panel CSV: one row per (location, period),
/// a header naming every column. The design matrix is assembled as
/// [1, covariate_cols...] unless add_intercept is off.
struct PanelLayout {
  std::string location_col = "location";
  std::string period_col = "period";
  std::string response_col;
  std::vector<std::string> covariate_cols;
  bool add_intercept = true;
};

struct LoadedPanel {
  PanelData data;
  std::vector<std::string> x_names;      // column names of data.x
  std::vector<std::string> location_ids; // sorted, index = location i
  std::vector<std::string> period_ids;   // sorted, index = period t
};

/// Reads and validates a panel CSV. Rows may appear in any order; they are
/// re-sorted into location-fastest stacking. Every (location, period) cell
/// must be present exactly once and numeric.
LoadedPanel load_panel_csv(const std::string& path, const PanelLayout& layout);

/// Reads an N x N weights CSV (optional header row/column, '#' comments
/// skipped) and validates the spatial-weights invariants.
SpatialWeights load_weights_csv(const std::string& path);

void write_weights_csv(const std::string& path, const SpatialWeights& w,
                       const std::string& comment = "");

/// Writes a long-format panel CSV with columns
/// location,period,<response>,<covariates...>.
void write_panel_csv(const std::string& path, const PanelData& data,
                     const std::string& response_name,
                     const std::vector<std::string>& covariate_names,
                     const std::string& comment = "");

/// Shortest round-trip formatting used by every CSV writer.
std::string format_double(double v);

}  // namespace tvsar
