#include "tvsar/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tvsar {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw MissingData("cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

bool parse_double(const std::string& s, double* out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return false;
  *out = v;
  return true;
}

// Sort keys numerically when they all parse as numbers, otherwise
// lexicographically; this fixes the location/period index assignment.
std::vector<std::string> sorted_keys(std::vector<std::string> keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<double> nums(keys.size());
  bool all_numeric = true;
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (!parse_double(keys[i], &nums[i])) {
      all_numeric = false;
      break;
    }
  if (all_numeric) {
    std::vector<std::size_t> order(keys.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return nums[a] < nums[b]; });
    std::vector<std::string> out;
    out.reserve(keys.size());
    for (std::size_t i : order) out.push_back(keys[i]);
    return out;
  }
  return keys;
}

}  // namespace

std::string format_double(double v) {
  // shortest representation that round-trips exactly
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

LoadedPanel load_panel_csv(const std::string& path, const PanelLayout& layout) {
  const auto rows = read_rows(path);
  if (rows.size() < 2 || rows[0].size() < 3)
    throw MissingData("panel CSV " + path +
                      " needs a header and at least location, period and one "
                      "value column");

  const auto& header = rows[0];
  auto col_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ParseError("panel CSV " + path + " has no column named '" + name +
                       "'");
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t loc_col = col_index(layout.location_col);
  const std::size_t per_col = col_index(layout.period_col);
  const std::size_t y_col = col_index(layout.response_col);
  std::vector<std::size_t> x_cols;
  x_cols.reserve(layout.covariate_cols.size());
  for (const auto& name : layout.covariate_cols)
    x_cols.push_back(col_index(name));

  std::vector<std::string> locs, pers;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw ParseError("panel CSV " + path + " row " + std::to_string(r + 1) +
                       " has " + std::to_string(rows[r].size()) +
                       " fields, header has " + std::to_string(header.size()));
    locs.push_back(rows[r][loc_col]);
    pers.push_back(rows[r][per_col]);
  }
  const std::vector<std::string> loc_ids = sorted_keys(locs);
  const std::vector<std::string> per_ids = sorted_keys(pers);
  const int n = static_cast<int>(loc_ids.size());
  const int t_len = static_cast<int>(per_ids.size());
  if (static_cast<std::size_t>(n) * t_len != rows.size() - 1)
    throw MissingData("panel CSV " + path + " has " +
                      std::to_string(rows.size() - 1) + " data rows but " +
                      std::to_string(n) + " locations x " +
                      std::to_string(t_len) + " periods");

  std::map<std::string, int> loc_idx, per_idx;
  for (int i = 0; i < n; ++i) loc_idx[loc_ids[static_cast<std::size_t>(i)]] = i;
  for (int t = 0; t < t_len; ++t)
    per_idx[per_ids[static_cast<std::size_t>(t)]] = t;

  const int nt = n * t_len;
  const int px = static_cast<int>(x_cols.size()) + (layout.add_intercept ? 1 : 0);
  Eigen::VectorXd y(nt);
  Eigen::MatrixXd x(nt, px);
  std::vector<bool> seen(static_cast<std::size_t>(nt), false);
  if (layout.add_intercept) x.col(0).setOnes();
  const int x_base = layout.add_intercept ? 1 : 0;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int i = loc_idx.at(rows[r][loc_col]);
    const int t = per_idx.at(rows[r][per_col]);
    const int stacked = t * n + i;
    if (seen[static_cast<std::size_t>(stacked)])
      throw ParseError("panel CSV " + path + " has a duplicate cell for (" +
                       rows[r][loc_col] + ", " + rows[r][per_col] + ")");
    seen[static_cast<std::size_t>(stacked)] = true;
    auto value = [&](std::size_t c) {
      double v;
      if (!parse_double(rows[r][c], &v) || !std::isfinite(v))
        throw ParseError("panel CSV " + path + " row " +
                         std::to_string(r + 1) + ", column '" + header[c] +
                         "': '" + rows[r][c] + "' is not a finite number");
      return v;
    };
    y(stacked) = value(y_col);
    for (std::size_t j = 0; j < x_cols.size(); ++j)
      x(stacked, x_base + static_cast<int>(j)) = value(x_cols[j]);
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
    throw MissingData("panel CSV " + path +
                      " is missing at least one (location, period) cell");

  LoadedPanel out;
  out.data = PanelData::make(std::move(y), std::move(x), n, t_len);
  if (layout.add_intercept) out.x_names.push_back("intercept");
  for (const auto& name : layout.covariate_cols) out.x_names.push_back(name);
  out.location_ids = loc_ids;
  out.period_ids = per_ids;
  return out;
}

SpatialWeights load_weights_csv(const std::string& path) {
  auto rows = read_rows(path);
  if (rows.empty()) throw MissingData("weights CSV " + path + " is empty");

  // Optional header row / label column: drop them when non-numeric.
  double tmp;
  const bool header_row =
      !rows[0].empty() && !parse_double(rows[0].back(), &tmp);
  if (header_row) rows.erase(rows.begin());
  if (rows.empty()) throw MissingData("weights CSV " + path + " has no data");
  const bool label_col = !rows[0].empty() && !parse_double(rows[0][0], &tmp);

  const std::size_t n = rows.size();
  Eigen::MatrixXd w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t offset = label_col ? 1 : 0;
    if (rows[i].size() != n + offset)
      throw ParseError("weights CSV " + path + " is not square: row " +
                       std::to_string(i + 1) + " has " +
                       std::to_string(rows[i].size() - offset) +
                       " values, expected " + std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) {
      double v;
      if (!parse_double(rows[i][j + offset], &v) || !std::isfinite(v))
        throw ParseError("weights CSV " + path + " entry (" +
                         std::to_string(i + 1) + "," + std::to_string(j + 1) +
                         ") is not a finite number");
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }

  double max_row_sum_dev = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    max_row_sum_dev = std::max(
        max_row_sum_dev, std::abs(w.row(static_cast<Eigen::Index>(i)).sum() - 1.0));
  SpatialWeights out{std::move(w), max_row_sum_dev <= 1e-12};
  out.validate();
  return out;
}

void write_weights_csv(const std::string& path, const SpatialWeights& w,
                       const std::string& comment) {
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot write file: " + path);
  if (!comment.empty()) outf << "# " << comment << "\n";
  const auto n = w.values.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j) outf << ",";
      outf << format_double(w.values(i, j));
    }
    outf << "\n";
  }
}

void write_panel_csv(const std::string& path, const PanelData& data,
                     const std::string& response_name,
                     const std::vector<std::string>& covariate_names,
                     const std::string& comment) {
  if (static_cast<int>(covariate_names.size()) + 1 != data.p())
    throw DimensionError(
        "write_panel_csv: covariate names must cover all non-intercept "
        "columns");
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot write file: " + path);
  if (!comment.empty()) outf << "# " << comment << "\n";
  outf << "location,period," << response_name;
  for (const auto& name : covariate_names) outf << "," << name;
  outf << "\n";
  for (int t = 0; t < data.t_len; ++t)
    for (int i = 0; i < data.n; ++i) {
      const int stacked = t * data.n + i;
      outf << (i + 1) << "," << (t + 1) << ","
           << format_double(data.y(stacked));
      for (int j = 1; j < data.p(); ++j)
        outf << "," << format_double(data.x(stacked, j));
      outf << "\n";
    }
}

}  // namespace tvsar
