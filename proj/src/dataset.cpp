#include "fairprice/dataset.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fairprice {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_real(const std::string& cell, const std::string& col,
                  std::size_t row) {
  const std::string t = trim(cell);
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE ||
      !std::isfinite(v)) {
    throw std::runtime_error("unparsable cell in column '" + col + "', row " +
                             std::to_string(row) + ": '" + cell + "'");
  }
  return v;
}

int parse_group(const std::string& cell, const std::string& col,
                std::size_t row) {
  double v = parse_real(cell, col, row);
  double r = std::round(v);
  if (std::abs(v - r) > 1e-9)
    throw std::runtime_error("sensitive column '" + col + "' row " +
                             std::to_string(row) +
                             " is not an integer group code: '" + cell + "'");
  return static_cast<int>(r);
}

}  // namespace

void validate_dataset(const Dataset& ds) {
  const std::size_t n = ds.rows();
  if (n == 0) throw std::runtime_error("dataset has no rows");
  if (static_cast<std::size_t>(ds.features.rows()) != n ||
      static_cast<std::size_t>(ds.target.size()) != n)
    throw std::runtime_error("dataset: inconsistent row counts");
  std::set<int> distinct(ds.sensitive.begin(), ds.sensitive.end());
  if (distinct.size() < 2)
    throw std::runtime_error("degenerate sensitive column '" +
                             ds.sensitive_name +
                             "': fewer than 2 distinct values");
}

Dataset load_dataset(const std::string& path, const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("empty file: " + path);
  std::vector<std::string> cols = split_csv_line(header);
  for (auto& c : cols) c = trim(c);

  auto col_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return i;
    throw std::runtime_error("missing column '" + name + "' in " + path);
  };

  std::vector<std::size_t> fidx;
  for (const auto& f : schema.feature_columns) fidx.push_back(col_index(f));
  const std::size_t sidx = col_index(schema.sensitive_column);
  const std::size_t tidx = col_index(schema.target_column);

  std::vector<std::vector<double>> feats;
  std::vector<int> sens;
  std::vector<double> targ;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < cols.size())
      throw std::runtime_error("row " + std::to_string(row) +
                               " has too few cells");
    std::vector<double> frow;
    for (std::size_t k = 0; k < fidx.size(); ++k)
      frow.push_back(parse_real(cells[fidx[k]], schema.feature_columns[k], row));
    feats.push_back(std::move(frow));
    sens.push_back(parse_group(cells[sidx], schema.sensitive_column, row));
    targ.push_back(parse_real(cells[tidx], schema.target_column, row));
  }

  Dataset ds;
  ds.feature_names = schema.feature_columns;
  ds.sensitive_name = schema.sensitive_column;
  ds.target_name = schema.target_column;
  const std::size_t n = feats.size();
  const std::size_t p = schema.feature_columns.size();
  ds.features.resize(n, p);
  ds.target.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) ds.features(i, j) = feats[i][j];
    ds.target(i) = targ[i];
  }
  ds.sensitive = std::move(sens);
  for (int s : ds.sensitive) ds.counts[s]++;
  for (const auto& [g, c] : ds.counts) ds.groups.push_back(g);
  validate_dataset(ds);
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  char buf[64];
  for (std::size_t j = 0; j < ds.feature_names.size(); ++j)
    out << ds.feature_names[j] << ",";
  out << ds.sensitive_name << "," << ds.target_name << "\n";
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < ds.num_features(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features(i, j));
      out << buf << ",";
    }
    out << ds.sensitive[i] << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", ds.target(i));
    out << buf << "\n";
  }
}

}  // namespace fairprice
