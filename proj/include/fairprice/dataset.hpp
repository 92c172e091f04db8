#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace fairprice {

struct DatasetSchema {
  std::vector<std::string> feature_columns;
  std::string sensitive_column;
  std::string target_column;
};

/// Tabular sample (X_i, S_i, Y_i). Features are real-valued, the sensitive
/// column holds integer group codes with at least two distinct values, the
/// target is real (0/1 for classification uses). Immutable after load.
struct Dataset {
  std::vector<std::string> feature_names;
  std::string sensitive_name;
  std::string target_name;

  Eigen::MatrixXd features;   // n x p, row order as in the file
  std::vector<int> sensitive; // group codes
  Eigen::VectorXd target;

  std::vector<int> groups;            // sorted distinct sensitive values
  std::map<int, std::size_t> counts;  // rows per group

  std::size_t rows() const { return sensitive.size(); }
  std::size_t num_features() const { return feature_names.size(); }
};

// CSV ingestion: header row required, '.' decimal separator. Throws
// std::runtime_error naming the offending column/row on any violation,
// including a degenerate (single-valued) sensitive column.
Dataset load_dataset(const std::string& path, const DatasetSchema& schema);

// Writes header + rows with round-trip-exact number formatting.
void save_dataset(const Dataset& ds, const std::string& path);

// Validation shared with in-memory construction paths.
void validate_dataset(const Dataset& ds);

}  // namespace fairprice
