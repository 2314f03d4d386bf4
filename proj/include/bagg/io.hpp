#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bagg/dataset.hpp"

namespace bagg {

// Parsed numeric CSV: header names and a rows x columns matrix.
struct NumericTable {
  std::vector<std::string> header;
  Matrix values;
};

// Comma-separated, '.' decimal, header row required. Blank lines are skipped.
// Errors name the file, line and column.
NumericTable parse_numeric_csv(const std::string& text, const std::string& origin = "<text>");
NumericTable read_numeric_csv(const std::filesystem::path& path);

// Last column is the response, the rest are features.
Dataset read_dataset_csv(const std::filesystem::path& path);

// Aggregation rows: header id,f_1,...,f_M,y.
struct PredictionRows {
  std::vector<std::string> learners;
  Matrix f;
  Vector y;
};
PredictionRows read_prediction_csv(const std::filesystem::path& path);

// Test rows: header id,f_1,...,f_M (a trailing y column is allowed and returned).
struct TestRows {
  std::vector<std::string> learners;
  Matrix f;
  Vector y;  // empty when absent
};
TestRows read_test_csv(const std::filesystem::path& path);

// Shortest round-trip decimal form, so written values parse back bit-exactly.
std::string format_double(double v);

std::string read_text(const std::filesystem::path& path);

// Writes via a temporary file in the same directory and renames it over
// `path`, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace bagg
