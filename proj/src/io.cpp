#include "bagg/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bagg {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_value(const std::string& raw, const std::string& origin, std::size_t line, std::size_t col) {
  const std::string s = trim(raw);
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw std::invalid_argument(origin + ":" + std::to_string(line) + ": column " + std::to_string(col + 1) +
                                " is not a number: '" + s + "'");
  }
  return v;
}

void require_header(const NumericTable& t, const std::string& origin, std::size_t min_cols) {
  if (t.header.size() < min_cols) {
    throw std::invalid_argument(origin + ": expected at least " + std::to_string(min_cols) + " columns");
  }
  if (t.header.front() != "id") throw std::invalid_argument(origin + ": first column must be 'id'");
}

}  // namespace

NumericTable parse_numeric_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  NumericTable table;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (table.header.empty()) {
      for (auto& f : fields) table.header.push_back(trim(f));
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.header.size()) + " fields, found " +
                                  std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) row.push_back(parse_value(fields[c], origin, line_no, c));
    rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw std::invalid_argument(origin + ": missing header row");
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

NumericTable read_numeric_csv(const std::filesystem::path& path) {
  return parse_numeric_csv(read_text(path), path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const auto t = read_numeric_csv(path);
  if (t.header.size() < 2) throw std::invalid_argument(path.string() + ": need features and a response column");
  const auto cols = t.values.cols();
  Dataset d{t.values.leftCols(cols - 1), t.values.col(cols - 1)};
  d.validate();
  return d;
}

PredictionRows read_prediction_csv(const std::filesystem::path& path) {
  const auto t = read_numeric_csv(path);
  require_header(t, path.string(), 3);
  if (t.header.back() != "y") throw std::invalid_argument(path.string() + ": last column must be 'y'");
  const auto m = static_cast<Eigen::Index>(t.header.size()) - 2;
  PredictionRows out;
  out.learners.assign(t.header.begin() + 1, t.header.end() - 1);
  out.f = t.values.middleCols(1, m);
  out.y = t.values.col(m + 1);
  if (!out.f.allFinite() || !out.y.allFinite()) throw std::invalid_argument(path.string() + ": non-finite values");
  return out;
}

TestRows read_test_csv(const std::filesystem::path& path) {
  const auto t = read_numeric_csv(path);
  require_header(t, path.string(), 2);
  const bool has_y = t.header.back() == "y";
  const auto m = static_cast<Eigen::Index>(t.header.size()) - 1 - (has_y ? 1 : 0);
  if (m < 1) throw std::invalid_argument(path.string() + ": no prediction columns");
  TestRows out;
  out.learners.assign(t.header.begin() + 1, t.header.begin() + 1 + m);
  out.f = t.values.middleCols(1, m);
  if (has_y) out.y = t.values.col(m + 1);
  if (!out.f.allFinite()) throw std::invalid_argument(path.string() + ": non-finite values");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format value");
  return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename into " + path.string());
  }
}

}  // namespace bagg
