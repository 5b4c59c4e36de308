#include "text_input.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "lgeo/error.hpp"

namespace lgeo::cli {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_separator(char ch) {
  return ch == ',' || ch == ';' || ch == ' ' || ch == '\t' || ch == '\r';
}

std::vector<double> parse_line(std::string_view line, std::size_t line_no) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<double> values;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_separator(line[i])) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_separator(line[j])) ++j;
    const std::string_view token = line.substr(i, j - i);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw ParseError("not a number: '" + std::string(token) + "'", line_no);
    }
    if (!std::isfinite(v)) throw ParseError("non-finite value", line_no);
    values.push_back(v);
    i = j;
  }
  return values;
}

std::vector<std::vector<double>> parse_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto row = parse_line(line, line_no);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("row has " + std::to_string(row.size()) + " values, expected " +
                           std::to_string(rows.front().size()),
                       line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InputError("matrix is empty");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw InputError("ragged matrix rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace

std::vector<double> read_numbers(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    auto row = parse_line(line, ++line_no);
    values.insert(values.end(), row.begin(), row.end());
  }
  if (values.empty()) throw InputError(path.string() + ": no values");
  return values;
}

Matrix read_matrix(const std::filesystem::path& path) { return to_matrix(parse_rows(slurp(path))); }

attn::LinearHead read_linear_head(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  attn::LinearHead head;
  if (first != std::string::npos && text[first] == '{') {
    try {
      const auto j = nlohmann::json::parse(text);
      head.weight = to_matrix(j.at("weight").get<std::vector<std::vector<double>>>());
      if (j.contains("bias")) {
        const auto b = j.at("bias").get<std::vector<double>>();
        head.bias = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
      } else {
        head.bias = Vector::Zero(head.weight.rows());
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  } else {
    head.weight = to_matrix(parse_rows(text));
    head.bias = Vector::Zero(head.weight.rows());
  }
  head.validate();
  return head;
}

}  // namespace lgeo::cli
