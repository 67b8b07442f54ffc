#include "robust_mean/points_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "robust_mean/errors.hpp"

namespace robust_mean {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  if (s.empty()) {
    return false;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) {
    throw std::runtime_error("format_double: buffer too small");
  }
  return std::string(buf, ptr);
}

PointSet read_points_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t d = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto cells = split(line);
    std::vector<double> parsed(cells.size());
    std::size_t bad_column = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], parsed[c])) {
        bad_column = c + 1;
        break;
      }
    }
    if (first_content) {
      first_content = false;
      d = cells.size();
      if (bad_column != 0) {
        continue;  // header
      }
    }
    if (cells.size() != d) {
      throw ParseError("expected " + std::to_string(d) + " columns, found " + std::to_string(cells.size()),
                       line_no, 0);
    }
    if (bad_column != 0) {
      throw ParseError("not a number: '" + std::string(cells[bad_column - 1]) + "'", line_no, bad_column);
    }
    for (std::size_t c = 0; c < d; ++c) {
      if (!std::isfinite(parsed[c])) {
        throw ParseError("non-finite value", line_no, c + 1);
      }
    }
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (rows == 0) {
    throw ParseError("no data rows", line_no, 0);
  }
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  std::copy(values.begin(), values.end(), m.data());
  return PointSet(std::move(m));
}

PointSet read_points_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'", 0, 0);
  }
  return read_points_csv(in);
}

void write_points_csv(const PointSet& points, std::ostream& out) {
  for (std::size_t j = 0; j < points.d(); ++j) {
    out << (j ? "," : "") << 'x' << (j + 1);
  }
  out << '\n';
  const RowMatrix& x = points.data();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out << (j ? "," : "") << format_double(x(i, j));
    }
    out << '\n';
  }
}

void write_points_csv_file(const PointSet& points, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  write_points_csv(points, out);
}

}  // namespace robust_mean
