#pragma once

#include <iosfwd>
#include <string>

#include "robust_mean/types.hpp"

namespace robust_mean {

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

// Comma-separated rows of numbers. The first row is treated as a header iff
// one of its cells is not a number. Throws ParseError with 1-based positions.
PointSet read_points_csv(std::istream& in);
PointSet read_points_csv_file(const std::string& path);

// Header x1..xd, one row per point.
void write_points_csv(const PointSet& points, std::ostream& out);
void write_points_csv_file(const PointSet& points, const std::string& path);

}  // namespace robust_mean
