#pragma once

#include "ngl/graph_core.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ngl {

enum class Orientation { RowsAreVariables, RowsAreObservations };

Orientation parse_orientation(std::string_view name);

/// Reads a numeric CSV into a p x n matrix (variables x observations).
///
/// A first row that does not parse as numbers is taken as a header. Empty
/// fields, NA and NaN are rejected with their line and column; so is any
/// row whose width differs from the first data row.
Matrix read_matrix_csv(std::istream &in, Orientation orientation);
Matrix read_matrix_csv(const std::string &path, Orientation orientation);

/// Splits one CSV line on commas, trimming surrounding whitespace.
std::vector<std::string> split_csv_line(std::string_view line);

} // namespace ngl
