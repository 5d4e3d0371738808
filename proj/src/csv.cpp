#include "ngl/csv.hpp"
#include "ngl/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace ngl {

Orientation parse_orientation(std::string_view name) {
  if (name == "rows-are-variables")
    return Orientation::RowsAreVariables;
  if (name == "rows-are-observations")
    return Orientation::RowsAreObservations;
  throw ArgumentError("unknown orientation '" + std::string(name) +
                      "' (expected rows-are-variables or rows-are-observations)");
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  auto trim = [](std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos)
      return std::string_view{};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
  };
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return fields;
}

namespace {

std::optional<double> parse_number(std::string_view s) {
  if (s.empty())
    return std::nullopt;
  if (s.front() == '+')
    s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

bool is_missing(std::string_view s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "null";
}

} // namespace

Matrix read_matrix_csv(std::istream &in, Orientation orientation) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_checked = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const auto fields = split_csv_line(line);

    if (!header_checked) {
      header_checked = true;
      bool numeric = true;
      for (const auto &f : fields)
        numeric = numeric && (parse_number(f) || is_missing(f));
      if (!numeric)
        continue;
    }

    if (width == 0)
      width = fields.size();
    if (fields.size() != width) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << width << " fields, found " << fields.size();
      throw DataError(msg.str());
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (is_missing(fields[c])) {
        std::ostringstream msg;
        msg << "line " << line_no << ", column " << c + 1
            << ": missing value (impute before fitting)";
        throw DataError(msg.str());
      }
      const auto v = parse_number(fields[c]);
      if (!v) {
        std::ostringstream msg;
        msg << "line " << line_no << ", column " << c + 1 << ": cannot parse '" << fields[c]
            << "' as a number";
        throw DataError(msg.str());
      }
      row[c] = *v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw DataError("CSV contains no data rows");

  const auto n_rows = static_cast<Index>(rows.size());
  const auto n_cols = static_cast<Index>(width);
  Matrix M(n_rows, n_cols);
  for (Index r = 0; r < n_rows; ++r)
    for (Index c = 0; c < n_cols; ++c)
      M(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  if (orientation == Orientation::RowsAreObservations)
    M.transposeInPlace();
  return M;
}

Matrix read_matrix_csv(const std::string &path, Orientation orientation) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open '" + path + "'");
  return read_matrix_csv(in, orientation);
}

} // namespace ngl
