#include "csv_input.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <vector>

#include "mtrend/errors.hpp"

namespace mtrend::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

struct Row {
  std::size_t line;
  std::vector<std::string> cells;
};

}  // namespace

TimeSeries read_series_csv(std::istream& in, const CsvOptions& opts, const std::string& source) {
  std::vector<Row> rows;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    rows.push_back({line_no, split(line)});
  }
  if (in.bad()) throw IoError(source + ": read failed");
  if (rows.empty()) throw std::invalid_argument(source + ": no data rows");

  const std::size_t width = rows.front().cells.size();
  std::vector<std::string> names;
  std::size_t col = width - 1;

  bool has_header = false;
  if (opts.header) {
    has_header = *opts.header;
  } else {
    for (const auto& cell : rows.front().cells) {
      if (!parse_number(cell)) has_header = true;
    }
    // A lone label column is not evidence of a header.
    if (has_header && width > 1) {
      bool numeric_tail = true;
      for (std::size_t c = 1; c < width; ++c) numeric_tail &= parse_number(rows.front().cells[c]).has_value();
      if (numeric_tail) has_header = false;
    }
  }
  if (has_header) names = rows.front().cells;

  if (opts.column) {
    const auto& want = *opts.column;
    const auto idx = parse_number(want);
    if (idx && *idx >= 1 && std::floor(*idx) == *idx && *idx <= static_cast<double>(width)) {
      col = static_cast<std::size_t>(*idx) - 1;
    } else {
      bool found = false;
      for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c] == want) {
          col = c;
          found = true;
          break;
        }
      }
      if (!found) throw std::invalid_argument("column: '" + want + "' not found in " + source);
    }
  }

  TimeSeries ts;
  const bool labelled = col != 0 && width > 1;
  for (std::size_t r = has_header ? 1 : 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto where = source + ": line " + std::to_string(row.line);
    if (row.cells.size() != width) {
      throw std::invalid_argument(where + ": expected " + std::to_string(width) + " fields, found " +
                                  std::to_string(row.cells.size()));
    }
    const auto v = parse_number(row.cells[col]);
    if (!v) throw std::invalid_argument(where + ": non-numeric value '" + row.cells[col] + "'");
    if (!std::isfinite(*v)) throw std::invalid_argument(where + ": value is not finite");
    ts.values.push_back(*v);
    if (labelled) ts.labels.push_back(row.cells.front());
  }
  if (ts.values.empty()) throw std::invalid_argument(source + ": no data rows");
  return ts;
}

TimeSeries read_series_csv(const std::filesystem::path& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_series_csv(in, opts, path.string());
}

}  // namespace mtrend::cli
