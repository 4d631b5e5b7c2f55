#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mtrend/stochastic.hpp"

namespace mtrend::cli {

struct CsvOptions {
  /// Header name or 1-based index of the value column; the last column if unset.
  std::optional<std::string> column;
  /// Force header handling; unset means a non-numeric first row is a header.
  std::optional<bool> header;
};

/// Reads one numeric column. Blank lines and lines starting with '#' are
/// skipped; CRLF is accepted. When the value column is not the first, the
/// first column supplies labels. Errors name the source and the line.
TimeSeries read_series_csv(std::istream& in, const CsvOptions& opts,
                           const std::string& source = "<input>");
TimeSeries read_series_csv(const std::filesystem::path& path, const CsvOptions& opts);

}  // namespace mtrend::cli
