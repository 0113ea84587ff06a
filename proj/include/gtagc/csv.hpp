// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gtagc {

/// %g-style text with 6 significant digits.
std::string format_number(double v);

using CsvRow = std::vector<std::string>;

/// Header row, comma separated, LF line endings. Fields are written as given.
void write_csv(const std::filesystem::path& path, const CsvRow& header, const std::vector<CsvRow>& rows);

/// Reads a file written by write_csv (no quoting support); first row is the header.
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

}  // namespace gtagc
