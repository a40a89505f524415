#pragma once

#include "ldscreen/dataset.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace ldscreen {

/// Parses the dense ARFF subset: `@relation`, `@attribute <name> {v1,...}`
/// or `numeric`/`real`/`integer`, `@data`, `?` for missing and `%`
/// comments. Keywords are case-insensitive; names and values may be
/// quoted with ' or ". The last declared categorical attribute becomes the
/// class. Throws ParseError carrying the offending line.
Dataset parse_arff(std::string_view text);

/// Writes `d` in the subset accepted by parse_arff. Numbers use the
/// shortest representation that reads back to the same double.
std::string write_arff(const Dataset& d);

/// Parses RFC-4180 CSV against a known schema. An empty cell or `?` is
/// missing. When `has_header` is set the header must name the schema's
/// attributes in order.
Dataset parse_csv(std::string_view text, const Schema& schema, bool has_header);

/// Parses CSV and infers the schema: a column is numeric when every
/// non-missing token is a number, otherwise categorical with its symbols in
/// first-appearance order. The last categorical column is the class.
Dataset parse_csv(std::string_view text, bool has_header);

std::string write_csv(const Dataset& d, bool header = true);

/// Whole-file read; throws Error when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace ldscreen
