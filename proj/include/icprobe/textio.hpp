#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace icprobe::textio {

std::string_view Trim(std::string_view s);
std::string ToLower(std::string_view s);
std::vector<std::string> SplitWhitespace(std::string_view s);

// One RFC 4180 record that fits on a single line. Throws std::invalid_argument
// on an unterminated quote.
std::vector<std::string> ParseCsvLine(std::string_view line);
std::string CsvEscape(std::string_view field);
std::string CsvJoin(const std::vector<std::string>& fields);

// Shortest representation that round-trips, locale independent.
std::string FormatDouble(double value);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

// Lines without terminators; a trailing '\r' is stripped.
std::vector<std::string> SplitLines(std::string_view text);

}  // namespace icprobe::textio
