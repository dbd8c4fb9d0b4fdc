#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nvx/error.hpp"

namespace nvx {

// One meaningful line of a structured-text document: whitespace-split
// tokens, with the original line number for diagnostics. All document
// formats share the same lexical layer (UTF-8, line-based, `#` comments,
// blank lines ignored).
struct Line {
  int number = 0;
  std::vector<std::string> tokens;

  const std::string& tok(size_t i) const { return tokens[i]; }
  size_t size() const { return tokens.size(); }
};

std::vector<Line> scan_lines(std::string_view text);

// Errors carry the line number. A value that parses as a negative integer
// reports NegativeCost rather than plain Syntax.
std::uint64_t parse_cost(const Line& line, const std::string& token);
std::uint64_t parse_u64(const Line& line, const std::string& token);
std::int64_t parse_i64(const Line& line, const std::string& token);
std::uint64_t parse_hex16(const Line& line, const std::string& token);

[[noreturn]] void syntax_error(const Line& line, const std::string& what);
[[noreturn]] void fail_at(ErrorCode code, const Line& line, const std::string& what);

// Checks the `<name>-version 1` header on the first meaningful line.
void expect_version_header(const std::vector<Line>& lines, const std::string& name);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace nvx
