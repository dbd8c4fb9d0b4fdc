#include "nvx/text.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "nvx/digest.hpp"

namespace nvx {

std::vector<Line> scan_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++number;

    size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);

    Line line;
    line.number = number;
    size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i > start) line.tokens.emplace_back(raw.substr(start, i - start));
    }
    if (!line.tokens.empty()) out.push_back(std::move(line));

    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

void syntax_error(const Line& line, const std::string& what) {
  fail_at(ErrorCode::Syntax, line, what);
}

void fail_at(ErrorCode code, const Line& line, const std::string& what) {
  throw Error(code, "line " + std::to_string(line.number) + ": " + what);
}

std::uint64_t parse_u64(const Line& line, const std::string& token) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    syntax_error(line, "expected unsigned integer, got '" + token + "'");
  }
  return value;
}

std::int64_t parse_i64(const Line& line, const std::string& token) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    syntax_error(line, "expected integer, got '" + token + "'");
  }
  return value;
}

std::uint64_t parse_cost(const Line& line, const std::string& token) {
  if (!token.empty() && token[0] == '-') {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec == std::errc{} && ptr == token.data() + token.size()) {
      throw Error(ErrorCode::NegativeCost,
                  "line " + std::to_string(line.number) + ": cost '" + token + "' is negative");
    }
  }
  return parse_u64(line, token);
}

std::uint64_t parse_hex16(const Line& line, const std::string& token) {
  if (token.size() != 16) syntax_error(line, "digest must be exactly 16 hex digits: '" + token + "'");
  std::uint64_t value = 0;
  for (char c : token) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else syntax_error(line, "digest must be lowercase hex: '" + token + "'");
    value = (value << 4) | static_cast<std::uint64_t>(d);
  }
  return value;
}

std::string to_hex16(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

void expect_version_header(const std::vector<Line>& lines, const std::string& name) {
  if (lines.empty()) {
    Line empty;
    empty.number = 1;
    syntax_error(empty, "empty document, expected '" + name + "-version 1'");
  }
  const Line& first = lines.front();
  if (first.size() != 2 || first.tok(0) != name + "-version" || first.tok(1) != "1") {
    syntax_error(first, "expected '" + name + "-version 1' header");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "short write to '" + path + "'");
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SYNTAX";
    case ErrorCode::DuplicateUnit: return "DUPLICATE_UNIT";
    case ErrorCode::NegativeCost: return "NEGATIVE_COST";
    case ErrorCode::MissingUnit: return "MISSING_UNIT";
    case ErrorCode::UnknownIdInConflict: return "UNKNOWN_ID_IN_CONFLICT";
    case ErrorCode::SelfConflict: return "SELF_CONFLICT";
    case ErrorCode::Infeasible: return "INFEASIBLE";
    case ErrorCode::TooLarge: return "TOO_LARGE";
    case ErrorCode::PlanMismatch: return "PLAN_MISMATCH";
    case ErrorCode::UncoveredUnit: return "UNCOVERED_UNIT";
    case ErrorCode::BadParams: return "BAD_PARAMS";
    case ErrorCode::DanglingFork: return "DANGLING_FORK";
    case ErrorCode::WindowViolation: return "WINDOW_VIOLATION";
    case ErrorCode::Config: return "CONFIG";
    case ErrorCode::Stall: return "STALL";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

}  // namespace nvx
