#ifndef DIALECTMT_TEXT_UTIL_HPP
#define DIALECTMT_TEXT_UTIL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dialectmt {

// Raised for malformed or inconsistent data (bad files, mismatched
// dimensions, invalid tokens).  The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Split on runs of ASCII whitespace; no empty fields.
std::vector<std::string> split_ws(std::string_view text);

// Split on a single-character delimiter; keeps empty fields.
std::vector<std::string> split_char(std::string_view text, char delim);

// Split on a multi-character separator such as " ||| "; keeps empty fields.
std::vector<std::string> split_sep(std::string_view text, std::string_view sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string strip(std::string_view text);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

// Returns false and sets *bad_offset to the first offending byte when the
// input is not well-formed UTF-8.
bool validate_utf8(std::string_view text, std::size_t* bad_offset);

// Decodes the codepoint starting at `pos` and advances `pos` past it.
// Input must be valid UTF-8.
char32_t decode_utf8(std::string_view text, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

}  // namespace dialectmt

#endif
