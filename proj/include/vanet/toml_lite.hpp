#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace vanet::toml {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// The subset of TOML a config file needs: tables, dotted keys, basic and literal
// strings, integers, floats, booleans, arrays and inline tables. No dates, no
// multi-line strings, no arrays of tables.
nlohmann::json parse(std::string_view text);

// Writes nested objects as [tables]; scalars and arrays inline.
std::string dump(const nlohmann::json& doc);

}  // namespace vanet::toml
