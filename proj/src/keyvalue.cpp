#include "spikerobust/keyvalue.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>

#include "spikerobust/error.hpp"

namespace spikerobust {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, const char* what) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kConfigError,
                std::string("cannot parse ") + what + " from '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  text = trim(text);
  if (text.empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    parts.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace

KeyValues read_key_values(std::istream& in, std::string_view stop) {
  KeyValues kv;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view view = trim(line);
    if (!stop.empty() && view == stop) break;
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(ErrorCode::kParseError, "expected key=value", number);
    }
    kv[std::string(trim(view.substr(0, eq)))] = std::string(trim(view.substr(eq + 1)));
  }
  return kv;
}

void write_key_values(const KeyValues& kv, std::ostream& out) {
  for (const auto& [key, value] : kv) out << key << '=' << value << '\n';
}

std::string format_double(double value, int significant_digits) {
  char buffer[64];
  if (significant_digits <= 0) {
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
  }
  std::snprintf(buffer, sizeof buffer, "%.*g", significant_digits, value);
  return buffer;
}

std::string join_doubles(const std::vector<double>& values, int significant_digits) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i], significant_digits);
  }
  return out;
}

double parse_double(std::string_view text) {
  return parse_number<double>(text, "number");
}

std::size_t parse_size(std::string_view text) {
  return parse_number<std::size_t>(text, "count");
}

std::uint64_t parse_u64(std::string_view text) {
  return parse_number<std::uint64_t>(text, "integer");
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw Error(ErrorCode::kConfigError, "cannot parse flag from '" + std::string(text) + "'");
}

std::vector<double> parse_doubles(std::string_view text) {
  std::vector<double> values;
  for (std::string_view part : split_commas(text)) values.push_back(parse_double(part));
  return values;
}

std::vector<std::size_t> parse_sizes(std::string_view text) {
  std::vector<std::size_t> values;
  for (std::string_view part : split_commas(text)) values.push_back(parse_size(part));
  return values;
}

const std::string& require(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorCode::kConfigError, "missing key '" + key + "'");
  return it->second;
}

}  // namespace spikerobust
