#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace spikerobust {

// Flat "key=value" text used by configs and checkpoints. Blank lines and lines
// starting with '#' are ignored; keys may contain dots (topology.m=16).
using KeyValues = std::map<std::string, std::string>;

// Reads key=value lines until EOF or until a line equal to `stop` (which is
// consumed). Throws kParseError with the line number on a malformed line.
KeyValues read_key_values(std::istream& in, std::string_view stop = {});
void write_key_values(const KeyValues& kv, std::ostream& out);

// significant_digits <= 0 gives the shortest text that reads back exactly.
std::string format_double(double value, int significant_digits = 0);
std::string join_doubles(const std::vector<double>& values, int significant_digits = 0);

double parse_double(std::string_view text);
std::size_t parse_size(std::string_view text);
std::uint64_t parse_u64(std::string_view text);
bool parse_bool(std::string_view text);
std::vector<double> parse_doubles(std::string_view text);
std::vector<std::size_t> parse_sizes(std::string_view text);

// Lookup helpers throwing kConfigError on a missing key.
const std::string& require(const KeyValues& kv, const std::string& key);

}  // namespace spikerobust
