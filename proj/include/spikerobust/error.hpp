#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spikerobust {

enum class ErrorCode {
  kMalformedInput,
  kTopologyMismatch,
  kNonFiringOutput,
  kIoError,
  kParseError,
  kEmptyDataset,
  kMalformedCase,
  kClassTooSmall,
  kMissingDataset,
  kConfigError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  // PARSE_ERROR carries the 1-based line number of the offending row.
  Error(ErrorCode code, const std::string& what, std::size_t line)
      : std::runtime_error(std::string(to_string(code)) + " (line " +
                           std::to_string(line) + "): " + what),
        code_(code),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_ = 0;
};

inline void check(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace spikerobust
