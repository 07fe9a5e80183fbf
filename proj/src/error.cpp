#include "spikerobust/error.hpp"

namespace spikerobust {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedInput: return "MALFORMED_INPUT";
    case ErrorCode::kTopologyMismatch: return "TOPOLOGY_MISMATCH";
    case ErrorCode::kNonFiringOutput: return "NON_FIRING_OUTPUT";
    case ErrorCode::kIoError: return "IO_ERROR";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kEmptyDataset: return "EMPTY_DATASET";
    case ErrorCode::kMalformedCase: return "MALFORMED_CASE";
    case ErrorCode::kClassTooSmall: return "CLASS_TOO_SMALL";
    case ErrorCode::kMissingDataset: return "MISSING_DATASET";
    case ErrorCode::kConfigError: return "CONFIG_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace spikerobust
