#pragma once

#include <cstddef>
#include <vector>

namespace spikerobust {

// One temporally coded pattern: input spike times (kNonFiring allowed),
// desired output spike times and the class it belongs to.
struct EncodedSample {
  std::vector<double> inputs;
  std::vector<double> desired;
  std::size_t label = 0;

  friend bool operator==(const EncodedSample&, const EncodedSample&) = default;
};

}  // namespace spikerobust
