#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "spikerobust/encoding.hpp"
#include "spikerobust/network.hpp"

namespace spikerobust {

// Checkpoint file, version 1:
//
//   # comment lines
//   format=spikerobust-network
//   version=1
//   layers=3,5,1
//   delays=1,2,...,16
//   kernel.tau=7
//   sim.dt=0.01
//   sim.t_max=50
//   thresholds.<layer>=<one value per neuron>      (layers 1..L-1)
//   inhibitory.<layer>=<comma separated indices>   (omitted if none)
//   encoder.*=...                                  (optional coder params)
//   [weights]
//   synapse <l> <pre> <post> <m>
//   <m weights of pre 0 -> post 0>
//   <m weights of pre 0 -> post 1>
//   ...
//
// Header keys are sorted. Weight rows follow row-major (i, j, k) order and
// carry 9 significant digits.
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  NetworkTopology network;
  std::optional<FeatureEncoder> encoder;
};

void write_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace spikerobust
