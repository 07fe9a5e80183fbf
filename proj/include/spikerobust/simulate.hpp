#pragma once

#include <cstddef>
#include <span>

#include "spikerobust/network.hpp"

namespace spikerobust {

// Potential of postsynaptic neuron `post` at time t: the sum over presynaptic
// neurons i and terminals k of w[i][post][k] * eps(t - t_i - d_k). Silent
// presynaptic neurons contribute nothing.
double membrane_potential(const SynapseArray& syn, std::size_t post, double t,
                          std::span<const double> presyn_times,
                          std::span<const double> delays,
                          const KernelParams& kernel);

// Number of grid points 0, dt, ..., T_max (inclusive).
std::size_t grid_points(const NetworkTopology& net);

// Evaluates the network layer by layer. Each non-input neuron fires at the
// first grid time t = n * dt whose potential reaches its threshold, or stays
// silent. Throws kMalformedInput if the input size does not match the input
// layer or an input time lies outside [0, T_max].
SpikeSchedule simulate_forward(const NetworkTopology& net,
                               std::span<const double> input);

}  // namespace spikerobust
