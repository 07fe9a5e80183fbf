#include "spikerobust/network.hpp"

#include <algorithm>
#include <string>

#include "spikerobust/error.hpp"
#include "spikerobust/random.hpp"

namespace spikerobust {

void KernelParams::validate() const {
  check(tau > 0.0, ErrorCode::kTopologyMismatch, "kernel tau must be > 0");
}

SynapseArray::SynapseArray(std::size_t pre_size, std::size_t post_size,
                           std::size_t terminals)
    : pre_size_(pre_size),
      post_size_(post_size),
      terminals_(terminals),
      weights_(pre_size * post_size * terminals, 0.0) {}

void NetworkTopology::validate() const {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kTopologyMismatch, what);
  };
  kernel.validate();
  if (layer_sizes.size() < 3) fail("need at least input, hidden and output layers");
  for (std::size_t size : layer_sizes) {
    if (size == 0) fail("empty layer");
  }
  if (delays.empty()) fail("need at least one synaptic terminal");
  for (std::size_t k = 1; k < delays.size(); ++k) {
    if (!(delays[k] > delays[k - 1])) fail("delays must be strictly increasing");
  }
  if (delays.front() < 0.0) fail("delays must be non-negative");
  if (!(dt > 0.0 && dt <= 0.1)) fail("dt must lie in (0, 0.1]");
  if (!(t_max > delays.back())) fail("t_max must exceed the largest delay");
  if (neurons.size() != layer_sizes.size()) fail("neuron table does not match layers");
  for (std::size_t l = 0; l < layer_sizes.size(); ++l) {
    if (neurons[l].size() != layer_sizes[l]) fail("neuron table does not match layer size");
    if (l == 0) continue;
    for (const NeuronParams& p : neurons[l]) {
      if (!(p.threshold > 0.0)) fail("thresholds must be > 0");
    }
  }
  if (synapses.size() + 1 != layer_sizes.size()) fail("synapse table does not match layers");
  for (std::size_t l = 0; l < synapses.size(); ++l) {
    const SynapseArray& syn = synapses[l];
    if (syn.pre_size() != layer_sizes[l] || syn.post_size() != layer_sizes[l + 1] ||
        syn.terminals() != delays.size()) {
      fail("synapse array " + std::to_string(l) + " has the wrong shape");
    }
  }
}

void NetworkTopology::clamp_inhibitory() {
  for (std::size_t l = 0; l < synapses.size(); ++l) {
    SynapseArray& syn = synapses[l];
    for (std::size_t i = 0; i < syn.pre_size(); ++i) {
      if (!neurons[l][i].is_inhibitory) continue;
      for (std::size_t j = 0; j < syn.post_size(); ++j) {
        for (double& w : syn.connection(i, j)) w = std::min(w, 0.0);
      }
    }
  }
}

std::vector<double> unit_delays(std::size_t terminals) {
  std::vector<double> delays(terminals);
  for (std::size_t k = 0; k < terminals; ++k) delays[k] = static_cast<double>(k + 1);
  return delays;
}

NetworkTopology make_network(std::span<const std::size_t> layer_sizes,
                             std::vector<double> delays, KernelParams kernel,
                             double threshold, double dt, double t_max) {
  NetworkTopology net;
  net.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  net.delays = std::move(delays);
  net.kernel = kernel;
  net.dt = dt;
  net.t_max = t_max;
  for (std::size_t size : net.layer_sizes) {
    net.neurons.emplace_back(size, NeuronParams{threshold, false});
  }
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    net.synapses.emplace_back(net.layer_sizes[l], net.layer_sizes[l + 1],
                              net.delays.size());
  }
  net.validate();
  return net;
}

void initialize_weights(NetworkTopology& net, const WeightInit& init,
                        std::mt19937_64& rng) {
  const double m = static_cast<double>(net.terminals());
  for (std::size_t l = 0; l < net.synapses.size(); ++l) {
    SynapseArray& syn = net.synapses[l];
    const double scale = 1.0 / (m * static_cast<double>(syn.pre_size()));
    for (std::size_t i = 0; i < syn.pre_size(); ++i) {
      const bool inhibitory = net.neurons[l][i].is_inhibitory;
      for (std::size_t j = 0; j < syn.post_size(); ++j) {
        for (double& w : syn.connection(i, j)) {
          w = uniform(rng, init.low, init.high) * scale;
          if (inhibitory) w = -w;
        }
      }
    }
  }
}

}  // namespace spikerobust
