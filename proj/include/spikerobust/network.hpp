#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "spikerobust/kernel.hpp"

namespace spikerobust {

// Marker for a neuron that produced no spike during a presentation.
inline constexpr double kNonFiring = std::numeric_limits<double>::infinity();

inline bool fired(double t) { return std::isfinite(t); }

struct NeuronParams {
  double threshold = 1.0;
  // Outgoing weights of an inhibitory neuron are kept <= 0.
  bool is_inhibitory = false;

  friend bool operator==(const NeuronParams&, const NeuronParams&) = default;
};

// Multi-terminal weights between two adjacent layers, stored row-major as
// weight[pre][post][terminal].
class SynapseArray {
 public:
  SynapseArray() = default;
  SynapseArray(std::size_t pre_size, std::size_t post_size,
               std::size_t terminals);

  std::size_t pre_size() const { return pre_size_; }
  std::size_t post_size() const { return post_size_; }
  std::size_t terminals() const { return terminals_; }

  double& weight(std::size_t pre, std::size_t post, std::size_t terminal) {
    return weights_[index(pre, post, terminal)];
  }
  double weight(std::size_t pre, std::size_t post,
                std::size_t terminal) const {
    return weights_[index(pre, post, terminal)];
  }

  // All terminal weights of the pre -> post connection.
  std::span<double> connection(std::size_t pre, std::size_t post) {
    return {weights_.data() + index(pre, post, 0), terminals_};
  }
  std::span<const double> connection(std::size_t pre, std::size_t post) const {
    return {weights_.data() + index(pre, post, 0), terminals_};
  }

  std::span<double> flat() { return weights_; }
  std::span<const double> flat() const { return weights_; }

  friend bool operator==(const SynapseArray&, const SynapseArray&) = default;

 private:
  std::size_t index(std::size_t pre, std::size_t post,
                    std::size_t terminal) const {
    return (pre * post_size_ + post) * terminals_ + terminal;
  }

  std::size_t pre_size_ = 0;
  std::size_t post_size_ = 0;
  std::size_t terminals_ = 0;
  std::vector<double> weights_;
};

// Firing time of every neuron for one presentation, grouped by layer.
struct SpikeSchedule {
  std::vector<std::vector<double>> layers;

  double at(std::size_t layer, std::size_t neuron) const {
    return layers.at(layer).at(neuron);
  }
  std::span<const double> outputs() const { return layers.back(); }

  friend bool operator==(const SpikeSchedule&, const SpikeSchedule&) = default;
};

struct NetworkTopology {
  std::vector<std::size_t> layer_sizes;
  // neurons[layer][index]; entries for the input layer are ignored.
  std::vector<std::vector<NeuronParams>> neurons;
  // synapses[l] connects layer l to layer l + 1.
  std::vector<SynapseArray> synapses;
  // Terminal delays in ms, strictly increasing and shared by all connections.
  std::vector<double> delays;
  KernelParams kernel;
  double dt = 0.01;
  double t_max = 50.0;

  std::size_t num_layers() const { return layer_sizes.size(); }
  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  std::size_t terminals() const { return delays.size(); }

  // Throws ErrorCode::kTopologyMismatch when an invariant is violated.
  void validate() const;

  // Forces outgoing weights of inhibitory neurons to be non-positive.
  void clamp_inhibitory();

  friend bool operator==(const NetworkTopology&,
                         const NetworkTopology&) = default;
};

// Delays 1, 2, ..., m ms.
std::vector<double> unit_delays(std::size_t terminals);

// Fully connected feed-forward network with zero weights.
NetworkTopology make_network(std::span<const std::size_t> layer_sizes,
                             std::vector<double> delays,
                             KernelParams kernel = {}, double threshold = 1.0,
                             double dt = 0.01, double t_max = 50.0);

struct WeightInit {
  // Each weight is drawn uniformly from [low, high] / (m * fan_in).
  double low = 1.0;
  double high = 10.0;
};

void initialize_weights(NetworkTopology& net, const WeightInit& init,
                        std::mt19937_64& rng);

}  // namespace spikerobust
