#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "spikerobust/network.hpp"
#include "spikerobust/random.hpp"
#include "spikerobust/sample.hpp"

namespace spikerobust {

struct TrainConfig {
  double eta = 0.01;
  std::size_t max_epochs = 500;
  bool shuffle_each_epoch = true;
  // Training stops once an epoch's summed error is at or below this (ms^2).
  double target_error = 1.0;
  // Lower bound on |sum w dy/dt| in the delta denominators.
  double denominator_floor = 0.1;
  // Multiplier applied to positive incoming weights of a silent neuron.
  double boost_factor = 1.05;

  void validate() const;
};

struct TrainTrace {
  std::vector<double> epoch_error;
  // Samples whose output stayed silent even after the weight boost.
  std::vector<std::size_t> non_firing;
  // Samples that needed a boost before the output fired.
  std::vector<std::size_t> boosted;

  std::size_t epochs() const { return epoch_error.size(); }
};

// 0.5 * sum_j (t_j - t_j^d)^2. Throws kNonFiringOutput if any output is silent.
double sse_error(std::span<const double> actual, std::span<const double> desired);

// Sign-preserving floor on |denominator|; zero maps to +floor.
double clamp_denominator(double denominator, double floor);

// sum_i sum_k w_ij^k * eps'(t_j - t_i - d_k) for neuron j of `layer`, i.e. the
// slope of its potential at its firing time.
double potential_slope(const NetworkTopology& net, const SpikeSchedule& schedule,
                       std::size_t layer, std::size_t j);

// (t_j^d - t_j) / clamp(slope). Zero if the neuron did not fire.
double output_delta(const NetworkTopology& net, const SpikeSchedule& schedule,
                    std::size_t j, double desired_time, double denominator_floor);

// Backpropagated delta of neuron i in hidden `layer` given the deltas of
// layer + 1. Zero if neuron i did not fire.
double hidden_delta(const NetworkTopology& net, const SpikeSchedule& schedule,
                    std::size_t layer, std::size_t i,
                    std::span<const double> downstream_deltas,
                    double denominator_floor);

// deltas[l] holds one value per neuron of layer l; deltas[0] is empty.
struct Deltas {
  std::vector<std::vector<double>> layers;
};

Deltas compute_deltas(const NetworkTopology& net, const SpikeSchedule& schedule,
                      std::span<const double> desired, double denominator_floor);

// w += -eta * y_i^k(t_j) * delta_j for every fired postsynaptic neuron, then
// re-clamps inhibitory weights. All deltas must come from the pre-update net.
void apply_updates(NetworkTopology& net, const Deltas& deltas,
                   const SpikeSchedule& schedule, double eta);

// Online SpikeProp over a dataset, one epoch at a time. Keeps its own RNG so a
// run can be paused at epoch milestones and resumed without changing results.
class SpikePropTrainer {
 public:
  SpikePropTrainer(NetworkTopology& net, TrainConfig config, std::uint64_t seed);

  // One pass over `dataset`; returns the epoch's summed error over samples
  // whose outputs fired.
  double run_epoch(std::span<const EncodedSample> dataset);

  // Forward pass, delta computation and update for a single sample. Returns
  // the sample error, or a negative value if the output stayed silent.
  double step(const EncodedSample& sample);

  const TrainTrace& trace() const { return trace_; }
  // Presentation order of the most recent epoch.
  const std::vector<std::size_t>& order() const { return order_; }

 private:
  bool boost_silent(const SpikeSchedule& schedule);

  NetworkTopology& net_;
  TrainConfig config_;
  Rng rng_;
  std::vector<std::size_t> order_;
  TrainTrace trace_;
  std::size_t epoch_boosted_ = 0;
  std::size_t epoch_silent_ = 0;
};

// Trains until max_epochs or until an epoch error <= target_error. The error
// of the untrained network is checked first, so a network that already meets
// the target is returned unchanged with an empty trace.
TrainTrace train(NetworkTopology& net, std::span<const EncodedSample> dataset,
                 const TrainConfig& config, std::uint64_t seed);

// Two columns: epoch (1-based) and summed error.
void write_trace(const TrainTrace& trace, std::ostream& out);

}  // namespace spikerobust
