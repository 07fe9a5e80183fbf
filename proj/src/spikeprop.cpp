#include "spikerobust/spikeprop.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "spikerobust/error.hpp"
#include "spikerobust/simulate.hpp"

namespace spikerobust {

void TrainConfig::validate() const {
  check(eta > 0.0, ErrorCode::kConfigError, "eta must be > 0");
  check(max_epochs >= 1, ErrorCode::kConfigError, "max_epochs must be >= 1");
  check(denominator_floor > 0.0, ErrorCode::kConfigError,
        "denominator_floor must be > 0");
  check(boost_factor >= 1.0, ErrorCode::kConfigError, "boost_factor must be >= 1");
  check(target_error >= 0.0, ErrorCode::kConfigError, "target_error must be >= 0");
}

double sse_error(std::span<const double> actual, std::span<const double> desired) {
  check(actual.size() == desired.size(), ErrorCode::kTopologyMismatch,
        "output and desired sizes differ");
  double error = 0.0;
  for (std::size_t j = 0; j < actual.size(); ++j) {
    if (!fired(actual[j])) {
      throw Error(ErrorCode::kNonFiringOutput,
                  "output neuron " + std::to_string(j) + " did not fire");
    }
    const double diff = actual[j] - desired[j];
    error += diff * diff;
  }
  return 0.5 * error;
}

double clamp_denominator(double denominator, double floor) {
  if (std::abs(denominator) >= floor) return denominator;
  return std::signbit(denominator) ? -floor : floor;
}

double potential_slope(const NetworkTopology& net, const SpikeSchedule& schedule,
                       std::size_t layer, std::size_t j) {
  const double t_j = schedule.at(layer, j);
  const SynapseArray& syn = net.synapses[layer - 1];
  const auto& presyn = schedule.layers[layer - 1];
  double slope = 0.0;
  for (std::size_t i = 0; i < syn.pre_size(); ++i) {
    if (!fired(presyn[i])) continue;
    const auto weights = syn.connection(i, j);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      slope += weights[k] *
               spike_response_derivative(t_j - presyn[i] - net.delays[k], net.kernel);
    }
  }
  return slope;
}

double output_delta(const NetworkTopology& net, const SpikeSchedule& schedule,
                    std::size_t j, double desired_time, double denominator_floor) {
  const std::size_t layer = net.num_layers() - 1;
  const double t_j = schedule.at(layer, j);
  if (!fired(t_j)) return 0.0;
  const double numerator = desired_time - t_j;
  if (numerator == 0.0) return 0.0;
  return numerator /
         clamp_denominator(potential_slope(net, schedule, layer, j), denominator_floor);
}

double hidden_delta(const NetworkTopology& net, const SpikeSchedule& schedule,
                    std::size_t layer, std::size_t i,
                    std::span<const double> downstream_deltas,
                    double denominator_floor) {
  const double t_i = schedule.at(layer, i);
  if (!fired(t_i)) return 0.0;
  const SynapseArray& out = net.synapses[layer];
  const auto& post_times = schedule.layers[layer + 1];
  double numerator = 0.0;
  for (std::size_t j = 0; j < out.post_size(); ++j) {
    const double delta_j = downstream_deltas[j];
    if (delta_j == 0.0 || !fired(post_times[j])) continue;
    const auto weights = out.connection(i, j);
    double sum = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      sum += weights[k] *
             spike_response_derivative(post_times[j] - t_i - net.delays[k], net.kernel);
    }
    numerator += delta_j * sum;
  }
  if (numerator == 0.0) return 0.0;
  return numerator /
         clamp_denominator(potential_slope(net, schedule, layer, i), denominator_floor);
}

Deltas compute_deltas(const NetworkTopology& net, const SpikeSchedule& schedule,
                      std::span<const double> desired, double denominator_floor) {
  check(desired.size() == net.output_size(), ErrorCode::kTopologyMismatch,
        "desired output size does not match output layer");
  const std::size_t last = net.num_layers() - 1;
  Deltas deltas;
  deltas.layers.resize(net.num_layers());
  deltas.layers[last].resize(net.output_size());
  for (std::size_t j = 0; j < net.output_size(); ++j) {
    deltas.layers[last][j] = output_delta(net, schedule, j, desired[j], denominator_floor);
  }
  for (std::size_t l = last - 1; l >= 1; --l) {
    deltas.layers[l].resize(net.layer_sizes[l]);
    for (std::size_t i = 0; i < net.layer_sizes[l]; ++i) {
      deltas.layers[l][i] =
          hidden_delta(net, schedule, l, i, deltas.layers[l + 1], denominator_floor);
    }
  }
  return deltas;
}

void apply_updates(NetworkTopology& net, const Deltas& deltas,
                   const SpikeSchedule& schedule, double eta) {
  if (eta == 0.0) return;
  for (std::size_t l = 1; l < net.num_layers(); ++l) {
    SynapseArray& syn = net.synapses[l - 1];
    const auto& presyn = schedule.layers[l - 1];
    for (std::size_t j = 0; j < syn.post_size(); ++j) {
      const double delta = deltas.layers[l][j];
      const double t_j = schedule.at(l, j);
      if (delta == 0.0 || !fired(t_j)) continue;
      const double scale = -eta * delta;
      for (std::size_t i = 0; i < syn.pre_size(); ++i) {
        if (!fired(presyn[i])) continue;
        auto weights = syn.connection(i, j);
        for (std::size_t k = 0; k < weights.size(); ++k) {
          const double y = spike_response(t_j - presyn[i] - net.delays[k], net.kernel);
          if (y != 0.0) weights[k] += scale * y;
        }
      }
    }
  }
  net.clamp_inhibitory();
}

SpikePropTrainer::SpikePropTrainer(NetworkTopology& net, TrainConfig config,
                                   std::uint64_t seed)
    : net_(net), config_(config), rng_(make_rng(seed, 0x5eed)) {
  config_.validate();
  net_.validate();
}

bool SpikePropTrainer::boost_silent(const SpikeSchedule& schedule) {
  bool any = false;
  for (std::size_t l = 1; l < net_.num_layers(); ++l) {
    SynapseArray& syn = net_.synapses[l - 1];
    for (std::size_t j = 0; j < syn.post_size(); ++j) {
      if (fired(schedule.at(l, j))) continue;
      any = true;
      for (std::size_t i = 0; i < syn.pre_size(); ++i) {
        for (double& w : syn.connection(i, j)) {
          if (w > 0.0) w *= config_.boost_factor;
        }
      }
    }
  }
  return any;
}

double SpikePropTrainer::step(const EncodedSample& sample) {
  check(sample.inputs.size() == net_.input_size() &&
            sample.desired.size() == net_.output_size(),
        ErrorCode::kTopologyMismatch, "sample does not match network topology");
  SpikeSchedule schedule = simulate_forward(net_, sample.inputs);
  const auto silent_output = [&] {
    for (double t : schedule.outputs()) {
      if (!fired(t)) return true;
    }
    return false;
  };
  if (silent_output()) {
    boost_silent(schedule);
    ++epoch_boosted_;
    schedule = simulate_forward(net_, sample.inputs);
    if (silent_output()) {
      ++epoch_silent_;
      return -1.0;
    }
  }
  const double error = sse_error(schedule.outputs(), sample.desired);
  if (error == 0.0) return 0.0;
  const Deltas deltas =
      compute_deltas(net_, schedule, sample.desired, config_.denominator_floor);
  apply_updates(net_, deltas, schedule, config_.eta);
  return error;
}

double SpikePropTrainer::run_epoch(std::span<const EncodedSample> dataset) {
  check(!dataset.empty(), ErrorCode::kEmptyDataset, "training set is empty");
  if (order_.size() != dataset.size()) {
    order_.resize(dataset.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }
  if (config_.shuffle_each_epoch) shuffle(order_.begin(), order_.end(), rng_);
  epoch_boosted_ = 0;
  epoch_silent_ = 0;
  double total = 0.0;
  for (std::size_t index : order_) {
    const double error = step(dataset[index]);
    if (error > 0.0) total += error;
  }
  trace_.epoch_error.push_back(total);
  trace_.non_firing.push_back(epoch_silent_);
  trace_.boosted.push_back(epoch_boosted_);
  return total;
}

TrainTrace train(NetworkTopology& net, std::span<const EncodedSample> dataset,
                 const TrainConfig& config, std::uint64_t seed) {
  check(!dataset.empty(), ErrorCode::kEmptyDataset, "training set is empty");
  for (const EncodedSample& sample : dataset) {
    check(sample.inputs.size() == net.input_size() &&
              sample.desired.size() == net.output_size(),
          ErrorCode::kTopologyMismatch, "sample does not match network topology");
  }
  double initial = 0.0;
  bool all_fired = true;
  for (const EncodedSample& sample : dataset) {
    const SpikeSchedule schedule = simulate_forward(net, sample.inputs);
    for (double t : schedule.outputs()) all_fired = all_fired && fired(t);
    if (!all_fired) break;
    initial += sse_error(schedule.outputs(), sample.desired);
  }
  if (all_fired && initial <= config.target_error) return {};

  SpikePropTrainer trainer(net, config, seed);
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double error = trainer.run_epoch(dataset);
    if (error <= config.target_error && trainer.trace().non_firing.back() == 0) break;
  }
  return trainer.trace();
}

void write_trace(const TrainTrace& trace, std::ostream& out) {
  out << "# epoch error_ms2\n";
  for (std::size_t e = 0; e < trace.epoch_error.size(); ++e) {
    out << (e + 1) << ' ' << trace.epoch_error[e] << '\n';
  }
}

}  // namespace spikerobust
