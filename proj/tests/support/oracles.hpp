#pragma once

// Reference implementations used only by tests. They favour obviousness over
// speed and share no code with the library's simulation or training paths
// beyond the kernel formula itself.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "spikerobust/kernel.hpp"
#include "spikerobust/network.hpp"
#include "spikerobust/random.hpp"
#include "spikerobust/simulate.hpp"
#include "spikerobust/spikeprop.hpp"

namespace oracle {

using spikerobust::NetworkTopology;

// Literal triple loop over presynaptic neurons, terminals and the kernel.
inline double potential(const NetworkTopology& net, std::size_t layer, std::size_t j, double t,
                        const std::vector<double>& pre_times) {
  double sum = 0.0;
  const auto& syn = net.synapses[layer - 1];
  for (std::size_t i = 0; i < pre_times.size(); ++i) {
    if (!std::isfinite(pre_times[i])) continue;
    for (std::size_t k = 0; k < net.delays.size(); ++k) {
      const double s = t - pre_times[i] - net.delays[k];
      if (s > 0.0) sum += syn.weight(i, j, k) * (s / net.kernel.tau) * std::exp(1.0 - s / net.kernel.tau);
    }
  }
  return sum;
}

// Firing times on the grid n * dt, checked point by point from n = 0.
inline std::vector<std::vector<double>> grid_schedule(const NetworkTopology& net,
                                                      const std::vector<double>& input,
                                                      double dt) {
  std::vector<std::vector<double>> times = {input};
  const auto steps = static_cast<long>(std::floor(net.t_max / dt + 1e-9));
  for (std::size_t l = 1; l < net.layer_sizes.size(); ++l) {
    std::vector<double> layer(net.layer_sizes[l], spikerobust::kNonFiring);
    for (std::size_t j = 0; j < layer.size(); ++j) {
      for (long n = 0; n <= steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        if (potential(net, l, j, t, times[l - 1]) >= net.neurons[l][j].threshold) {
          layer[j] = t;
          break;
        }
      }
    }
    times.push_back(layer);
  }
  return times;
}

// Continuous first threshold crossing: a grid scan at `dt` followed by
// bisection inside the bracketing step.
inline std::vector<std::vector<double>> continuous_schedule(const NetworkTopology& net,
                                                            const std::vector<double>& input,
                                                            double dt = 0.005) {
  std::vector<std::vector<double>> times = {input};
  const auto steps = static_cast<long>(std::floor(net.t_max / dt + 1e-9));
  for (std::size_t l = 1; l < net.layer_sizes.size(); ++l) {
    std::vector<double> layer(net.layer_sizes[l], spikerobust::kNonFiring);
    for (std::size_t j = 0; j < layer.size(); ++j) {
      const double theta = net.neurons[l][j].threshold;
      for (long n = 0; n <= steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        if (potential(net, l, j, t, times[l - 1]) < theta) continue;
        if (n == 0) {
          layer[j] = 0.0;
          break;
        }
        double lo = t - dt;
        double hi = t;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (potential(net, l, j, mid, times[l - 1]) >= theta) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        layer[j] = hi;
        break;
      }
    }
    times.push_back(layer);
  }
  return times;
}

inline double output_error(const std::vector<std::vector<double>>& times,
                           const std::vector<double>& desired) {
  double e = 0.0;
  for (std::size_t j = 0; j < desired.size(); ++j) {
    const double d = times.back()[j] - desired[j];
    e += d * d;
  }
  return 0.5 * e;
}

// d potential / dt of neuron j at its firing time.
inline double slope(const NetworkTopology& net, std::size_t layer, std::size_t j, double t,
                    const std::vector<double>& pre_times) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pre_times.size(); ++i) {
    if (!std::isfinite(pre_times[i])) continue;
    for (std::size_t k = 0; k < net.delays.size(); ++k) {
      sum += net.synapses[layer - 1].weight(i, j, k) *
             spikerobust::spike_response_derivative(t - pre_times[i] - net.delays[k], net.kernel);
    }
  }
  return sum;
}

// True where the first-crossing time is a smooth function of the weights:
// every neuron fires, crosses with a clear slope, has no PSP onset within
// `guard` ms of its firing time, and stays clearly below threshold before it.
inline bool smooth_configuration(const NetworkTopology& net,
                                 const std::vector<std::vector<double>>& times,
                                 double min_slope = 0.2, double guard = 0.1,
                                 double margin = 0.02) {
  for (std::size_t l = 1; l < times.size(); ++l) {
    for (std::size_t j = 0; j < times[l].size(); ++j) {
      const double t = times[l][j];
      if (!std::isfinite(t) || t < 2.0 * guard) return false;
      if (std::abs(slope(net, l, j, t, times[l - 1])) < min_slope) return false;
      for (double pre : times[l - 1]) {
        if (!std::isfinite(pre)) continue;
        for (double d : net.delays) {
          if (std::abs(t - pre - d) < guard) return false;
        }
      }
      const double theta = net.neurons[l][j].threshold;
      for (double s = 0.0; s < t - guard; s += 0.01) {
        if (potential(net, l, j, s, times[l - 1]) > theta - margin) return false;
      }
    }
  }
  return true;
}

// Central difference of the output error with respect to one weight, using
// continuous crossing times.
inline double finite_difference(NetworkTopology net, std::size_t syn_layer, std::size_t i,
                                std::size_t j, std::size_t k, const std::vector<double>& input,
                                const std::vector<double>& desired, double h = 1e-4) {
  double& w = net.synapses[syn_layer].weight(i, j, k);
  const double w0 = w;
  w = w0 + h;
  const double plus = output_error(continuous_schedule(net, input), desired);
  w = w0 - h;
  const double minus = output_error(continuous_schedule(net, input), desired);
  return (plus - minus) / (2.0 * h);
}

struct GradientTally {
  std::size_t networks = 0;
  std::size_t rejected = 0;
  std::size_t weights = 0;
  std::size_t sign_agree = 0;
  std::size_t within_10_percent = 0;
};

// Random 3-5-1 networks (XOR-style inputs, one inhibitory hidden neuron)
// until `wanted` smooth configurations are found; on each, up to
// `per_layer` terminals with y > 0 per weight layer are compared.
inline GradientTally gradient_check(std::size_t wanted, std::uint64_t seed,
                                    std::size_t per_layer = 10) {
  using namespace spikerobust;
  GradientTally tally;
  Rng rng = make_rng(seed, 77);
  const std::size_t sizes[] = {3, 5, 1};
  while (tally.networks < wanted && tally.rejected < 100 * wanted) {
    NetworkTopology net = make_network(sizes, unit_delays(16), KernelParams{7.0}, 1.0, 0.005, 50.0);
    net.neurons[1][4].is_inhibitory = true;
    initialize_weights(net, WeightInit{}, rng);
    const std::vector<double> input = {6.0 * static_cast<double>(uniform_index(rng, 2)),
                                       6.0 * static_cast<double>(uniform_index(rng, 2)), 0.0};
    const auto exact = continuous_schedule(net, input);
    if (!smooth_configuration(net, exact)) {
      ++tally.rejected;
      continue;
    }
    const SpikeSchedule grid = simulate_forward(net, input);
    const double offset = uniform(rng, 0.5, 3.0) * (uniform01(rng) < 0.5 ? -1.0 : 1.0);
    const std::vector<double> desired = {grid.outputs()[0] + offset};
    const Deltas deltas = compute_deltas(net, grid, desired, 0.1);
    ++tally.networks;

    for (std::size_t layer = 0; layer < 2; ++layer) {
      struct Candidate {
        std::size_t i, j, k;
        double analytic;
      };
      std::vector<Candidate> candidates;
      const auto& syn = net.synapses[layer];
      for (std::size_t i = 0; i < syn.pre_size(); ++i) {
        for (std::size_t j = 0; j < syn.post_size(); ++j) {
          for (std::size_t k = 0; k < syn.terminals(); ++k) {
            const double y = spike_response(grid.at(layer + 1, j) - grid.at(layer, i) - net.delays[k],
                                            net.kernel);
            if (y > 0.0) candidates.push_back({i, j, k, y * deltas.layers[layer + 1][j]});
          }
        }
      }
      shuffle(candidates.begin(), candidates.end(), rng);
      if (candidates.size() > per_layer) candidates.resize(per_layer);
      for (const Candidate& c : candidates) {
        const double fd = finite_difference(net, layer, c.i, c.j, c.k, input, desired);
        ++tally.weights;
        if ((fd > 0.0) == (c.analytic > 0.0)) ++tally.sign_agree;
        if (std::abs(fd - c.analytic) <= 0.1 * std::abs(fd)) ++tally.within_10_percent;
      }
    }
  }
  return tally;
}

}  // namespace oracle
