#include "spikerobust/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "spikerobust/error.hpp"

namespace spikerobust {

namespace {

struct Source {
  double onset;  // t_i + d_k
  double weight;
};

// Largest value of exp(-(t - r) / tau) (t a - b) for t in [lo, hi]. The
// function has a single stationary point at t = tau + b / a.
double segment_max(double a, double b, double reference, double tau, double lo, double hi) {
  const auto f = [&](double t) { return std::exp(-(t - reference) / tau) * (t * a - b); };
  double best = std::max(f(lo), f(hi));
  if (a != 0.0) {
    const double stationary = tau + b / a;
    if (stationary > lo && stationary < hi) best = std::max(best, f(stationary));
  }
  return best;
}

// Sweeps the time grid for one neuron. Before onset s the kernel term is zero,
// afterwards
//   sum_s w_s eps(t - s) = (e / tau) exp(-(t - r) / tau) (t A - B)
// with A = sum w_s exp((s - r) / tau), B = sum w_s s exp((s - r) / tau) and a
// reference time r. Between two onsets A and B are fixed, so a whole stretch
// of grid points can be skipped when the closed form stays below threshold
// there. The closed form is only a filter: any grid point it places near the
// threshold is re-evaluated with membrane_potential, so the firing decision
// is identical to direct summation.
double first_crossing(const NetworkTopology& net, std::size_t layer,
                      std::size_t post, std::span<const double> presyn,
                      std::vector<Source>& sources) {
  const SynapseArray& syn = net.synapses[layer - 1];
  const double threshold = net.neurons[layer][post].threshold;
  const std::size_t m = net.terminals();

  sources.clear();
  for (std::size_t i = 0; i < syn.pre_size(); ++i) {
    if (!fired(presyn[i])) continue;
    const auto weights = syn.connection(i, post);
    for (std::size_t k = 0; k < m; ++k) {
      if (weights[k] != 0.0) sources.push_back({presyn[i] + net.delays[k], weights[k]});
    }
  }
  if (sources.empty()) return kNonFiring;
  std::sort(sources.begin(), sources.end(),
            [](const Source& a, const Source& b) { return a.onset < b.onset; });

  const double tau = net.kernel.tau;
  const double reference = sources.front().onset;
  const double prefactor = std::numbers::e / tau;
  const std::size_t points = grid_points(net);
  const double last = static_cast<double>(points - 1) * net.dt;

  // Nothing can happen before the first onset.
  std::size_t n = static_cast<std::size_t>(std::max(0.0, std::floor(reference / net.dt)));
  std::size_t next = 0;
  double a = 0.0, b = 0.0;          // signed sums
  double a_abs = 0.0, b_abs = 0.0;  // magnitudes, for the rounding bound
  std::size_t segment_end = 0;      // first grid index past the current stretch
  while (n < points) {
    const double t = static_cast<double>(n) * net.dt;
    bool added = false;
    while (next < sources.size() && sources[next].onset < t) {
      const Source& s = sources[next++];
      const double g = std::exp((s.onset - reference) / tau);
      a += s.weight * g;
      b += s.weight * s.onset * g;
      a_abs += std::abs(s.weight) * g;
      b_abs += std::abs(s.weight * s.onset) * g;
      added = true;
    }
    if (next == 0) {
      ++n;
      continue;
    }
    if (added || n >= segment_end) {
      // Grid points up to the next onset (inclusive) share the same A and B.
      const double hi = next < sources.size() ? std::min(sources[next].onset, last) : last;
      std::size_t end = static_cast<std::size_t>(std::floor(hi / net.dt)) + 1;
      while (end > n + 1 && static_cast<double>(end - 1) * net.dt > hi) --end;
      while (end < points && static_cast<double>(end) * net.dt <= hi) ++end;
      segment_end = std::max(end, n + 1);
      const double peak = prefactor * segment_max(a, b, reference, tau, t, std::max(t, hi));
      const double scale = prefactor * segment_max(a_abs, -b_abs, reference, tau, t, std::max(t, hi));
      if (peak < threshold - 1e-9 * (1.0 + scale)) {
        n = segment_end;
        continue;
      }
    }
    const double decay = prefactor * std::exp(-(t - reference) / tau);
    const double fast = decay * (t * a - b);
    const double slack = 1e-10 * (1.0 + decay * (t * a_abs + b_abs));
    if (fast >= threshold - slack &&
        membrane_potential(syn, post, t, presyn, net.delays, net.kernel) >= threshold) {
      return t;
    }
    ++n;
  }
  return kNonFiring;
}

}  // namespace

double membrane_potential(const SynapseArray& syn, std::size_t post, double t,
                          std::span<const double> presyn_times,
                          std::span<const double> delays,
                          const KernelParams& kernel) {
  double potential = 0.0;
  for (std::size_t i = 0; i < syn.pre_size(); ++i) {
    const double t_i = presyn_times[i];
    if (!fired(t_i)) continue;
    const auto weights = syn.connection(i, post);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      potential += weights[k] * spike_response(t - t_i - delays[k], kernel);
    }
  }
  return potential;
}

std::size_t grid_points(const NetworkTopology& net) {
  // Tolerate T_max values that are an integer multiple of dt up to rounding.
  return static_cast<std::size_t>(std::floor(net.t_max / net.dt + 1e-9)) + 1;
}

SpikeSchedule simulate_forward(const NetworkTopology& net,
                               std::span<const double> input) {
  if (input.size() != net.input_size()) {
    throw Error(ErrorCode::kMalformedInput,
                "input schedule has " + std::to_string(input.size()) +
                    " entries, input layer has " + std::to_string(net.input_size()));
  }
  for (double t : input) {
    if (fired(t) && !(t >= 0.0 && t <= net.t_max)) {
      throw Error(ErrorCode::kMalformedInput,
                  "input spike time " + std::to_string(t) + " outside [0, T_max]");
    }
  }

  SpikeSchedule schedule;
  schedule.layers.reserve(net.num_layers());
  schedule.layers.emplace_back(input.begin(), input.end());
  std::vector<Source> scratch;
  for (std::size_t l = 1; l < net.num_layers(); ++l) {
    std::vector<double> times(net.layer_sizes[l], kNonFiring);
    const std::span<const double> presyn = schedule.layers[l - 1];
    for (std::size_t j = 0; j < times.size(); ++j) {
      times[j] = first_crossing(net, l, j, presyn, scratch);
    }
    schedule.layers.push_back(std::move(times));
  }
  return schedule;
}

}  // namespace spikerobust
