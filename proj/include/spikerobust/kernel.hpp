#pragma once

#include <cmath>

namespace spikerobust {

struct KernelParams {
  // Membrane decay time constant in ms. Sets both rise and decay of a PSP.
  double tau = 7.0;

  void validate() const;
  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

// Spike-response kernel (t/tau) * exp(1 - t/tau) for t > 0, zero otherwise.
// Peaks at exactly 1 when t == tau.
inline double spike_response(double t, const KernelParams& kernel) {
  if (!(t > 0.0)) return 0.0;
  const double s = t / kernel.tau;
  return s * std::exp(1.0 - s);
}

// d/dt of spike_response. Zero for t <= 0; jumps to e / tau just after onset.
inline double spike_response_derivative(double t, const KernelParams& kernel) {
  if (!(t > 0.0)) return 0.0;
  const double s = t / kernel.tau;
  return std::exp(1.0 - s) * (1.0 - s) / kernel.tau;
}

}  // namespace spikerobust
