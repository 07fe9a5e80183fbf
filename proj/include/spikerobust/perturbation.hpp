#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spikerobust/random.hpp"

namespace spikerobust {

enum class PerturbationKind { kNone, kSinusoidal, kGaussian };

std::string to_string(PerturbationKind kind);
PerturbationKind parse_perturbation_kind(const std::string& text);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::kNone;
  // Sinusoidal amplitude A in (0, 1].
  double amplitude = 0.0;
  // Least upper bound r* of the Gaussian r components, in (0, 1].
  double r_star = 0.0;
  std::uint64_t seed = 0;
  // Gaussian only: use x0 * (1 - exp(-r^2/2) * sgn(l)) as the offset instead
  // of sgn(l) * x0 * (1 - exp(-r^2/2)).
  bool literal_sign = false;

  // Throws kConfigError if the amplitude parameter is outside (0, 1].
  void validate() const;
  // A or r*, whichever applies; 0 for kNone.
  double parameter() const;

  static PerturbationSpec none() { return {}; }
  static PerturbationSpec sinusoidal(double amplitude, std::uint64_t seed = 0);
  static PerturbationSpec gaussian(double r_star, std::uint64_t seed = 0);
};

// x0_c + A sin(2 pi y_c) for a given draw y_c.
double sinusoidal_component(double x0, double amplitude, double y);

// Gaussian offset for given draws r_c and l_c; sgn(0) counts as +1.
double gaussian_component(double x0, double r, double l, bool literal_sign = false);

// Largest |x~_c - x0_c| a Gaussian perturbation can produce.
double gaussian_bound(double x0, double r_star);

// y_c ~ U[0, 1] per component.
std::vector<double> perturb_sinusoidal(std::span<const double> x0, double amplitude,
                                       Rng& rng);

// r_c ~ U[0, r*], l_c ~ U[-1, 1] per component.
std::vector<double> perturb_gaussian(std::span<const double> x0, double r_star, Rng& rng,
                                     bool literal_sign = false);

std::vector<double> perturb(std::span<const double> x0, const PerturbationSpec& spec,
                            Rng& rng);

struct PerturbedSet {
  std::vector<std::vector<double>> vectors;
  std::vector<double> base;
  PerturbationSpec spec;
  std::uint64_t stream = 0;
};

// n independent draws from the stream (spec.seed, stream).
PerturbedSet generate_perturbed_set(std::span<const double> x0, std::size_t n,
                                    const PerturbationSpec& spec, std::uint64_t stream = 0);

// One vector per row, space separated, shortest round-trip text, preceded by
// '#' comment lines with the provenance.
void write_perturbed_set(const PerturbedSet& set, std::ostream& out);

}  // namespace spikerobust
