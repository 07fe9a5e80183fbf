#include "spikerobust/perturbation.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "spikerobust/error.hpp"
#include "spikerobust/keyvalue.hpp"

namespace spikerobust {

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kNone: return "none";
    case PerturbationKind::kSinusoidal: return "sinusoidal";
    case PerturbationKind::kGaussian: return "gaussian";
  }
  return "none";
}

PerturbationKind parse_perturbation_kind(const std::string& text) {
  if (text == "none") return PerturbationKind::kNone;
  if (text == "sinusoidal" || text == "sin") return PerturbationKind::kSinusoidal;
  if (text == "gaussian" || text == "gauss") return PerturbationKind::kGaussian;
  throw Error(ErrorCode::kConfigError, "unknown perturbation kind '" + text + "'");
}

void PerturbationSpec::validate() const {
  switch (kind) {
    case PerturbationKind::kNone: return;
    case PerturbationKind::kSinusoidal:
      check(amplitude > 0.0 && amplitude <= 1.0, ErrorCode::kConfigError,
            "sinusoidal amplitude must lie in (0, 1]");
      return;
    case PerturbationKind::kGaussian:
      check(r_star > 0.0 && r_star <= 1.0, ErrorCode::kConfigError,
            "r* must lie in (0, 1]");
      return;
  }
}

double PerturbationSpec::parameter() const {
  switch (kind) {
    case PerturbationKind::kSinusoidal: return amplitude;
    case PerturbationKind::kGaussian: return r_star;
    case PerturbationKind::kNone: break;
  }
  return 0.0;
}

PerturbationSpec PerturbationSpec::sinusoidal(double amplitude, std::uint64_t seed) {
  PerturbationSpec spec;
  spec.kind = PerturbationKind::kSinusoidal;
  spec.amplitude = amplitude;
  spec.seed = seed;
  return spec;
}

PerturbationSpec PerturbationSpec::gaussian(double r_star, std::uint64_t seed) {
  PerturbationSpec spec;
  spec.kind = PerturbationKind::kGaussian;
  spec.r_star = r_star;
  spec.seed = seed;
  return spec;
}

double sinusoidal_component(double x0, double amplitude, double y) {
  return x0 + amplitude * std::sin(2.0 * std::numbers::pi * y);
}

double gaussian_component(double x0, double r, double l, bool literal_sign) {
  const double sign = l < 0.0 ? -1.0 : 1.0;
  const double decay = std::exp(-r * r / 2.0);
  if (literal_sign) return x0 + x0 * (1.0 - decay * sign);
  return x0 + sign * x0 * (1.0 - decay);
}

double gaussian_bound(double x0, double r_star) {
  return std::abs(x0) * (1.0 - std::exp(-r_star * r_star / 2.0));
}

std::vector<double> perturb_sinusoidal(std::span<const double> x0, double amplitude,
                                       Rng& rng) {
  std::vector<double> out(x0.size());
  for (std::size_t c = 0; c < x0.size(); ++c) {
    out[c] = sinusoidal_component(x0[c], amplitude, uniform01(rng));
  }
  return out;
}

std::vector<double> perturb_gaussian(std::span<const double> x0, double r_star, Rng& rng,
                                     bool literal_sign) {
  std::vector<double> out(x0.size());
  for (std::size_t c = 0; c < x0.size(); ++c) {
    const double r = r_star * uniform01(rng);
    const double l = uniform(rng, -1.0, 1.0);
    out[c] = gaussian_component(x0[c], r, l, literal_sign);
  }
  return out;
}

std::vector<double> perturb(std::span<const double> x0, const PerturbationSpec& spec,
                            Rng& rng) {
  switch (spec.kind) {
    case PerturbationKind::kSinusoidal:
      return perturb_sinusoidal(x0, spec.amplitude, rng);
    case PerturbationKind::kGaussian:
      return perturb_gaussian(x0, spec.r_star, rng, spec.literal_sign);
    case PerturbationKind::kNone:
      break;
  }
  return {x0.begin(), x0.end()};
}

PerturbedSet generate_perturbed_set(std::span<const double> x0, std::size_t n,
                                    const PerturbationSpec& spec, std::uint64_t stream) {
  check(n >= 1, ErrorCode::kConfigError, "perturbed set needs n >= 1");
  spec.validate();
  PerturbedSet set;
  set.base.assign(x0.begin(), x0.end());
  set.spec = spec;
  set.stream = stream;
  set.vectors.reserve(n);
  Rng rng = make_rng(spec.seed, stream);
  for (std::size_t i = 0; i < n; ++i) set.vectors.push_back(perturb(x0, spec, rng));
  return set;
}

void write_perturbed_set(const PerturbedSet& set, std::ostream& out) {
  out << "# kind=" << to_string(set.spec.kind)
      << " parameter=" << format_double(set.spec.parameter())
      << " seed=" << set.spec.seed << " stream=" << set.stream << '\n';
  out << "# base=" << join_doubles(set.base) << '\n';
  for (const auto& v : set.vectors) {
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (c) out << ' ';
      out << format_double(v[c]);
    }
    out << '\n';
  }
}

}  // namespace spikerobust
