#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spikerobust/sample.hpp"

namespace spikerobust {

// Maps [min, max] linearly onto spike times [0, L]. Values outside the range
// are clamped first.
class LinearCoder {
 public:
  LinearCoder(double min, double max, double interval);

  double encode(double x) const;

  double min() const { return min_; }
  double max() const { return max_; }
  double interval() const { return interval_; }

 private:
  double min_;
  double max_;
  double interval_;
};

// N Gaussian receptive fields over [I_min, I_max]. Field i (1-based) is
// centred at I_min + (2i - 3)/2 * (I_max - I_min)/(N - 2) with common width
// (1/beta) * (I_max - I_min)/(N - 2).
class ReceptiveFieldBank {
 public:
  ReceptiveFieldBank(std::size_t neurons, double min, double max, double beta);

  std::size_t size() const { return centers_.size(); }
  // 0-based index, i.e. center(0) is the field called 1 above.
  double center(std::size_t i) const { return centers_.at(i); }
  double width() const { return width_; }
  double min() const { return min_; }
  double max() const { return max_; }
  double beta() const { return beta_; }

  double activation(std::size_t i, double x) const;

  // Spike time (1 - a_i) * horizon per field; fields with a_i < cutoff stay
  // silent (kNonFiring).
  std::vector<double> encode(double x, double horizon, double firing_cutoff) const;

 private:
  double min_;
  double max_;
  double beta_;
  double width_;
  std::vector<double> centers_;
};

// Desired output times for `label` under winner-take-all coding: `early` for
// the label's neuron, `late` for every other one.
std::vector<double> encode_label_wta(std::size_t label, std::size_t n_classes,
                                     double early, double late);

// Index of the earliest spike, lowest index on ties, nullopt if all silent.
std::optional<std::size_t> decode_wta(std::span<const double> outputs);

// Single-output decoding: the class whose target time is closest to the
// output spike, provided it lies within `tolerance` ms; nullopt otherwise.
std::optional<std::size_t> decode_target_time(double output,
                                              std::span<const double> class_targets,
                                              double tolerance);

// XOR coding: bit b becomes spike time 6b ms, a third bias input fires at 0,
// and the desired output is 16 ms for equal bits, 10 ms for different bits.
inline constexpr double kXorInterval = 6.0;
inline constexpr double kXorEarly = 10.0;
inline constexpr double kXorLate = 16.0;
EncodedSample encode_xor(int a, int b);

enum class EncoderKind { kLinear, kPopulation };

struct EncoderParams {
  EncoderKind kind = EncoderKind::kPopulation;
  double interval = 6.0;        // L, ms
  std::size_t fields = 12;      // N per feature (population only)
  double beta = 1.5;
  double firing_cutoff = 0.1;
  double early = kXorEarly;
  double late = kXorLate;
  // Only used when the network has a single output neuron.
  double target_tolerance = 1.0;
};

// How a network's output spikes map onto classes.
struct OutputCode {
  std::size_t n_classes = 2;
  std::size_t n_outputs = 1;
  double early = kXorEarly;
  double late = kXorLate;
  double target_tolerance = 1.0;

  std::vector<double> desired(std::size_t label) const;
  std::optional<std::size_t> decode(std::span<const double> outputs) const;
};

// Turns raw feature vectors into input spike times using per-feature ranges
// fixed at construction (the training statistics). A bias neuron firing at
// t = 0 is appended as the last input.
class FeatureEncoder {
 public:
  FeatureEncoder(EncoderParams params, std::vector<double> min,
                 std::vector<double> max);

  std::size_t num_features() const { return min_.size(); }
  // Encoding neurons plus the bias neuron.
  std::size_t width() const;

  std::vector<double> encode(std::span<const double> features) const;

  const EncoderParams& params() const { return params_; }
  std::span<const double> min() const { return min_; }
  std::span<const double> max() const { return max_; }

  // Flat "encoder.*" keys for checkpoints.
  std::map<std::string, std::string> to_kv() const;
  static FeatureEncoder from_kv(const std::map<std::string, std::string>& kv);

  friend bool operator==(const FeatureEncoder& a, const FeatureEncoder& b) {
    return a.to_kv() == b.to_kv();
  }

 private:
  EncoderParams params_;
  std::vector<double> min_;
  std::vector<double> max_;
  std::vector<LinearCoder> linear_;
  std::vector<ReceptiveFieldBank> banks_;
};

}  // namespace spikerobust
