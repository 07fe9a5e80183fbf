#include "spikerobust/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikerobust/error.hpp"
#include "spikerobust/keyvalue.hpp"
#include "spikerobust/network.hpp"

namespace spikerobust {

LinearCoder::LinearCoder(double min, double max, double interval)
    : min_(min), max_(max), interval_(interval) {
  check(max > min, ErrorCode::kConfigError, "linear coder needs max > min");
  check(interval > 0.0, ErrorCode::kConfigError, "coding interval must be > 0");
}

double LinearCoder::encode(double x) const {
  const double clamped = std::clamp(x, min_, max_);
  return (clamped - min_) / (max_ - min_) * interval_;
}

ReceptiveFieldBank::ReceptiveFieldBank(std::size_t neurons, double min, double max,
                                       double beta)
    : min_(min), max_(max), beta_(beta) {
  check(neurons >= 3, ErrorCode::kConfigError, "receptive field bank needs N >= 3");
  check(max > min, ErrorCode::kConfigError, "receptive field bank needs max > min");
  check(beta > 0.0, ErrorCode::kConfigError, "beta must be > 0");
  const double spacing = (max - min) / static_cast<double>(neurons - 2);
  width_ = spacing / beta;
  centers_.resize(neurons);
  for (std::size_t i = 0; i < neurons; ++i) {
    const double field = static_cast<double>(i + 1);
    centers_[i] = min + (2.0 * field - 3.0) / 2.0 * spacing;
  }
}

double ReceptiveFieldBank::activation(std::size_t i, double x) const {
  const double d = x - centers_.at(i);
  return std::exp(-d * d / (2.0 * width_ * width_));
}

std::vector<double> ReceptiveFieldBank::encode(double x, double horizon,
                                               double firing_cutoff) const {
  const double clamped = std::clamp(x, min_, max_);
  std::vector<double> times(centers_.size());
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    const double a = activation(i, clamped);
    times[i] = a < firing_cutoff ? kNonFiring : (1.0 - a) * horizon;
  }
  return times;
}

std::vector<double> encode_label_wta(std::size_t label, std::size_t n_classes,
                                     double early, double late) {
  check(label < n_classes, ErrorCode::kMalformedInput, "label out of range");
  check(early < late, ErrorCode::kConfigError, "early must precede late");
  std::vector<double> desired(n_classes, late);
  desired[label] = early;
  return desired;
}

std::optional<std::size_t> decode_wta(std::span<const double> outputs) {
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    if (!fired(outputs[j])) continue;
    if (!best || outputs[j] < outputs[*best]) best = j;
  }
  return best;
}

std::optional<std::size_t> decode_target_time(double output,
                                              std::span<const double> class_targets,
                                              double tolerance) {
  if (!fired(output)) return std::nullopt;
  std::optional<std::size_t> best;
  double best_gap = tolerance;
  for (std::size_t c = 0; c < class_targets.size(); ++c) {
    const double gap = std::abs(output - class_targets[c]);
    if (gap <= best_gap && (!best || gap < best_gap)) {
      best = c;
      best_gap = gap;
    }
  }
  return best;
}

EncodedSample encode_xor(int a, int b) {
  check((a == 0 || a == 1) && (b == 0 || b == 1), ErrorCode::kMalformedInput,
        "XOR pattern bits must be 0 or 1");
  const LinearCoder coder(0.0, 1.0, kXorInterval);
  EncodedSample sample;
  sample.inputs = {coder.encode(a), coder.encode(b), 0.0};
  sample.label = a == b ? 0 : 1;
  sample.desired = {a == b ? kXorLate : kXorEarly};
  return sample;
}

std::vector<double> OutputCode::desired(std::size_t label) const {
  if (n_outputs == 1) {
    check(n_classes == 2 && label < 2, ErrorCode::kMalformedInput,
          "single-output coding supports two classes");
    return {label == 0 ? late : early};
  }
  check(n_outputs == n_classes, ErrorCode::kTopologyMismatch,
        "winner-take-all needs one output per class");
  return encode_label_wta(label, n_classes, early, late);
}

std::optional<std::size_t> OutputCode::decode(std::span<const double> outputs) const {
  if (n_outputs == 1) {
    const double targets[] = {late, early};
    return decode_target_time(outputs.front(), targets, target_tolerance);
  }
  return decode_wta(outputs);
}

FeatureEncoder::FeatureEncoder(EncoderParams params, std::vector<double> min,
                               std::vector<double> max)
    : params_(params), min_(std::move(min)), max_(std::move(max)) {
  check(min_.size() == max_.size() && !min_.empty(), ErrorCode::kConfigError,
        "encoder ranges must be non-empty and of equal length");
  check(params_.interval > 0.0, ErrorCode::kConfigError, "coding interval must be > 0");
  for (std::size_t f = 0; f < min_.size(); ++f) {
    if (params_.kind == EncoderKind::kLinear) {
      linear_.emplace_back(min_[f], max_[f], params_.interval);
    } else {
      banks_.emplace_back(params_.fields, min_[f], max_[f], params_.beta);
    }
  }
}

std::size_t FeatureEncoder::width() const {
  const std::size_t per_feature =
      params_.kind == EncoderKind::kLinear ? 1 : params_.fields;
  return num_features() * per_feature + 1;
}

std::vector<double> FeatureEncoder::encode(std::span<const double> features) const {
  check(features.size() == num_features(), ErrorCode::kMalformedInput,
        "feature vector has " + std::to_string(features.size()) + " entries, encoder expects " +
            std::to_string(num_features()));
  std::vector<double> times;
  times.reserve(width());
  for (std::size_t f = 0; f < features.size(); ++f) {
    if (params_.kind == EncoderKind::kLinear) {
      times.push_back(linear_[f].encode(features[f]));
    } else {
      const auto field_times =
          banks_[f].encode(features[f], params_.interval, params_.firing_cutoff);
      times.insert(times.end(), field_times.begin(), field_times.end());
    }
  }
  times.push_back(0.0);
  return times;
}

std::map<std::string, std::string> FeatureEncoder::to_kv() const {
  return {
      {"encoder.kind", params_.kind == EncoderKind::kLinear ? "linear" : "population"},
      {"encoder.interval", format_double(params_.interval)},
      {"encoder.fields", std::to_string(params_.fields)},
      {"encoder.beta", format_double(params_.beta)},
      {"encoder.firing_cutoff", format_double(params_.firing_cutoff)},
      {"encoder.early", format_double(params_.early)},
      {"encoder.late", format_double(params_.late)},
      {"encoder.target_tolerance", format_double(params_.target_tolerance)},
      {"encoder.min", join_doubles(min_)},
      {"encoder.max", join_doubles(max_)},
  };
}

FeatureEncoder FeatureEncoder::from_kv(const std::map<std::string, std::string>& kv) {
  EncoderParams params;
  const std::string& kind = require(kv, "encoder.kind");
  if (kind == "linear") {
    params.kind = EncoderKind::kLinear;
  } else if (kind == "population") {
    params.kind = EncoderKind::kPopulation;
  } else {
    throw Error(ErrorCode::kConfigError, "unknown encoder kind '" + kind + "'");
  }
  params.interval = parse_double(require(kv, "encoder.interval"));
  params.fields = parse_size(require(kv, "encoder.fields"));
  params.beta = parse_double(require(kv, "encoder.beta"));
  params.firing_cutoff = parse_double(require(kv, "encoder.firing_cutoff"));
  params.early = parse_double(require(kv, "encoder.early"));
  params.late = parse_double(require(kv, "encoder.late"));
  params.target_tolerance = parse_double(require(kv, "encoder.target_tolerance"));
  return FeatureEncoder(params, parse_doubles(require(kv, "encoder.min")),
                        parse_doubles(require(kv, "encoder.max")));
}

}  // namespace spikerobust
