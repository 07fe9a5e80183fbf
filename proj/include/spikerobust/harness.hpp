#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spikerobust/checkpoint.hpp"
#include "spikerobust/datasets.hpp"
#include "spikerobust/encoding.hpp"
#include "spikerobust/keyvalue.hpp"
#include "spikerobust/network.hpp"
#include "spikerobust/perturbation.hpp"
#include "spikerobust/sample.hpp"
#include "spikerobust/spikeprop.hpp"

namespace spikerobust {

enum class TableId { kT2, kT3, kT4, kT5, kT6, kT7, kT8, kT9 };

std::string to_string(TableId id);
// Accepts "T2" .. "T9" (case-insensitive).
TableId parse_table_id(const std::string& text);

struct TopologyConfig {
  // Hidden layer sizes; the input width comes from the encoder and the output
  // width from the dataset's class count (1 for XOR).
  std::vector<std::size_t> hidden = {5};
  // Indices of inhibitory neurons in the first hidden layer.
  std::vector<std::size_t> inhibitory = {4};
  std::size_t terminals = 16;
  // Terminal k (0-based) has delay first_delay + k ms.
  double first_delay = 1.0;
  double tau = 7.0;
  double threshold = 1.0;
  double dt = 0.01;
  double t_max = 50.0;
  WeightInit init;
};

struct ExperimentConfig {
  std::string name = "custom";
  DatasetId dataset = DatasetId::kXor;
  TopologyConfig topology;
  EncoderParams encoder;
  TrainConfig train;
  // Epoch milestones, strictly increasing. One training run per repetition
  // is evaluated at each milestone.
  std::vector<std::size_t> epochs = {50};
  std::vector<PerturbationSpec> perturbations;
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  // Fraction of each class used for training (Iris and WBC).
  double split_ratio = 0.5;
  // Landsat desk-scale mode: train on a stratified subset and scale the
  // epoch milestones by subsample_size / full training size.
  bool subsample = false;
  std::size_t subsample_size = 500;
  // XOR: number of perturbed copies of (1, 1) per perturbation setting.
  std::size_t xor_perturbed_samples = 160;
  std::size_t jobs = 1;

  // Throws kConfigError.
  void validate() const;
  KeyValues to_kv() const;
  static ExperimentConfig from_kv(const KeyValues& kv);
};

ExperimentConfig default_config(TableId id);
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(const ExperimentConfig& config, std::ostream& out);

struct ReportRow {
  std::size_t epochs = 0;
  // Epochs actually trained (differs from `epochs` in subsample mode).
  std::size_t trained_epochs = 0;
  PerturbationKind kind = PerturbationKind::kNone;
  double parameter = 0.0;
  double clean_rate = 0.0;      // mean percent on the clean test set
  double perturbed_rate = 0.0;  // mean percent on the perturbed test set
  double train_rate = 0.0;      // mean percent on the training set
  std::vector<double> clean_raw;
  std::vector<double> perturbed_raw;
  std::vector<double> train_raw;
  std::optional<double> published_clean;
  std::optional<double> published_perturbed;
};

struct ExperimentReport {
  std::string name;
  std::string dataset;
  std::vector<std::uint64_t> seeds;
  std::vector<ReportRow> rows;
  std::vector<std::string> failures;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  // Not part of the machine-readable report.
  double wall_clock_seconds = 0.0;
};

// 100 * (correct decodes) / samples; silent or ambiguous outputs count as
// wrong. Throws kEmptyDataset on an empty set.
double classification_rate(const NetworkTopology& net,
                           std::span<const EncodedSample> samples, const OutputCode& code);

// Network shaped for `config` with `inputs` input neurons and `outputs`
// output neurons, weights drawn from `rng`.
NetworkTopology build_network(const TopologyConfig& config, std::size_t inputs,
                              std::size_t outputs, Rng& rng);

// Data of one repetition: split, training statistics, encoder and the
// encoded clean sets.
struct ExperimentData {
  TabularDataset train;
  TabularDataset test;
  FeatureEncoder encoder;
  OutputCode code;
  std::vector<EncodedSample> train_samples;
  std::vector<EncodedSample> test_samples;
  // Epoch milestones after subsample scaling.
  std::vector<std::size_t> milestones;
};

// `first` / `second` as returned by load_benchmark (XOR: load_xor() and an
// empty set). Iris and WBC are split with `seed`.
ExperimentData prepare_experiment(const ExperimentConfig& config, const TabularDataset& first,
                                  const TabularDataset& second, std::uint64_t seed);

// Perturbed test inputs for `spec`, encoded with the training statistics.
// XOR: config.xor_perturbed_samples copies of (1, 1). Otherwise every test
// sample once. Draws come from stream (spec.seed, stream).
std::vector<EncodedSample> perturbed_samples(const ExperimentConfig& config,
                                             const ExperimentData& data,
                                             const PerturbationSpec& spec,
                                             std::uint64_t stream);

struct TrainedModel {
  Checkpoint checkpoint;
  TrainTrace trace;
  std::size_t epochs_run = 0;
  double train_rate = 0.0;
  double test_rate = 0.0;
};

// Trains one network for the last epoch milestone using seed config.seed.
TrainedModel train_model(const ExperimentConfig& config, const std::filesystem::path& data_dir);

// Clean and perturbed rates of a saved network on the test split that
// config.seed selects. One row per perturbation spec.
ExperimentReport evaluate_model(const Checkpoint& checkpoint, const ExperimentConfig& config,
                                const std::filesystem::path& data_dir);

// Train / evaluate / perturb protocol for every repetition and grid row.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& data_dir);

struct ReproduceOptions {
  // Replaces the table's default configuration when set.
  std::optional<ExperimentConfig> config;
  std::filesystem::path data_dir = "data";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> repetitions;
  bool subsample = false;
  std::size_t jobs = 1;
};

// Runs a table's grid and attaches the published values to each row.
ExperimentReport reproduce(TableId id, const ReproduceOptions& options);

// Published (clean, perturbed) rates for a table row, if listed.
std::optional<std::pair<double, double>> published_values(TableId id, std::size_t epochs,
                                                      double parameter);

// Aligned text table, including the published values where known.
void write_report_text(const ExperimentReport& report, std::ostream& out);
// JSON document; see README for the field list. Deterministic for a given
// config and seed.
void write_report_json(const ExperimentReport& report, std::ostream& out);

// Writes n perturbed copies of x0 (one per row) for scatter plots.
void dump_perturbation_scatter(const PerturbationSpec& spec, std::span<const double> x0,
                               std::size_t n, const std::filesystem::path& path);

}  // namespace spikerobust
