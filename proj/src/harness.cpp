#include "spikerobust/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <cctype>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "spikerobust/error.hpp"
#include "spikerobust/simulate.hpp"

namespace spikerobust {

namespace {

struct PublishedRow {
  std::size_t epochs;
  double parameter;
  double clean;
  double perturbed;
};

const std::vector<PublishedRow>& published_table(TableId id) {
  static const std::map<TableId, std::vector<PublishedRow>> tables = {
      {TableId::kT2,
       {{50, 0.001, 90.50, 91.00}, {50, 0.01, 89.50, 87.80}, {50, 0.1, 91.00, 88.90},
        {50, 0.2, 88.50, 87.20}, {50, 0.5, 87.50, 82.24}, {50, 0.8, 87.50, 85.58}}},
      {TableId::kT3,
       {{50, 0.1, 92.00, 88.62}, {50, 0.2, 92.00, 88.45}, {50, 0.3, 89.50, 87.80},
        {50, 0.4, 89.50, 88.15}, {50, 0.5, 88.50, 85.00}, {100, 0.1, 88.25, 88.66},
        {100, 0.2, 89.75, 89.60}, {100, 0.3, 91.75, 90.86}, {100, 0.4, 91.00, 89.76},
        {100, 0.5, 88.25, 88.81}}},
      {TableId::kT4,
       {{500, 0.001, 96.50, 95.71}, {500, 0.01, 94.60, 93.84}, {500, 0.1, 91.73, 88.90},
        {500, 0.2, 91.50, 88.40}, {500, 0.5, 89.35, 87.62}, {500, 0.8, 88.50, 87.58}}},
      {TableId::kT5,
       {{750, 0.1, 96.10, 96.02}, {750, 0.2, 94.80, 94.43}, {750, 0.3, 94.50, 94.05},
        {750, 0.4, 91.50, 90.13}, {750, 0.5, 89.56, 88.00}, {1000, 0.1, 96.21, 96.66},
        {1000, 0.2, 95.75, 94.90}, {1000, 0.3, 94.25, 93.76}, {1000, 0.4, 91.00, 89.74},
        {1000, 0.5, 89.25, 88.85}, {1500, 0.1, 96.25, 96.01}, {1500, 0.2, 95.35, 94.60},
        {1500, 0.3, 91.27, 90.86}, {1500, 0.4, 91.08, 90.67}, {1500, 0.5, 89.21, 89.01}}},
      {TableId::kT6,
       {{1500, 0.001, 97.50, 97.60}, {1500, 0.01, 97.34, 97.20}, {1500, 0.1, 95.60, 95.53},
        {1500, 0.2, 95.50, 93.80}, {1500, 0.5, 96.02, 94.84}, {1500, 0.8, 93.56, 91.68}}},
      {TableId::kT7,
       {{1000, 0.1, 95.75, 96.06}, {1000, 0.2, 95.85, 94.60}, {1000, 0.3, 94.75, 94.86},
        {1000, 0.4, 92.00, 91.96}, {1000, 0.5, 91.57, 91.17}, {1500, 0.1, 97.40, 97.52},
        {1500, 0.2, 97.13, 96.59}, {1500, 0.3, 95.57, 93.86}, {1500, 0.4, 96.03, 95.45},
        {1500, 0.5, 93.54, 91.60}}},
      {TableId::kT8,
       {{6000, 0.001, 85.50, 85.61}, {6000, 0.01, 85.17, 84.80}, {6000, 0.1, 85.00, 84.90},
        {6000, 0.2, 85.21, 85.20}, {6000, 0.5, 84.50, 82.32}, {6000, 0.8, 83.10, 82.04}}},
      {TableId::kT9,
       {{6000, 0.1, 85.30, 85.02}, {6000, 0.2, 85.07, 84.45}, {6000, 0.3, 83.50, 82.83},
        {6000, 0.4, 83.46, 83.15}, {6000, 0.5, 81.56, 81.00}, {7500, 0.1, 85.60, 85.62},
        {7500, 0.2, 85.00, 84.75}, {7500, 0.3, 84.50, 83.80}, {7500, 0.4, 82.58, 82.15},
        {7500, 0.5, 81.80, 80.97}}},
  };
  return tables.at(id);
}

const std::vector<double> kAmplitudes = {0.001, 0.01, 0.1, 0.2, 0.5, 0.8};
const std::vector<double> kRadii = {0.1, 0.2, 0.3, 0.4, 0.5};

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

std::vector<EncodedSample> encode_all(const TabularDataset& data,
                                      const FeatureEncoder& encoder, const OutputCode& code) {
  std::vector<EncodedSample> samples;
  samples.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    samples.push_back({encoder.encode(data.features[i]), code.desired(data.labels[i]),
                       data.labels[i]});
  }
  return samples;
}

// Rates for every (milestone, perturbation) pair of one repetition.
struct RepetitionResult {
  std::vector<double> clean;
  std::vector<double> perturbed;
  std::vector<double> train;
  std::string failure;
};

RepetitionResult run_repetition(const ExperimentConfig& config, const TabularDataset& first,
                                const TabularDataset& second, std::size_t rep) {
  const std::uint64_t seed = config.seed + rep;
  const ExperimentData data = prepare_experiment(config, first, second, seed);

  Rng init_rng = make_rng(seed, 1);
  NetworkTopology net =
      build_network(config.topology, data.encoder.width(), data.code.n_outputs, init_rng);
  TrainConfig train_config = config.train;
  train_config.max_epochs = data.milestones.back();
  SpikePropTrainer trainer(net, train_config, seed);

  RepetitionResult result;
  std::size_t done = 0;
  bool converged = false;
  for (std::size_t target : data.milestones) {
    while (!converged && done < target) {
      const double error = trainer.run_epoch(data.train_samples);
      ++done;
      converged = error <= train_config.target_error && trainer.trace().non_firing.back() == 0;
    }
    const double train_rate = classification_rate(net, data.train_samples, data.code);
    const double clean_rate = classification_rate(net, data.test_samples, data.code);
    for (std::size_t q = 0; q < config.perturbations.size(); ++q) {
      PerturbationSpec spec = config.perturbations[q];
      spec.seed = seed;
      double perturbed_rate = clean_rate;
      if (spec.kind != PerturbationKind::kNone) {
        perturbed_rate =
            classification_rate(net, perturbed_samples(config, data, spec, q + 1), data.code);
      }
      result.train.push_back(train_rate);
      result.clean.push_back(clean_rate);
      result.perturbed.push_back(perturbed_rate);
    }
  }
  return result;
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<PerturbationSpec> specs(PerturbationKind kind, const std::vector<double>& values) {
  std::vector<PerturbationSpec> out;
  for (double v : values) {
    out.push_back(kind == PerturbationKind::kSinusoidal ? PerturbationSpec::sinusoidal(v)
                                                        : PerturbationSpec::gaussian(v));
  }
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

std::string to_string(TableId id) {
  return "T" + std::to_string(static_cast<int>(id) + 2);
}

TableId parse_table_id(const std::string& text) {
  const std::string lower = lowercase(text);
  if (lower.size() == 2 && lower[0] == 't' && lower[1] >= '2' && lower[1] <= '9') {
    return static_cast<TableId>(lower[1] - '2');
  }
  throw Error(ErrorCode::kConfigError, "unknown table '" + text + "' (expected T2..T9)");
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigError, what); };
  if (repetitions < 1) fail("repetitions must be >= 1");
  if (epochs.empty()) fail("need at least one epoch milestone");
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    if (epochs[i] < 1 || (i > 0 && epochs[i] <= epochs[i - 1])) {
      fail("epoch milestones must be positive and strictly increasing");
    }
  }
  for (const PerturbationSpec& spec : perturbations) spec.validate();
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) fail("split_ratio must lie in (0, 1)");
  if (topology.hidden.empty()) fail("need at least one hidden layer");
  for (std::size_t size : topology.hidden) {
    if (size == 0) fail("hidden layers must be non-empty");
  }
  for (std::size_t i : topology.inhibitory) {
    if (i >= topology.hidden.front()) fail("inhibitory index outside the first hidden layer");
  }
  if (topology.terminals < 1) fail("need at least one terminal");
  if (!(topology.tau > 0.0)) fail("tau must be > 0");
  if (!(topology.threshold > 0.0)) fail("threshold must be > 0");
  if (!(topology.dt > 0.0 && topology.dt <= 0.1)) fail("dt must lie in (0, 0.1]");
  const double max_delay = topology.first_delay + static_cast<double>(topology.terminals - 1);
  if (!(topology.t_max > max_delay + encoder.interval)) {
    fail("t_max must exceed the largest delay plus the coding interval");
  }
  if (!(topology.init.high >= topology.init.low)) fail("init range is empty");
  if (encoder.kind == EncoderKind::kPopulation && encoder.fields < 3) {
    fail("population coding needs at least 3 fields");
  }
  if (dataset == DatasetId::kXor && encoder.kind != EncoderKind::kLinear) {
    fail("XOR uses the linear encoder");
  }
  if (!(encoder.early < encoder.late)) fail("encoder.early must precede encoder.late");
  if (subsample && subsample_size < 2) fail("subsample_size must be >= 2");
  if (jobs < 1) fail("jobs must be >= 1");
  train.validate();
}

KeyValues ExperimentConfig::to_kv() const {
  KeyValues kv;
  kv["experiment.name"] = name;
  kv["experiment.dataset"] = to_string(dataset);
  kv["experiment.epochs"] = join_sizes(epochs);
  kv["experiment.repetitions"] = std::to_string(repetitions);
  kv["experiment.seed"] = std::to_string(seed);
  kv["experiment.split_ratio"] = format_double(split_ratio);
  kv["experiment.subsample"] = subsample ? "1" : "0";
  kv["experiment.subsample_size"] = std::to_string(subsample_size);
  kv["experiment.xor_perturbed_samples"] = std::to_string(xor_perturbed_samples);
  kv["experiment.jobs"] = std::to_string(jobs);

  kv["topology.hidden"] = join_sizes(topology.hidden);
  kv["topology.inhibitory"] = join_sizes(topology.inhibitory);
  kv["topology.m"] = std::to_string(topology.terminals);
  kv["topology.first_delay"] = format_double(topology.first_delay);
  kv["topology.tau"] = format_double(topology.tau);
  kv["topology.threshold"] = format_double(topology.threshold);
  kv["topology.dt"] = format_double(topology.dt);
  kv["topology.t_max"] = format_double(topology.t_max);
  kv["topology.init_low"] = format_double(topology.init.low);
  kv["topology.init_high"] = format_double(topology.init.high);

  kv["encoder.kind"] = encoder.kind == EncoderKind::kLinear ? "linear" : "population";
  kv["encoder.interval"] = format_double(encoder.interval);
  kv["encoder.fields"] = std::to_string(encoder.fields);
  kv["encoder.beta"] = format_double(encoder.beta);
  kv["encoder.firing_cutoff"] = format_double(encoder.firing_cutoff);
  kv["encoder.early"] = format_double(encoder.early);
  kv["encoder.late"] = format_double(encoder.late);
  kv["encoder.target_tolerance"] = format_double(encoder.target_tolerance);

  kv["train.eta"] = format_double(train.eta);
  kv["train.shuffle"] = train.shuffle_each_epoch ? "1" : "0";
  kv["train.target_error"] = format_double(train.target_error);
  kv["train.denominator_floor"] = format_double(train.denominator_floor);
  kv["train.boost_factor"] = format_double(train.boost_factor);

  std::vector<double> sinusoidal, gaussian;
  bool literal = false;
  bool none = false;
  for (const PerturbationSpec& spec : perturbations) {
    if (spec.kind == PerturbationKind::kSinusoidal) sinusoidal.push_back(spec.amplitude);
    if (spec.kind == PerturbationKind::kGaussian) gaussian.push_back(spec.r_star);
    if (spec.kind == PerturbationKind::kNone) none = true;
    literal = literal || spec.literal_sign;
  }
  kv["perturbation.none"] = none ? "1" : "0";
  kv["perturbation.sinusoidal"] = join_doubles(sinusoidal);
  kv["perturbation.gaussian"] = join_doubles(gaussian);
  kv["perturbation.literal_sign"] = literal ? "1" : "0";
  return kv;
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValues& kv) {
  ExperimentConfig config;
  const KeyValues known = config.to_kv();
  for (const auto& [key, value] : kv) {
    if (!known.contains(key)) throw Error(ErrorCode::kConfigError, "unknown key '" + key + "'");
  }
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto v = get("experiment.name")) config.name = *v;
  if (auto v = get("experiment.dataset")) config.dataset = parse_dataset_id(*v);
  if (auto v = get("experiment.epochs")) config.epochs = parse_sizes(*v);
  if (auto v = get("experiment.repetitions")) config.repetitions = parse_size(*v);
  if (auto v = get("experiment.seed")) config.seed = parse_u64(*v);
  if (auto v = get("experiment.split_ratio")) config.split_ratio = parse_double(*v);
  if (auto v = get("experiment.subsample")) config.subsample = parse_bool(*v);
  if (auto v = get("experiment.subsample_size")) config.subsample_size = parse_size(*v);
  if (auto v = get("experiment.xor_perturbed_samples")) {
    config.xor_perturbed_samples = parse_size(*v);
  }
  if (auto v = get("experiment.jobs")) config.jobs = parse_size(*v);

  TopologyConfig& t = config.topology;
  if (auto v = get("topology.hidden")) t.hidden = parse_sizes(*v);
  if (auto v = get("topology.inhibitory")) t.inhibitory = parse_sizes(*v);
  if (auto v = get("topology.m")) t.terminals = parse_size(*v);
  if (auto v = get("topology.first_delay")) t.first_delay = parse_double(*v);
  if (auto v = get("topology.tau")) t.tau = parse_double(*v);
  if (auto v = get("topology.threshold")) t.threshold = parse_double(*v);
  if (auto v = get("topology.dt")) t.dt = parse_double(*v);
  if (auto v = get("topology.t_max")) t.t_max = parse_double(*v);
  if (auto v = get("topology.init_low")) t.init.low = parse_double(*v);
  if (auto v = get("topology.init_high")) t.init.high = parse_double(*v);

  EncoderParams& e = config.encoder;
  if (auto v = get("encoder.kind")) {
    if (*v == "linear") {
      e.kind = EncoderKind::kLinear;
    } else if (*v == "population") {
      e.kind = EncoderKind::kPopulation;
    } else {
      throw Error(ErrorCode::kConfigError, "unknown encoder kind '" + *v + "'");
    }
  }
  if (auto v = get("encoder.interval")) e.interval = parse_double(*v);
  if (auto v = get("encoder.fields")) e.fields = parse_size(*v);
  if (auto v = get("encoder.beta")) e.beta = parse_double(*v);
  if (auto v = get("encoder.firing_cutoff")) e.firing_cutoff = parse_double(*v);
  if (auto v = get("encoder.early")) e.early = parse_double(*v);
  if (auto v = get("encoder.late")) e.late = parse_double(*v);
  if (auto v = get("encoder.target_tolerance")) e.target_tolerance = parse_double(*v);

  TrainConfig& tr = config.train;
  if (auto v = get("train.eta")) tr.eta = parse_double(*v);
  if (auto v = get("train.shuffle")) tr.shuffle_each_epoch = parse_bool(*v);
  if (auto v = get("train.target_error")) tr.target_error = parse_double(*v);
  if (auto v = get("train.denominator_floor")) tr.denominator_floor = parse_double(*v);
  if (auto v = get("train.boost_factor")) tr.boost_factor = parse_double(*v);

  config.perturbations.clear();
  bool literal = false;
  if (auto v = get("perturbation.literal_sign")) literal = parse_bool(*v);
  if (auto v = get("perturbation.none"); v && parse_bool(*v)) {
    config.perturbations.push_back(PerturbationSpec::none());
  }
  if (auto v = get("perturbation.sinusoidal")) {
    for (auto& s : specs(PerturbationKind::kSinusoidal, parse_doubles(*v))) {
      config.perturbations.push_back(s);
    }
  }
  if (auto v = get("perturbation.gaussian")) {
    for (auto s : specs(PerturbationKind::kGaussian, parse_doubles(*v))) {
      s.literal_sign = literal;
      config.perturbations.push_back(s);
    }
  }
  if (!config.epochs.empty()) config.train.max_epochs = config.epochs.back();
  config.validate();
  return config;
}

ExperimentConfig default_config(TableId id) {
  ExperimentConfig config;
  config.name = to_string(id);
  switch (id) {
    case TableId::kT2:
    case TableId::kT3:
      config.dataset = DatasetId::kXor;
      config.encoder.kind = EncoderKind::kLinear;
      config.encoder.interval = kXorInterval;
      config.topology.hidden = {5};
      config.topology.inhibitory = {4};
      config.train.target_error = 1.0;
      break;
    case TableId::kT4:
    case TableId::kT5:
      config.dataset = DatasetId::kIris;
      config.encoder.fields = 12;
      config.topology.hidden = {10};
      config.topology.inhibitory = {9};
      config.train.target_error = 0.0;
      break;
    case TableId::kT6:
    case TableId::kT7:
      config.dataset = DatasetId::kWbc;
      config.encoder.fields = 7;
      config.topology.hidden = {15};
      config.topology.inhibitory = {14};
      config.train.target_error = 0.0;
      break;
    case TableId::kT8:
    case TableId::kT9:
      config.dataset = DatasetId::kLandsat;
      config.encoder.fields = 25;
      config.topology.hidden = {20};
      config.topology.inhibitory = {19};
      config.train.target_error = 0.0;
      break;
  }
  const bool sinusoidal = id == TableId::kT2 || id == TableId::kT4 || id == TableId::kT6 ||
                          id == TableId::kT8;
  config.perturbations = sinusoidal ? specs(PerturbationKind::kSinusoidal, kAmplitudes)
                                    : specs(PerturbationKind::kGaussian, kRadii);
  std::vector<std::size_t> epochs;
  for (const PublishedRow& row : published_table(id)) {
    if (epochs.empty() || epochs.back() != row.epochs) epochs.push_back(row.epochs);
  }
  config.epochs = epochs;
  config.train.max_epochs = epochs.back();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open config " + path.string());
  try {
    return ExperimentConfig::from_kv(read_key_values(in));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw Error(ErrorCode::kConfigError, e.what());
    throw;
  }
}

void write_config(const ExperimentConfig& config, std::ostream& out) {
  out << "# spikerobust experiment config\n";
  write_key_values(config.to_kv(), out);
}

double classification_rate(const NetworkTopology& net, std::span<const EncodedSample> samples,
                           const OutputCode& code) {
  check(!samples.empty(), ErrorCode::kEmptyDataset, "no samples to classify");
  std::size_t correct = 0;
  for (const EncodedSample& sample : samples) {
    const SpikeSchedule schedule = simulate_forward(net, sample.inputs);
    const auto predicted = code.decode(schedule.outputs());
    if (predicted && *predicted == sample.label) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(samples.size());
}

NetworkTopology build_network(const TopologyConfig& config, std::size_t inputs,
                              std::size_t outputs, Rng& rng) {
  std::vector<std::size_t> sizes = {inputs};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(outputs);
  std::vector<double> delays(config.terminals);
  for (std::size_t k = 0; k < config.terminals; ++k) {
    delays[k] = config.first_delay + static_cast<double>(k);
  }
  NetworkTopology net = make_network(sizes, std::move(delays), KernelParams{config.tau},
                                     config.threshold, config.dt, config.t_max);
  for (std::size_t i : config.inhibitory) net.neurons[1].at(i).is_inhibitory = true;
  initialize_weights(net, config.init, rng);
  return net;
}

ExperimentData prepare_experiment(const ExperimentConfig& config, const TabularDataset& first,
                                  const TabularDataset& second, std::uint64_t seed) {
  TabularDataset train, test;
  if (config.dataset == DatasetId::kXor) {
    train = first;
    test = first;
  } else if (config.dataset == DatasetId::kLandsat) {
    train = first;
    test = second;
  } else {
    std::tie(train, test) = split(first, config.split_ratio, seed);
  }
  std::vector<std::size_t> milestones = config.epochs;
  if (config.subsample && train.size() > config.subsample_size) {
    const double scale = static_cast<double>(config.subsample_size) /
                         static_cast<double>(train.size());
    train = stratified_subsample(train, config.subsample_size, seed);
    for (std::size_t& e : milestones) {
      e = std::max<std::size_t>(1, static_cast<std::size_t>(
                                       std::lround(static_cast<double>(e) * scale)));
    }
  }

  const FeatureStats stats = compute_stats(train);
  FeatureEncoder encoder(config.encoder, stats.min, stats.max);
  OutputCode code;
  code.n_classes = train.num_classes();
  code.n_outputs = config.dataset == DatasetId::kXor ? 1 : code.n_classes;
  code.early = config.encoder.early;
  code.late = config.encoder.late;
  code.target_tolerance = config.encoder.target_tolerance;
  auto train_samples = encode_all(train, encoder, code);
  auto test_samples = encode_all(test, encoder, code);
  return {std::move(train),         std::move(test),         std::move(encoder), code,
          std::move(train_samples), std::move(test_samples), std::move(milestones)};
}

std::vector<EncodedSample> perturbed_samples(const ExperimentConfig& config,
                                             const ExperimentData& data,
                                             const PerturbationSpec& spec,
                                             std::uint64_t stream) {
  std::vector<EncodedSample> out;
  if (config.dataset == DatasetId::kXor) {
    const std::vector<double> target = {1.0, 1.0};
    const std::size_t label = 0;
    const auto set = generate_perturbed_set(target, config.xor_perturbed_samples, spec, stream);
    for (const auto& v : set.vectors) {
      out.push_back({data.encoder.encode(v), data.code.desired(label), label});
    }
    return out;
  }
  Rng rng = make_rng(spec.seed, stream);
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    const auto v = perturb(data.test.features[i], spec, rng);
    out.push_back({data.encoder.encode(v), data.code.desired(data.test.labels[i]),
                   data.test.labels[i]});
  }
  return out;
}

TrainedModel train_model(const ExperimentConfig& config, const std::filesystem::path& data_dir) {
  config.validate();
  const auto [first, second] = load_benchmark(config.dataset, data_dir);
  const ExperimentData data = prepare_experiment(config, first, second, config.seed);
  Rng init_rng = make_rng(config.seed, 1);
  TrainedModel model{
      {build_network(config.topology, data.encoder.width(), data.code.n_outputs, init_rng),
       data.encoder},
      {},
      0,
      0.0,
      0.0};
  TrainConfig train_config = config.train;
  train_config.max_epochs = data.milestones.back();
  model.trace = train(model.checkpoint.network, data.train_samples, train_config, config.seed);
  model.epochs_run = model.trace.epoch_error.size();
  model.train_rate = classification_rate(model.checkpoint.network, data.train_samples, data.code);
  model.test_rate = classification_rate(model.checkpoint.network, data.test_samples, data.code);
  return model;
}

ExperimentReport evaluate_model(const Checkpoint& checkpoint, const ExperimentConfig& input_config,
                                const std::filesystem::path& data_dir) {
  ExperimentConfig config = input_config;
  if (config.perturbations.empty()) config.perturbations.push_back(PerturbationSpec::none());
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const auto [first, second] = load_benchmark(config.dataset, data_dir);
  ExperimentData data = prepare_experiment(config, first, second, config.seed);
  if (checkpoint.encoder) {
    data.encoder = *checkpoint.encoder;
    data.train_samples = encode_all(data.train, data.encoder, data.code);
    data.test_samples = encode_all(data.test, data.encoder, data.code);
  }
  const NetworkTopology& net = checkpoint.network;
  check(net.layer_sizes.front() == data.encoder.width() &&
            net.layer_sizes.back() == data.code.n_outputs,
        ErrorCode::kTopologyMismatch, "network does not match the dataset encoding");

  ExperimentReport report;
  report.name = config.name;
  report.dataset = to_string(config.dataset);
  report.seeds = {config.seed};
  report.train_size = data.train.size();
  report.test_size = data.test.size();
  const double train_rate = classification_rate(net, data.train_samples, data.code);
  const double clean_rate = classification_rate(net, data.test_samples, data.code);
  for (std::size_t q = 0; q < config.perturbations.size(); ++q) {
    PerturbationSpec spec = config.perturbations[q];
    spec.seed = config.seed;
    ReportRow row;
    row.kind = spec.kind;
    row.parameter = spec.parameter();
    row.train_rate = train_rate;
    row.clean_rate = clean_rate;
    row.perturbed_rate =
        spec.kind == PerturbationKind::kNone
            ? clean_rate
            : classification_rate(net, perturbed_samples(config, data, spec, q + 1), data.code);
    row.train_raw = {row.train_rate};
    row.clean_raw = {row.clean_rate};
    row.perturbed_raw = {row.perturbed_rate};
    report.rows.push_back(std::move(row));
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& input_config,
                                const std::filesystem::path& data_dir) {
  ExperimentConfig config = input_config;
  if (config.perturbations.empty()) config.perturbations.push_back(PerturbationSpec::none());
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  const auto [first, second] = load_benchmark(config.dataset, data_dir);
  const ExperimentData sized = prepare_experiment(config, first, second, config.seed);
  ExperimentReport report;
  report.name = config.name;
  report.dataset = to_string(config.dataset);
  for (std::size_t r = 0; r < config.repetitions; ++r) report.seeds.push_back(config.seed + r);
  report.train_size = sized.train.size();
  report.test_size = sized.test.size();

  std::vector<RepetitionResult> results(config.repetitions);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t rep = next++; rep < config.repetitions; rep = next++) {
      try {
        results[rep] = run_repetition(config, first, second, rep);
      } catch (const std::exception& e) {
        results[rep] = {};
        results[rep].failure = e.what();
      }
    }
  };
  const std::size_t workers = std::min(config.jobs, config.repetitions);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  const std::size_t n_specs = config.perturbations.size();
  for (std::size_t m = 0; m < config.epochs.size(); ++m) {
    for (std::size_t q = 0; q < n_specs; ++q) {
      ReportRow row;
      row.epochs = config.epochs[m];
      row.trained_epochs = sized.milestones[m];
      row.kind = config.perturbations[q].kind;
      row.parameter = config.perturbations[q].parameter();
      const std::size_t index = m * n_specs + q;
      for (const RepetitionResult& result : results) {
        if (!result.failure.empty()) continue;
        row.clean_raw.push_back(result.clean[index]);
        row.perturbed_raw.push_back(result.perturbed[index]);
        row.train_raw.push_back(result.train[index]);
      }
      row.clean_rate = mean(row.clean_raw);
      row.perturbed_rate = mean(row.perturbed_raw);
      row.train_rate = mean(row.train_raw);
      report.rows.push_back(std::move(row));
    }
  }
  for (std::size_t r = 0; r < results.size(); ++r) {
    if (!results[r].failure.empty()) {
      report.failures.push_back("repetition " + std::to_string(r) + " (seed " +
                                std::to_string(config.seed + r) + "): " + results[r].failure);
    }
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::optional<std::pair<double, double>> published_values(TableId id, std::size_t epochs,
                                                      double parameter) {
  for (const PublishedRow& row : published_table(id)) {
    if (row.epochs == epochs && std::abs(row.parameter - parameter) < 1e-12) {
      return std::make_pair(row.clean, row.perturbed);
    }
  }
  return std::nullopt;
}

ExperimentReport reproduce(TableId id, const ReproduceOptions& options) {
  ExperimentConfig config = options.config ? *options.config : default_config(id);
  if (options.seed) config.seed = *options.seed;
  if (options.repetitions) config.repetitions = *options.repetitions;
  config.subsample = config.subsample || options.subsample;
  config.jobs = options.jobs;
  ExperimentReport report = run_experiment(config, options.data_dir);
  for (ReportRow& row : report.rows) {
    if (auto published = published_values(id, row.epochs, row.parameter)) {
      row.published_clean = published->first;
      row.published_perturbed = published->second;
    }
  }
  return report;
}

void write_report_text(const ExperimentReport& report, std::ostream& out) {
  char line[256];
  out << "experiment " << report.name << " on " << report.dataset << " (train "
      << report.train_size << ", test " << report.test_size << ", " << report.seeds.size()
      << " repetitions)\n";
  std::snprintf(line, sizeof line, "%7s %7s %-10s %9s %8s %8s %8s %9s %9s\n", "epochs",
                "trained", "kind", "param", "train", "clean", "perturb", "pub_clean",
                "pub_prt");
  out << line;
  for (const ReportRow& row : report.rows) {
    const auto cell = [](const std::optional<double>& v) {
      char buf[32];
      if (v) {
        std::snprintf(buf, sizeof buf, "%9.2f", *v);
      } else {
        std::snprintf(buf, sizeof buf, "%9s", "-");
      }
      return std::string(buf);
    };
    std::snprintf(line, sizeof line, "%7zu %7zu %-10s %9g %8.2f %8.2f %8.2f %s %s\n",
                  row.epochs, row.trained_epochs, to_string(row.kind).c_str(), row.parameter,
                  row.train_rate, row.clean_rate, row.perturbed_rate,
                  cell(row.published_clean).c_str(), cell(row.published_perturbed).c_str());
    out << line;
  }
  for (const std::string& failure : report.failures) out << "failed: " << failure << '\n';
  std::snprintf(line, sizeof line, "wall clock %.1f s\n", report.wall_clock_seconds);
  out << line;
}

void write_report_json(const ExperimentReport& report, std::ostream& out) {
  using nlohmann::json;
  json doc;
  doc["name"] = report.name;
  doc["dataset"] = report.dataset;
  doc["seeds"] = report.seeds;
  doc["train_size"] = report.train_size;
  doc["test_size"] = report.test_size;
  doc["failures"] = report.failures;
  json rows = json::array();
  for (const ReportRow& row : report.rows) {
    json r;
    r["epochs"] = row.epochs;
    r["trained_epochs"] = row.trained_epochs;
    r["perturbation"] = to_string(row.kind);
    r["parameter"] = row.parameter;
    r["clean_rate"] = row.clean_rate;
    r["perturbed_rate"] = row.perturbed_rate;
    r["train_rate"] = row.train_rate;
    r["clean_raw"] = row.clean_raw;
    r["perturbed_raw"] = row.perturbed_raw;
    r["train_raw"] = row.train_raw;
    r["published_clean"] = row.published_clean ? json(*row.published_clean) : json(nullptr);
    r["published_perturbed"] = row.published_perturbed ? json(*row.published_perturbed) : json(nullptr);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

void dump_perturbation_scatter(const PerturbationSpec& spec, std::span<const double> x0,
                               std::size_t n, const std::filesystem::path& path) {
  const PerturbedSet set = generate_perturbed_set(x0, n, spec);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  write_perturbed_set(set, out);
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

}  // namespace spikerobust
