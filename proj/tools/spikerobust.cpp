// Command line front end: train, evaluate, perturb-dump, reproduce and
// print-default-config.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spikerobust/checkpoint.hpp"
#include "spikerobust/error.hpp"
#include "spikerobust/harness.hpp"
#include "spikerobust/keyvalue.hpp"
#include "spikerobust/perturbation.hpp"

namespace fs = std::filesystem;
using namespace spikerobust;

namespace {

enum Exit { kOk = 0, kConfig = 2, kMissingData = 3, kRuntime = 4 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  bool subsample = false;
  std::string out = "out";
  std::string data = "data";
  std::size_t jobs = 1;
  std::string table;
  std::string model;
  std::string kind = "gaussian";
  double parameter = 0.1;
  std::size_t count = 400;
  std::string x0 = "1,1";
};

ExperimentConfig resolve_config(const Options& opt) {
  ExperimentConfig config = opt.config.empty() ? default_config(TableId::kT2)
                                               : load_config(opt.config);
  if (opt.seed) config.seed = *opt.seed;
  if (opt.reps) config.repetitions = *opt.reps;
  if (opt.subsample) config.subsample = true;
  config.jobs = opt.jobs;
  config.validate();
  return config;
}

fs::path output_dir(const Options& opt) {
  fs::path dir(opt.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
  return dir;
}

void write_reports(const ExperimentReport& report, const fs::path& dir, const std::string& stem) {
  write_report_text(report, std::cout);
  std::ofstream text(dir / (stem + ".txt"));
  write_report_text(report, text);
  std::ofstream json(dir / (stem + ".json"));
  write_report_json(report, json);
  if (!text || !json) throw Error(ErrorCode::kIoError, "failed writing reports to " + dir.string());
  std::cout << "reports written to " << (dir / (stem + ".txt")).string() << " and "
            << (dir / (stem + ".json")).string() << '\n';
}

int cmd_train(const Options& opt) {
  const ExperimentConfig config = resolve_config(opt);
  const TrainedModel model = train_model(config, opt.data);
  const fs::path dir = output_dir(opt);
  save_checkpoint(model.checkpoint, dir / "network.ckpt");
  std::ofstream trace(dir / "trace.txt");
  write_trace(model.trace, trace);
  std::cout << "trained " << model.epochs_run << " epochs; train rate " << model.train_rate
            << "%, test rate " << model.test_rate << "%\n"
            << "checkpoint " << (dir / "network.ckpt").string() << '\n';
  return kOk;
}

int cmd_evaluate(const Options& opt) {
  const ExperimentConfig config = resolve_config(opt);
  const fs::path model = opt.model.empty() ? fs::path(opt.out) / "network.ckpt" : fs::path(opt.model);
  const Checkpoint checkpoint = load_checkpoint(model);
  const ExperimentReport report = evaluate_model(checkpoint, config, opt.data);
  write_reports(report, output_dir(opt), "evaluate");
  return kOk;
}

int cmd_perturb_dump(const Options& opt) {
  PerturbationSpec spec;
  spec.kind = parse_perturbation_kind(opt.kind);
  if (spec.kind == PerturbationKind::kSinusoidal) spec.amplitude = opt.parameter;
  if (spec.kind == PerturbationKind::kGaussian) spec.r_star = opt.parameter;
  spec.seed = opt.seed.value_or(1);
  spec.validate();
  const std::vector<double> x0 = parse_doubles(opt.x0);
  if (opt.count < 1) throw Error(ErrorCode::kConfigError, "--n must be >= 1");
  const fs::path path = output_dir(opt) / ("perturbed_" + opt.kind + "_" +
                                           format_double(spec.parameter(), 6) + ".txt");
  dump_perturbation_scatter(spec, x0, opt.count, path);
  std::cout << "wrote " << opt.count << " points to " << path.string() << '\n';
  return kOk;
}

int cmd_reproduce(const Options& opt) {
  const TableId id = parse_table_id(opt.table);
  ReproduceOptions ro;
  if (!opt.config.empty()) ro.config = load_config(opt.config);
  ro.data_dir = opt.data;
  ro.seed = opt.seed;
  ro.repetitions = opt.reps;
  ro.subsample = opt.subsample;
  ro.jobs = opt.jobs;
  const ExperimentReport report = reproduce(id, ro);
  write_reports(report, output_dir(opt), to_string(id));
  return report.failures.empty() ? kOk : kRuntime;
}

int cmd_print_default_config(const Options& opt) {
  write_config(default_config(parse_table_id(opt.table)), std::cout);
  return kOk;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
      return kConfig;
    case ErrorCode::kMissingDataset:
      return kMissingData;
    default:
      return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking network robustness experiments"};
  app.require_subcommand(1);
  Options opt;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Experiment config file");
    sub->add_option("--seed", opt.seed, "Base seed");
    sub->add_option("--reps", opt.reps, "Repetitions");
    sub->add_flag("--subsample", opt.subsample, "Train on a stratified subset");
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--data", opt.data, "Dataset directory")->capture_default_str();
    sub->add_option("--jobs", opt.jobs, "Parallel repetitions")->capture_default_str();
  };

  auto* train_cmd = app.add_subcommand("train", "Train one network and save a checkpoint");
  common(train_cmd);
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Clean and perturbed rates of a checkpoint");
  common(evaluate_cmd);
  evaluate_cmd->add_option("--model", opt.model, "Checkpoint (default <out>/network.ckpt)");
  auto* dump_cmd = app.add_subcommand("perturb-dump", "Write perturbed copies of a point");
  common(dump_cmd);
  dump_cmd->add_option("--kind", opt.kind, "sinusoidal or gaussian")->capture_default_str();
  dump_cmd->add_option("--param", opt.parameter, "A or r*")->capture_default_str();
  dump_cmd->add_option("--n", opt.count, "Number of points")->capture_default_str();
  dump_cmd->add_option("--x0", opt.x0, "Base point, comma separated")->capture_default_str();
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Run one of the predefined experiment grids");
  common(reproduce_cmd);
  reproduce_cmd->add_option("table", opt.table, "T2..T9")->required();
  auto* print_cmd = app.add_subcommand("print-default-config", "Print the config of a predefined grid");
  print_cmd->add_option("table", opt.table, "T2..T9")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*train_cmd) return cmd_train(opt);
    if (*evaluate_cmd) return cmd_evaluate(opt);
    if (*dump_cmd) return cmd_perturb_dump(opt);
    if (*reproduce_cmd) return cmd_reproduce(opt);
    if (*print_cmd) return cmd_print_default_config(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}
