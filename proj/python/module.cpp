#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "spikerobust/error.hpp"
#include "spikerobust/harness.hpp"
#include "spikerobust/kernel.hpp"
#include "spikerobust/simulate.hpp"

namespace py = pybind11;
using namespace spikerobust;

namespace {

std::string report_json(const ExperimentReport& report) {
  std::ostringstream out;
  write_report_json(report, out);
  return out.str();
}

ExperimentConfig config_from(const KeyValues& kv) { return ExperimentConfig::from_kv(kv); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spiking network training and perturbation experiments";

  // Messages start with the error code, e.g. "CONFIG_ERROR: ...".
  py::register_exception<Error>(m, "Error");

  m.def("spike_response", [](double t, double tau) { return spike_response(t, KernelParams{tau}); },
        py::arg("t"), py::arg("tau") = 7.0);
  m.def("spike_response_derivative",
        [](double t, double tau) { return spike_response_derivative(t, KernelParams{tau}); },
        py::arg("t"), py::arg("tau") = 7.0);

  py::class_<NetworkTopology>(m, "Network")
      .def(py::init([](std::vector<std::size_t> sizes, std::size_t terminals, double tau,
                       double threshold, double dt, double t_max) {
             return make_network(sizes, unit_delays(terminals), KernelParams{tau}, threshold, dt,
                                 t_max);
           }),
           py::arg("layer_sizes"), py::arg("terminals") = 16, py::arg("tau") = 7.0,
           py::arg("threshold") = 1.0, py::arg("dt") = 0.01, py::arg("t_max") = 50.0)
      .def_readonly("layer_sizes", &NetworkTopology::layer_sizes)
      .def_readonly("delays", &NetworkTopology::delays)
      .def_readonly("dt", &NetworkTopology::dt)
      .def_readonly("t_max", &NetworkTopology::t_max)
      .def("initialize", [](NetworkTopology& net, std::uint64_t seed, double low, double high) {
             Rng rng = make_rng(seed, 1);
             initialize_weights(net, WeightInit{low, high}, rng);
           },
           py::arg("seed"), py::arg("low") = 1.0, py::arg("high") = 10.0)
      .def("set_inhibitory", [](NetworkTopology& net, std::size_t layer, std::size_t neuron) {
             check(layer < net.num_layers() && neuron < net.layer_sizes[layer],
                   ErrorCode::kTopologyMismatch, "no such neuron");
             net.neurons[layer][neuron].is_inhibitory = true;
             net.clamp_inhibitory();
           })
      .def("weights", [](const NetworkTopology& net, std::size_t layer) {
             check(layer < net.synapses.size(), ErrorCode::kTopologyMismatch, "no such synapse layer");
             const auto flat = net.synapses[layer].flat();
             return std::vector<double>(flat.begin(), flat.end());
           },
           "Weights of synapse layer `layer`, flattened as [pre][post][terminal].")
      .def("set_weights", [](NetworkTopology& net, std::size_t layer, const std::vector<double>& w) {
             check(layer < net.synapses.size(), ErrorCode::kTopologyMismatch, "no such synapse layer");
             auto flat = net.synapses[layer].flat();
             check(w.size() == flat.size(), ErrorCode::kTopologyMismatch, "weight count mismatch");
             std::copy(w.begin(), w.end(), flat.begin());
           })
      .def("simulate", [](const NetworkTopology& net, const std::vector<double>& input) {
             return simulate_forward(net, input).layers;
           },
           "Firing time of every neuron, layer by layer; inf marks a silent neuron.")
      .def("save", [](const NetworkTopology& net, const std::filesystem::path& path) {
             save_checkpoint(Checkpoint{net, std::nullopt}, path);
           })
      .def_static("load", [](const std::filesystem::path& path) { return load_checkpoint(path).network; });

  py::class_<EncodedSample>(m, "Sample")
      .def(py::init<std::vector<double>, std::vector<double>, std::size_t>(), py::arg("inputs"),
           py::arg("desired"), py::arg("label") = 0)
      .def_readwrite("inputs", &EncodedSample::inputs)
      .def_readwrite("desired", &EncodedSample::desired)
      .def_readwrite("label", &EncodedSample::label);
  m.def("encode_xor", &encode_xor, py::arg("a"), py::arg("b"));

  m.def("train",
        [](NetworkTopology& net, const std::vector<EncodedSample>& samples, double eta,
           std::size_t max_epochs, double target_error, std::uint64_t seed) {
          TrainConfig config;
          config.eta = eta;
          config.max_epochs = max_epochs;
          config.target_error = target_error;
          return train(net, samples, config, seed).epoch_error;
        },
        py::arg("network"), py::arg("samples"), py::arg("eta") = 0.01, py::arg("max_epochs") = 500,
        py::arg("target_error") = 1.0, py::arg("seed") = 1,
        "Online training in place; returns the error of every epoch.");

  m.def("perturb",
        [](const std::vector<double>& x0, const std::string& kind, double parameter, std::size_t n,
           std::uint64_t seed, std::uint64_t stream) {
          PerturbationSpec spec;
          spec.kind = parse_perturbation_kind(kind);
          if (spec.kind == PerturbationKind::kSinusoidal) spec.amplitude = parameter;
          if (spec.kind == PerturbationKind::kGaussian) spec.r_star = parameter;
          spec.seed = seed;
          spec.validate();
          return generate_perturbed_set(x0, n, spec, stream).vectors;
        },
        py::arg("x0"), py::arg("kind"), py::arg("parameter"), py::arg("n") = 1,
        py::arg("seed") = 0, py::arg("stream") = 0);

  m.def("default_config", [](const std::string& table) {
    return default_config(parse_table_id(table)).to_kv();
  });
  m.def("run_experiment",
        [](const KeyValues& config, const std::filesystem::path& data_dir) {
          const ExperimentConfig parsed = config_from(config);
          py::gil_scoped_release release;
          return report_json(run_experiment(parsed, data_dir));
        },
        py::arg("config"), py::arg("data_dir"), "Runs a config and returns the JSON report.");
  m.def("reproduce",
        [](const std::string& table, const std::filesystem::path& data_dir,
           std::optional<std::uint64_t> seed, std::optional<std::size_t> repetitions,
           bool subsample, std::size_t jobs) {
          ReproduceOptions options;
          options.data_dir = data_dir;
          options.seed = seed;
          options.repetitions = repetitions;
          options.subsample = subsample;
          options.jobs = jobs;
          const TableId id = parse_table_id(table);
          py::gil_scoped_release release;
          return report_json(reproduce(id, options));
        },
        py::arg("table"), py::arg("data_dir"), py::arg("seed") = py::none(),
        py::arg("repetitions") = py::none(), py::arg("subsample") = false, py::arg("jobs") = 1);
}
