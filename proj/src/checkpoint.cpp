#include "spikerobust/checkpoint.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "spikerobust/error.hpp"
#include "spikerobust/keyvalue.hpp"

namespace spikerobust {

namespace {

constexpr const char* kFormat = "spikerobust-network";
constexpr const char* kWeightsMarker = "[weights]";

}  // namespace

void write_checkpoint(const Checkpoint& checkpoint, std::ostream& out) {
  const NetworkTopology& net = checkpoint.network;
  net.validate();
  KeyValues kv;
  kv["format"] = kFormat;
  kv["version"] = std::to_string(kCheckpointVersion);
  std::vector<double> sizes(net.layer_sizes.begin(), net.layer_sizes.end());
  kv["layers"] = join_doubles(sizes);
  kv["delays"] = join_doubles(net.delays);
  kv["kernel.tau"] = format_double(net.kernel.tau);
  kv["sim.dt"] = format_double(net.dt);
  kv["sim.t_max"] = format_double(net.t_max);
  for (std::size_t l = 1; l < net.num_layers(); ++l) {
    std::vector<double> thresholds;
    for (const NeuronParams& p : net.neurons[l]) thresholds.push_back(p.threshold);
    kv["thresholds." + std::to_string(l)] = join_doubles(thresholds);
  }
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    std::string indices;
    for (std::size_t i = 0; i < net.neurons[l].size(); ++i) {
      if (!net.neurons[l][i].is_inhibitory) continue;
      if (!indices.empty()) indices += ',';
      indices += std::to_string(i);
    }
    if (!indices.empty()) kv["inhibitory." + std::to_string(l)] = indices;
  }
  if (checkpoint.encoder) {
    for (auto& [key, value] : checkpoint.encoder->to_kv()) kv[key] = value;
  }

  out << "# spikerobust network checkpoint\n";
  write_key_values(kv, out);
  out << kWeightsMarker << '\n';
  for (std::size_t l = 0; l < net.synapses.size(); ++l) {
    const SynapseArray& syn = net.synapses[l];
    out << "synapse " << l << ' ' << syn.pre_size() << ' ' << syn.post_size() << ' '
        << syn.terminals() << '\n';
    for (std::size_t i = 0; i < syn.pre_size(); ++i) {
      for (std::size_t j = 0; j < syn.post_size(); ++j) {
        const auto weights = syn.connection(i, j);
        for (std::size_t k = 0; k < weights.size(); ++k) {
          if (k) out << ' ';
          out << format_double(weights[k], 9);
        }
        out << '\n';
      }
    }
  }
}

namespace {

Checkpoint parse_checkpoint(std::istream& in) {
  const KeyValues kv = read_key_values(in, kWeightsMarker);
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::kParseError, what); };
  if (require(kv, "format") != kFormat) fail("not a spikerobust checkpoint");
  if (parse_size(require(kv, "version")) != kCheckpointVersion) {
    fail("unsupported checkpoint version " + require(kv, "version"));
  }

  const auto sizes = parse_sizes(require(kv, "layers"));
  KernelParams kernel{parse_double(require(kv, "kernel.tau"))};
  Checkpoint checkpoint;
  checkpoint.network = make_network(sizes, parse_doubles(require(kv, "delays")), kernel, 1.0,
                                    parse_double(require(kv, "sim.dt")),
                                    parse_double(require(kv, "sim.t_max")));
  NetworkTopology& net = checkpoint.network;
  for (std::size_t l = 1; l < net.num_layers(); ++l) {
    const auto thresholds = parse_doubles(require(kv, "thresholds." + std::to_string(l)));
    if (thresholds.size() != net.layer_sizes[l]) fail("threshold count mismatch");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      net.neurons[l][i].threshold = thresholds[i];
    }
  }
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto it = kv.find("inhibitory." + std::to_string(l));
    if (it == kv.end()) continue;
    for (std::size_t i : parse_sizes(it->second)) {
      if (i >= net.layer_sizes[l]) fail("inhibitory index out of range");
      net.neurons[l][i].is_inhibitory = true;
    }
  }
  if (kv.contains("encoder.kind")) checkpoint.encoder = FeatureEncoder::from_kv(kv);

  for (std::size_t l = 0; l < net.synapses.size(); ++l) {
    SynapseArray& syn = net.synapses[l];
    std::string tag;
    std::size_t layer = 0, pre = 0, post = 0, m = 0;
    if (!(in >> tag >> layer >> pre >> post >> m) || tag != "synapse" || layer != l ||
        pre != syn.pre_size() || post != syn.post_size() || m != syn.terminals()) {
      fail("bad synapse block header for layer " + std::to_string(l));
    }
    for (double& w : syn.flat()) {
      std::string token;
      if (!(in >> token)) fail("truncated weight table");
      w = parse_double(token);
    }
  }
  net.validate();
  return checkpoint;
}

}  // namespace

Checkpoint read_checkpoint(std::istream& in) {
  try {
    return parse_checkpoint(in);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kParseError, std::string("bad checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  write_checkpoint(checkpoint, out);
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace spikerobust
