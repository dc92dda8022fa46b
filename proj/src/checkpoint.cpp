#include "kacdp/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "kacdp/error.hpp"

namespace kacdp {

using nlohmann::json;

namespace {

constexpr const char* kNetworkFormat = "kacdp-kan-checkpoint";
constexpr const char* kLogisticFormat = "kacdp-logistic-checkpoint";
constexpr int kVersion = 1;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  out << text;
}

json parse(const std::string& text, const char* format) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::checkpoint_format, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != format) {
    throw Error(ErrorKind::checkpoint_format, std::string("not a ") + format + " document");
  }
  if (doc.value("version", 0) != kVersion) throw Error(ErrorKind::checkpoint_format, "unsupported version");
  return doc;
}

}  // namespace

std::string network_to_json(const KanNetwork& net) {
  json doc;
  doc["format"] = kNetworkFormat;
  doc["version"] = kVersion;
  doc["widths"] = net.widths;
  doc["grid_count"] = net.grid_count;
  doc["degree"] = net.degree;
  doc["seed"] = net.seed;
  json ranges = json::array();
  for (const auto& layer : net.layers) ranges.push_back({layer.knots.range_min, layer.knots.range_max});
  doc["knot_ranges"] = ranges;
  doc["parameters"] = net.parameters();
  return doc.dump(1) + "\n";
}

KanNetwork network_from_json(const std::string& text) {
  const json doc = parse(text, kNetworkFormat);
  try {
    KanNetwork net;
    net.widths = doc.at("widths").get<std::vector<int>>();
    net.grid_count = doc.at("grid_count").get<int>();
    net.degree = doc.at("degree").get<int>();
    net.seed = doc.at("seed").get<std::uint64_t>();
    const auto ranges = doc.at("knot_ranges").get<std::vector<std::vector<double>>>();
    if (net.widths.size() < 2 || ranges.size() + 1 != net.widths.size()) {
      throw Error(ErrorKind::checkpoint_format, "knot_ranges does not match widths");
    }
    for (std::size_t l = 0; l + 1 < net.widths.size(); ++l) {
      if (ranges[l].size() != 2 || net.widths[l] < 1 || net.widths[l + 1] < 1) {
        throw Error(ErrorKind::checkpoint_format, "malformed layer description");
      }
      KanLayer layer;
      layer.n_in = static_cast<std::size_t>(net.widths[l]);
      layer.n_out = static_cast<std::size_t>(net.widths[l + 1]);
      layer.knots = make_knot_vector(ranges[l][0], ranges[l][1], net.grid_count, net.degree);
      layer.edges.resize(layer.n_in * layer.n_out);
      for (auto& e : layer.edges) e.spline.coefficients.assign(layer.knots.basis_count(), 0.0);
      net.layers.push_back(std::move(layer));
    }
    const auto params = doc.at("parameters").get<std::vector<double>>();
    if (params.size() != net.parameter_count()) {
      throw Error(ErrorKind::checkpoint_format, fmt::format("expected {} parameters, found {}",
                                                            net.parameter_count(), params.size()));
    }
    net.set_parameters(params);
    validate_structure(net);
    return net;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::checkpoint_format, e.what());
  }
}

void save_network(const KanNetwork& net, const std::filesystem::path& path) {
  write_file(path, network_to_json(net));
}

KanNetwork load_network(const std::filesystem::path& path) { return network_from_json(read_file(path)); }

std::string logistic_to_json(const LogisticModel& model) {
  json doc;
  doc["format"] = kLogisticFormat;
  doc["version"] = kVersion;
  doc["weights"] = model.weights;
  doc["bias"] = model.bias;
  return doc.dump(1) + "\n";
}

LogisticModel logistic_from_json(const std::string& text) {
  const json doc = parse(text, kLogisticFormat);
  try {
    return LogisticModel{doc.at("weights").get<std::vector<double>>(), doc.at("bias").get<double>()};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::checkpoint_format, e.what());
  }
}

void save_logistic(const LogisticModel& model, const std::filesystem::path& path) {
  write_file(path, logistic_to_json(model));
}

LogisticModel load_logistic(const std::filesystem::path& path) { return logistic_from_json(read_file(path)); }

std::string model_fingerprint(const KanNetwork& net) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix(net.widths.data(), net.widths.size() * sizeof(int));
  mix(&net.grid_count, sizeof(int));
  mix(&net.degree, sizeof(int));
  const std::vector<double> params = net.parameters();
  mix(params.data(), params.size() * sizeof(double));
  return fmt::format("{:016x}", h);
}

}  // namespace kacdp
