#include <fstream>
#include <sstream>

#include "funcrelu/relu_net.hpp"
#include "json.hpp"

namespace funcrelu {

using Json = nlohmann::ordered_json;

namespace {

// Dense row-major arrays are used unless the matrix is mostly empty, in which
// case the layer is written as [row, col, value] entries.
bool prefer_dense(const SparseMatrix& m) {
  std::size_t cells = m.rows() * m.cols();
  return cells <= 64 || cells <= 4 * m.nonzeros();
}

Json matrix_to_json(const SparseMatrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  if (prefer_dense(m)) {
    j["encoding"] = "dense";
    j["weights"] = m.to_dense();
  } else {
    j["encoding"] = "sparse";
    Json entries = Json::array();
    for (const auto& t : m.triplets())
      entries.push_back(Json::array({t.row, t.col, t.value}));
    j["weights"] = std::move(entries);
  }
  return j;
}

const Json& require(const Json& obj, const char* key,
                    const std::string& section) {
  if (!obj.is_object() || !obj.contains(key)) {
    std::string name =
        section == "network" ? std::string(key) : section + "." + key;
    throw ParseError(name, "missing section '" + name + "'");
  }
  return obj.at(key);
}

std::size_t read_size(const Json& obj, const char* key,
                      const std::string& section) {
  const Json& v = require(obj, key, section);
  if (!v.is_number_unsigned())
    throw ParseError(section, std::string("field '") + key + "' in " +
                                  section + " must be a non-negative integer");
  return v.get<std::size_t>();
}

double read_double(const Json& v, const std::string& section) {
  if (!v.is_number())
    throw ParseError(section, "non-numeric weight in " + section);
  return v.get<double>();
}

SparseMatrix matrix_from_json(const Json& j, const std::string& section) {
  std::size_t rows = read_size(j, "rows", section);
  std::size_t cols = read_size(j, "cols", section);
  const Json& w = require(j, "weights", section);
  std::string encoding = "dense";
  if (j.contains("encoding")) encoding = j.at("encoding").get<std::string>();
  if (!w.is_array())
    throw ParseError(section, "weights of " + section + " must be an array");
  try {
    if (encoding == "dense") {
      std::vector<double> dense;
      dense.reserve(w.size());
      for (const auto& v : w) dense.push_back(read_double(v, section));
      return SparseMatrix::from_dense(rows, cols, dense);
    }
    if (encoding == "sparse") {
      std::vector<Triplet> t;
      t.reserve(w.size());
      for (const auto& e : w) {
        if (!e.is_array() || e.size() != 3)
          throw ParseError(section, "sparse entry in " + section +
                                        " must be [row, col, value]");
        t.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(),
                     read_double(e[2], section)});
      }
      return SparseMatrix::from_triplets(rows, cols, std::move(t));
    }
  } catch (const DimensionError& e) {
    throw ParseError(section, section + ": " + e.what());
  }
  throw ParseError(section, "unknown encoding '" + encoding + "' in " +
                                section);
}

// A stream cut short cannot be parsed at all, so the incomplete section is
// recovered from which top-level keys made it into the text. The writer
// always emits them in this order.
std::string truncated_section(const std::string& text) {
  static const char* kOrder[] = {"version", "input_dim", "layers", "output"};
  std::string last = "version";
  for (const char* key : kOrder)
    if (text.find('"' + std::string(key) + '"') != std::string::npos)
      last = key;
  return last;
}

}  // namespace

std::string serialize(const ReluNetwork& net) {
  Json j;
  j["version"] = kNetworkFormatVersion;
  j["input_dim"] = net.input_dim();
  Json layers = Json::array();
  for (const Layer& l : net.layers()) {
    Json lj = matrix_to_json(l.weights);
    lj["shifts"] = l.shifts;
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  j["output"] = matrix_to_json(net.output());
  return j.dump();
}

namespace {

ReluNetwork network_from_json(const Json& j) {
  if (!j.is_object())
    throw ParseError("version", "network stream is not a JSON object");
  const Json& version = require(j, "version", "network");
  if (!version.is_number_integer() ||
      version.get<int>() != kNetworkFormatVersion)
    throw ParseError("version", "unsupported network format version " +
                                    version.dump());
  std::size_t input_dim = read_size(j, "input_dim", "network");
  const Json& lj = require(j, "layers", "network");
  if (!lj.is_array())
    throw ParseError("layers", "'layers' must be an array");
  std::vector<Layer> layers;
  for (std::size_t i = 0; i < lj.size(); ++i) {
    std::string section = "layers[" + std::to_string(i) + "]";
    SparseMatrix w = matrix_from_json(lj[i], section);
    const Json& sj = require(lj[i], "shifts", section);
    std::vector<double> shifts;
    for (const auto& v : sj) shifts.push_back(read_double(v, section));
    layers.push_back({std::move(w), std::move(shifts)});
  }
  SparseMatrix out = matrix_from_json(require(j, "output", "network"), "output");
  try {
    return ReluNetwork(input_dim, std::move(layers), std::move(out));
  } catch (const DimensionError& e) {
    throw ParseError("layers", std::string("inconsistent network: ") +
                                   e.what());
  }
}

}  // namespace

ReluNetwork deserialize(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::string section = truncated_section(text);
    throw ParseError(section,
                     "truncated or malformed network stream: section '" +
                         section + "' is incomplete (" + e.what() + ")");
  }
  try {
    return network_from_json(j);
  } catch (const Json::exception& e) {
    throw ParseError("network", std::string("malformed network: ") + e.what());
  }
}

void save_network(const ReluNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << serialize(net) << '\n';
}

ReluNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace funcrelu
