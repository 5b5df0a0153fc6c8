#include "tensorformer/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tensorformer {

Checkpoint Checkpoint::from_graph(Graph& g) {
  Checkpoint ck;
  for (Tensor p : g.parameters()) {
    const Node& n = g.node(p.id());
    ck.names.push_back(n.name);
    ck.tensors[n.name] = {n.shape, n.value};
  }
  return ck;
}

void Checkpoint::apply_to_graph(Graph& g) const {
  for (Tensor p : g.parameters()) {
    const Node& n = g.node(p.id());
    auto it = tensors.find(n.name);
    if (it == tensors.end())
      throw IoError("checkpoint: missing parameter '" + n.name + "'");
    if (it->second.first != n.shape)
      throw IoError("checkpoint: shape mismatch for '" + n.name + "': file has " +
                    shape_to_string(it->second.first) + ", graph has " +
                    shape_to_string(n.shape));
    std::copy(it->second.second.begin(), it->second.second.end(), p.value_mut().begin());
  }
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write checkpoint: " + path);
  os << "tensorformer checkpoint v1\n";
  for (const auto& [k, v] : meta) os << "meta " << k << " " << v << "\n";
  char buf[40];
  for (const std::string& name : names) {
    const auto& [shape, values] = tensors.at(name);
    os << "tensor " << name << " " << shape.size();
    for (int64_t d : shape) os << " " << d;
    os << "\n";
    for (size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(values[i]));
      os << (i ? " " : "") << buf;
    }
    os << "\n";
  }
  os << "end\n";
  if (!os) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read checkpoint: " + path);
  std::string line;
  if (!std::getline(is, line) || line != "tensorformer checkpoint v1")
    throw IoError("not a tensorformer checkpoint (bad header): " + path);
  Checkpoint ck;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "end") return ck;
    if (tag == "meta") {
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      ck.meta[key] = value;
      continue;
    }
    if (tag != "tensor") throw IoError("checkpoint: unexpected line: " + line);
    std::string name;
    size_t rank = 0;
    ls >> name >> rank;
    Shape shape(rank);
    for (size_t i = 0; i < rank; ++i) ls >> shape[i];
    if (!ls) throw IoError("checkpoint: malformed tensor header: " + line);
    const int64_t numel = shape_numel(shape);
    std::vector<real_t> values(static_cast<size_t>(numel));
    for (int64_t i = 0; i < numel; ++i) {
      double v;
      if (!(is >> v)) throw IoError("checkpoint: truncated values for '" + name + "'");
      values[static_cast<size_t>(i)] = static_cast<real_t>(v);
    }
    std::getline(is, line);  // consume rest of values line
    ck.names.push_back(name);
    ck.tensors[name] = {std::move(shape), std::move(values)};
  }
  throw IoError("checkpoint: missing 'end' marker: " + path);
}

}  // namespace tensorformer
