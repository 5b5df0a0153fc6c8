#pragma once

#include <map>
#include <string>
#include <vector>

#include "tensorformer/tensor.hpp"

namespace tensorformer {

// Text container for named parameter tensors. Layout:
//
//   tensorformer checkpoint v1
//   meta <key> <value...>
//   tensor <name> <rank> <dim0> <dim1> ...
//   <numel values, space separated, full precision>
//   end
//
// Values are written with enough digits to round-trip doubles exactly, so a
// save/load cycle is bit-faithful.
struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::vector<std::string> names;  // serialization order
  std::map<std::string, std::pair<Shape, std::vector<real_t>>> tensors;

  static Checkpoint from_graph(Graph& g);
  // Copies values into same-named parameters; every graph parameter must be
  // present with a matching shape.
  void apply_to_graph(Graph& g) const;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace tensorformer
