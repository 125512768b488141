#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ccn/error.hpp"

namespace ccn {

// Homogeneous network with asymmetric inputs: every cell has exactly one
// input of each color.  maps[c][p] is the index of the source cell of p's
// input of color c.  Color 0 is always the identity color "id".
struct Network {
  std::vector<std::string> cells;
  std::vector<std::string> colors;
  std::vector<std::vector<int>> maps;  // maps[color][cell] -> source cell

  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_colors() const { return static_cast<int>(colors.size()); }
  int cell_index(const std::string& name) const;   // -1 if absent
  int color_index(const std::string& name) const;  // -1 if absent
};

struct NetworkDoc {
  int format_version = 1;
  Network network;
  std::vector<std::pair<std::string, std::string>> metadata;
};

struct Diagnostic {
  std::string kind;  // "UnknownCell", "MissingColor", "IdentityAbsent", ...
  std::string cell;
  std::string color;
  std::string message;
};

// Parses the on-disk JSON format
//   {"version":1, "cells":[...], "maps":{"<color>":{"<cell>":"<source>"}},
//    "metadata":{...}}
// The identity color "id" is added automatically when absent; if declared it
// must equal the identity map.  Unknown top-level keys are rejected.  Cell
// order in the file fixes the basis order used by all matrix code downstream.
NetworkDoc parse_network(const std::string& text);

// Inverse of parse_network (2-space indentation, declaration order, the
// implicit identity color is not emitted).
std::string serialize_network(const NetworkDoc& doc);

// Returns an empty list iff the Network invariants hold; diagnostics name the
// offending cell/color instead of throwing.
std::vector<Diagnostic> validate_asymmetric_inputs(const Network& net);

}  // namespace ccn
