#pragma once

#include <string>
#include <vector>

#include "ccn/network.hpp"

namespace ccn {

// GraphViz digraph of the network: one edge source -> target per non-identity
// color, labeled by color name.  Cell declaration order is preserved so the
// output is deterministic.
std::string network_dot(const Network& net);

// Same drawing with per-cell annotations appended to the node label, e.g.
// amplification orders ("mu=2").  annotations.size() must equal n_cells.
std::string network_dot(const Network& net,
                        const std::vector<std::string>& annotations);

}  // namespace ccn
