#include "ccn/dot.hpp"

#include <sstream>

#include "ccn/error.hpp"

namespace ccn {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string network_dot(const Network& net) {
  return network_dot(net, std::vector<std::string>(net.n_cells()));
}

std::string network_dot(const Network& net,
                        const std::vector<std::string>& annotations) {
  if (static_cast<int>(annotations.size()) != net.n_cells())
    throw Error("BadAnnotations", "need one annotation per cell, got " +
                                      std::to_string(annotations.size()));
  std::ostringstream out;
  out << "digraph network {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=circle];\n";
  for (int p = 0; p < net.n_cells(); ++p) {
    std::string label = net.cells[p];
    if (!annotations[p].empty()) label += "\\n" + annotations[p];
    out << "  " << quote(net.cells[p]) << " [label=" << quote(label) << "];\n";
  }
  for (int c = 0; c < net.n_colors(); ++c) {
    if (net.colors[c] == "id") continue;
    for (int p = 0; p < net.n_cells(); ++p)
      out << "  " << quote(net.cells[net.maps[c][p]]) << " -> "
          << quote(net.cells[p]) << " [label=" << quote(net.colors[c])
          << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace ccn
