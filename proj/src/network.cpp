#include "ccn/network.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace ccn {

using ordered_json = nlohmann::ordered_json;

int Network::cell_index(const std::string& name) const {
  auto it = std::find(cells.begin(), cells.end(), name);
  return it == cells.end() ? -1 : static_cast<int>(it - cells.begin());
}

int Network::color_index(const std::string& name) const {
  auto it = std::find(colors.begin(), colors.end(), name);
  return it == colors.end() ? -1 : static_cast<int>(it - colors.begin());
}

NetworkDoc parse_network(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("MalformedDocument", e.what());
  }
  if (!j.is_object()) throw Error("MalformedDocument", "top level must be an object");

  static const std::set<std::string> known = {"version", "cells", "maps", "metadata"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key()))
      throw Error("MalformedDocument", "unknown top-level key \"" + it.key() + "\"");
  }

  NetworkDoc doc;
  if (!j.contains("version") || !j["version"].is_number_integer())
    throw Error("MalformedDocument", "missing integer \"version\"");
  doc.format_version = j["version"].get<int>();
  if (doc.format_version != 1)
    throw Error("MalformedDocument", "unsupported format version " +
                                         std::to_string(doc.format_version));

  if (!j.contains("cells") || !j["cells"].is_array())
    throw Error("MalformedDocument", "missing \"cells\" array");
  Network& net = doc.network;
  for (const auto& c : j["cells"]) {
    if (!c.is_string() || c.get<std::string>().empty())
      throw Error("MalformedDocument", "cell identifiers must be nonempty strings");
    if (net.cell_index(c.get<std::string>()) >= 0)
      throw Error("DuplicateIdentifier", "cell \"" + c.get<std::string>() + "\" declared twice");
    net.cells.push_back(c.get<std::string>());
  }

  const int n = net.n_cells();
  // Identity color first, implicit.
  net.colors.push_back("id");
  net.maps.emplace_back(n);
  for (int p = 0; p < n; ++p) net.maps[0][p] = p;

  if (j.contains("maps")) {
    if (!j["maps"].is_object()) throw Error("MalformedDocument", "\"maps\" must be an object");
    for (auto it = j["maps"].begin(); it != j["maps"].end(); ++it) {
      const std::string& color = it.key();
      if (color.empty()) throw Error("MalformedDocument", "color identifiers must be nonempty");
      if (!it.value().is_object())
        throw Error("MalformedDocument", "map of color \"" + color + "\" must be an object");
      std::vector<int> m(n, -1);
      for (auto e = it.value().begin(); e != it.value().end(); ++e) {
        int p = net.cell_index(e.key());
        if (p < 0) throw Error("UnknownCell", "color \"" + color + "\" maps unknown cell \"" + e.key() + "\"");
        if (!e.value().is_string())
          throw Error("MalformedDocument", "map targets must be cell names");
        int q = net.cell_index(e.value().get<std::string>());
        if (q < 0)
          throw Error("UnknownCell", "color \"" + color + "\" sends \"" + e.key() +
                                         "\" to unknown cell \"" + e.value().get<std::string>() + "\"");
        if (m[p] >= 0)
          throw Error("DuplicateIdentifier", "cell \"" + e.key() + "\" listed twice for color \"" + color + "\"");
        m[p] = q;
      }
      for (int p = 0; p < n; ++p) {
        if (m[p] < 0)
          throw Error("MissingColor", "color \"" + color + "\" omits cell \"" + net.cells[p] + "\"");
      }
      if (color == "id") {
        for (int p = 0; p < n; ++p) {
          if (m[p] != p)
            throw Error("MalformedDocument", "declared color \"id\" is not the identity map");
        }
        continue;  // already present implicitly
      }
      if (net.color_index(color) >= 0)
        throw Error("DuplicateIdentifier", "color \"" + color + "\" declared twice");
      net.colors.push_back(color);
      net.maps.push_back(std::move(m));
    }
  }

  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) throw Error("MalformedDocument", "\"metadata\" must be an object");
    for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it) {
      if (!it.value().is_string())
        throw Error("MalformedDocument", "metadata values must be strings");
      doc.metadata.emplace_back(it.key(), it.value().get<std::string>());
    }
  }
  return doc;
}

std::string serialize_network(const NetworkDoc& doc) {
  ordered_json j;
  j["version"] = doc.format_version;
  j["cells"] = doc.network.cells;
  ordered_json maps = ordered_json::object();
  for (int c = 1; c < doc.network.n_colors(); ++c) {  // identity color stays implicit
    ordered_json m = ordered_json::object();
    for (int p = 0; p < doc.network.n_cells(); ++p)
      m[doc.network.cells[p]] = doc.network.cells[doc.network.maps[c][p]];
    maps[doc.network.colors[c]] = std::move(m);
  }
  j["maps"] = std::move(maps);
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : doc.metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  return j.dump(2) + "\n";
}

std::vector<Diagnostic> validate_asymmetric_inputs(const Network& net) {
  std::vector<Diagnostic> out;
  const int n = net.n_cells();
  std::set<std::string> seen_cells;
  for (const auto& c : net.cells) {
    if (c.empty()) out.push_back({"DuplicateIdentifier", c, "", "empty cell identifier"});
    if (!seen_cells.insert(c).second)
      out.push_back({"DuplicateIdentifier", c, "", "cell \"" + c + "\" not unique"});
  }
  std::set<std::string> seen_colors;
  for (const auto& c : net.colors) {
    if (!seen_colors.insert(c).second)
      out.push_back({"DuplicateIdentifier", "", c, "color \"" + c + "\" not unique"});
  }
  int idc = net.color_index("id");
  bool id_ok = idc >= 0;
  if (id_ok) {
    for (int p = 0; p < n; ++p)
      if (net.maps[idc][p] != p) id_ok = false;
  }
  if (!id_ok) out.push_back({"IdentityAbsent", "", "id", "identity absent"});
  for (int c = 0; c < net.n_colors(); ++c) {
    if (static_cast<int>(net.maps.size()) <= c ||
        static_cast<int>(net.maps[c].size()) != n) {
      out.push_back({"MissingColor", "", net.colors[c],
                     "color \"" + net.colors[c] + "\" is not total on cells"});
      continue;
    }
    for (int p = 0; p < n; ++p) {
      if (net.maps[c][p] < 0 || net.maps[c][p] >= n)
        out.push_back({"UnknownCell", net.cells[p], net.colors[c],
                       "input source of cell \"" + net.cells[p] + "\" is outside the network"});
    }
  }
  return out;
}

}  // namespace ccn
