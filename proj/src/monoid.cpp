#include "ccn/monoid.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace ccn {

namespace {

std::string word_name(const Network& net, const std::vector<int>& word) {
  if (word.empty()) return "id";
  std::string s;
  for (size_t i = 0; i < word.size(); ++i) {
    if (i) s += "*";
    s += net.colors[word[i]];
  }
  return s;
}

}  // namespace

MonoidTable monoid_closure(const Network& net) {
  const int n = net.n_cells();
  MonoidTable tab;
  std::map<std::vector<int>, int> index_of;

  auto add = [&](const std::vector<int>& act, const std::vector<int>& word) {
    auto it = index_of.find(act);
    if (it != index_of.end()) return it->second;
    int idx = tab.size();
    index_of.emplace(act, idx);
    tab.elements.push_back(word_name(net, word));
    tab.generator_of.push_back(word);
    tab.action.push_back(act);
    return idx;
  };

  std::vector<int> ident(n);
  std::iota(ident.begin(), ident.end(), 0);
  add(ident, {});

  // Non-identity colors, in declaration order, form the alphabet.
  std::vector<int> alphabet;
  for (int c = 0; c < net.n_colors(); ++c)
    if (net.colors[c] != "id") alphabet.push_back(c);

  // Breadth-first over words by length; within a length, words are visited in
  // lexicographic order (first letter major) because the previous level is
  // already lexicographically ordered.
  std::vector<int> level;  // elements first reached at the current word length
  for (int c : alphabet) {
    int before = tab.size();
    int idx = add(net.maps[c], {c});
    tab.generators.push_back(idx);
    if (tab.size() > before) level.push_back(idx);
  }
  while (!level.empty()) {
    std::vector<int> next;
    for (int c : alphabet) {
      for (int e : level) {
        // action of the word c*w: apply w first, then c
        std::vector<int> act(n);
        for (int p = 0; p < n; ++p) act[p] = net.maps[c][tab.action[e][p]];
        std::vector<int> word;
        word.reserve(tab.generator_of[e].size() + 1);
        word.push_back(c);
        word.insert(word.end(), tab.generator_of[e].begin(), tab.generator_of[e].end());
        int before = tab.size();
        int idx = add(act, word);
        if (tab.size() > before) next.push_back(idx);
      }
    }
    level = std::move(next);
  }

  // Multiplication table: compose(i,j) = index of action_i \circ action_j.
  const int m = tab.size();
  tab.compose.assign(m, std::vector<int>(m, -1));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      std::vector<int> act(n);
      for (int p = 0; p < n; ++p) act[p] = tab.action[i][tab.action[j][p]];
      tab.compose[i][j] = index_of.at(act);
    }
  }
  return tab;
}

Network build_fundamental_network(const MonoidTable& tab) {
  Network net;
  net.cells = tab.elements;
  net.colors = tab.elements;  // element 0 is "id"
  const int m = tab.size();
  net.maps.assign(m, std::vector<int>(m));
  for (int c = 0; c < m; ++c)
    for (int t = 0; t < m; ++t) net.maps[c][t] = tab.compose[c][t];
  return net;
}

bool is_backward_connected(const Network& net, const MonoidTable& tab) {
  const int n = net.n_cells();
  for (int p = 0; p < n; ++p) {
    std::vector<bool> hit(n, false);
    int count = 0;
    for (const auto& act : tab.action) {
      if (!hit[act[p]]) {
        hit[act[p]] = true;
        ++count;
      }
    }
    if (count == n) return true;
  }
  return false;
}

std::vector<int> quotient_coloring(const Network& net, const MonoidTable& tab) {
  const int n = net.n_cells();
  for (int p = 0; p < n; ++p) {
    std::vector<bool> hit(n, false);
    int count = 0;
    for (const auto& act : tab.action) {
      if (!hit[act[p]]) {
        hit[act[p]] = true;
        ++count;
      }
    }
    if (count == n) {
      std::vector<int> q(tab.size());
      for (int e = 0; e < tab.size(); ++e) q[e] = tab.action[e][p];
      return q;
    }
  }
  throw Error("NotBackwardConnected", "no cell receives input from every cell");
}

std::vector<std::vector<int>> loop_sets(const MonoidTable& tab) {
  const int m = tab.size();
  std::vector<std::vector<int>> ls(m);
  for (int s = 0; s < m; ++s)
    for (int t = 0; t < m; ++t)
      if (tab.compose[t][s] == s) ls[s].push_back(t);
  return ls;
}

std::vector<std::vector<int>> loop_type_classes(const MonoidTable& tab) {
  auto ls = loop_sets(tab);
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of(tab.size(), -1);
  for (int s = 0; s < tab.size(); ++s) {
    bool placed = false;
    for (auto& cls : classes) {
      if (ls[cls.front()] == ls[s]) {
        cls.push_back(s);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({s});
  }
  return classes;
}

}  // namespace ccn
