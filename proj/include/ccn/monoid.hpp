#pragma once

#include <string>
#include <vector>

#include "ccn/network.hpp"

namespace ccn {

// Closure of the input maps under composition, with multiplication table.
// Products follow the convention st = s \circ t (apply t first), which makes
// the fundamental-network input rule t -> st a literal left multiplication.
struct MonoidTable {
  std::vector<std::string> elements;           // element 0 = Id, named "id"
  std::vector<std::vector<int>> compose;       // compose[i][j] = index of s_i s_j
  std::vector<std::vector<int>> generator_of;  // witness word (original color indices)
  std::vector<std::vector<int>> action;        // induced map on the original cells
  std::vector<int> generators;                 // element index of each non-id color

  int size() const { return static_cast<int>(elements.size()); }
};

// Smallest composition-closed set containing the declared maps and Id.
// Element identity is by induced map on the cells; order is breadth-first by
// word length with lexicographic tie-break in declaration color order.
MonoidTable monoid_closure(const Network& net);

// Left Cayley graph: cells = elements, the s-input of t is st.
Network build_fundamental_network(const MonoidTable& tab);

// True iff some cell receives input from every cell after closure.
bool is_backward_connected(const Network& net, const MonoidTable& tab);

// For a base cell p* receiving inputs from all cells, returns t -> t(p*)
// (indices into net.cells).  Throws NotBackwardConnected.
std::vector<int> quotient_coloring(const Network& net, const MonoidTable& tab);

// Per element s, the sorted self-loop set L_s = { t : ts = s }.
std::vector<std::vector<int>> loop_sets(const MonoidTable& tab);

// Partition of the elements by equal loop sets, classes ordered by their
// smallest member.
std::vector<std::vector<int>> loop_type_classes(const MonoidTable& tab);

}  // namespace ccn
