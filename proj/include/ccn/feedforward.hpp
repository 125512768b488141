#pragma once

#include <vector>

#include "ccn/linmaps.hpp"

namespace ccn {

// Reachability order of the fundamental network: s is below t when some
// left multiplication sends s to t, i.e. cell s's state influences cell t's
// upstream chain.  Feedforward = the preorder is a partial order.
struct FeedforwardOrder {
  bool is_feedforward = false;
  std::vector<std::vector<bool>> below;  // below[s][t] <=> exists r: rs = t
  std::vector<int> topo_order;           // minimal first; s_i below s_j => i <= j
  std::vector<int> position;             // element -> index in topo_order
  std::vector<int> maximal_cells;
};

FeedforwardOrder feedforward_order(const MonoidTable& tab);

struct LoopTypeTable {
  std::vector<std::vector<int>> loops;    // per element s: { t : ts = s }, sorted
  std::vector<std::vector<int>> classes;  // equal-loop-set classes, by smallest member
  std::vector<int> class_of;              // element -> class index
};

LoopTypeTable loop_types(const MonoidTable& tab);

// Diagonal block of class `cls` in a linear admissible map: the sum of the
// blocks of its loop-set elements.
Mat class_block(const LoopTypeTable& lt, const LinearAdmissibleMap& L, int cls);

// The unique class whose diagonal block has an eigenvalue within
// 1e-8 * (1 + spectral radius) of zero.  Throws NoCriticalClass /
// MultipleCriticalClasses otherwise.
int critical_class(const LoopTypeTable& lt, const LinearAdmissibleMap& L);

// All left-absorbing cell sets (sB within B for every s) containing the
// maximal cells, ordered by size then lexicographically; the unique minimal
// one comes first.  Throws NotFeedforward.
std::vector<std::vector<int>> root_subnetworks(const MonoidTable& tab,
                                               const FeedforwardOrder& order);

struct BranchPrediction {
  int critical = -1;             // loop-type class index
  std::vector<int> root;         // B, sorted; empty when maximal_critical
  std::vector<int> mu;           // per element
  std::vector<double> exponent;  // 2^(-mu)
  bool maximal_critical = false;
};

// Amplification orders: mu = 0 on B; descending the order, a non-critical
// cell inherits the max over its strict in-neighbors, a critical cell adds 1
// unless all its strict in-neighbors lie in B.  When the critical class is
// the maximal one, mu = 1 everywhere and B is ignored.  Throws
// NotFeedforward / CriticalClassIntersectsB.
BranchPrediction mu_orders(const MonoidTable& tab, const FeedforwardOrder& order,
                           const LoopTypeTable& lt, int critical,
                           const std::vector<int>& root);

struct BranchDescriptor {
  int cell = 0;
  double exponent = 1.0;
  bool two_sided = false;
};

// Per-cell leading behavior of the bifurcating branch: |lambda|^exponent,
// two-sided for root cells (synchronous value exists on both sides of 0).
std::vector<BranchDescriptor> predict_branches(const BranchPrediction& pred);

}  // namespace ccn
