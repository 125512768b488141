#include "ccn/feedforward.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "ccn/error.hpp"

namespace ccn {

FeedforwardOrder feedforward_order(const MonoidTable& tab) {
  const int m = tab.size();
  FeedforwardOrder ord;
  ord.below.assign(m, std::vector<bool>(m, false));
  for (int s = 0; s < m; ++s)
    for (int r = 0; r < m; ++r) ord.below[s][tab.compose[r][s]] = true;

  ord.is_feedforward = true;
  for (int s = 0; s < m && ord.is_feedforward; ++s)
    for (int t = s + 1; t < m; ++t)
      if (ord.below[s][t] && ord.below[t][s]) {
        ord.is_feedforward = false;
        break;
      }

  for (int s = 0; s < m; ++s) {
    bool maximal = true;
    for (int t = 0; t < m; ++t)
      if (t != s && ord.below[s][t]) maximal = false;
    if (maximal) ord.maximal_cells.push_back(s);
  }

  ord.position.assign(m, -1);
  if (!ord.is_feedforward) {
    for (int s = 0; s < m; ++s) {
      ord.topo_order.push_back(s);
      ord.position[s] = s;
    }
    return ord;
  }
  // Kahn with smallest-element tie-break: place an element once everything
  // strictly below it is placed
  std::vector<bool> placed(m, false);
  for (int step = 0; step < m; ++step) {
    for (int s = 0; s < m; ++s) {
      if (placed[s]) continue;
      bool ready = true;
      for (int t = 0; t < m; ++t)
        if (t != s && ord.below[t][s] && !placed[t]) ready = false;
      if (ready) {
        ord.position[s] = static_cast<int>(ord.topo_order.size());
        ord.topo_order.push_back(s);
        placed[s] = true;
        break;
      }
    }
  }
  return ord;
}

LoopTypeTable loop_types(const MonoidTable& tab) {
  LoopTypeTable lt;
  lt.loops = loop_sets(tab);
  lt.classes = loop_type_classes(tab);
  lt.class_of.assign(tab.size(), -1);
  for (size_t c = 0; c < lt.classes.size(); ++c)
    for (int e : lt.classes[c]) lt.class_of[e] = static_cast<int>(c);
  return lt;
}

Mat class_block(const LoopTypeTable& lt, const LinearAdmissibleMap& L, int cls) {
  const int d = L.internal_dim;
  Mat block = Mat::Zero(d, d);
  for (int t : lt.loops[lt.classes[cls][0]]) block += L.blocks[t];
  return block;
}

int critical_class(const LoopTypeTable& lt, const LinearAdmissibleMap& L) {
  const int nc = static_cast<int>(lt.classes.size());
  std::vector<double> smallest(nc);
  double radius = 0.0;
  for (int c = 0; c < nc; ++c) {
    Eigen::VectorXcd ev = class_block(lt, L, c).eigenvalues();
    smallest[c] = ev.cwiseAbs().minCoeff();
    radius = std::max(radius, ev.cwiseAbs().maxCoeff());
  }
  const double tol = 1e-8 * (1.0 + radius);
  int hit = -1;
  for (int c = 0; c < nc; ++c) {
    if (smallest[c] > tol) continue;
    if (hit >= 0)
      throw Error("MultipleCriticalClasses",
                  "classes " + std::to_string(hit) + " and " + std::to_string(c) +
                      " both have a near-zero block eigenvalue");
    hit = c;
  }
  if (hit < 0)
    throw Error("NoCriticalClass", "every class block is invertible");
  return hit;
}

std::vector<std::vector<int>> root_subnetworks(const MonoidTable& tab,
                                               const FeedforwardOrder& order) {
  if (!order.is_feedforward)
    throw Error("NotFeedforward", "root subnetworks need a feedforward network");
  const int m = tab.size();
  std::vector<int> rest;
  std::vector<bool> is_max(m, false);
  for (int s : order.maximal_cells) is_max[s] = true;
  for (int s = 0; s < m; ++s)
    if (!is_max[s]) rest.push_back(s);

  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << rest.size()); ++mask) {
    std::vector<bool> in(m, false);
    for (int s : order.maximal_cells) in[s] = true;
    for (size_t i = 0; i < rest.size(); ++i)
      if (mask & (1u << i)) in[rest[i]] = true;
    bool absorbing = true;
    for (int s = 0; s < m && absorbing; ++s)
      for (int t = 0; t < m; ++t)
        if (in[t] && !in[tab.compose[s][t]]) {
          absorbing = false;
          break;
        }
    if (!absorbing) continue;
    std::vector<int> B;
    for (int s = 0; s < m; ++s)
      if (in[s]) B.push_back(s);
    out.push_back(std::move(B));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

BranchPrediction mu_orders(const MonoidTable& tab, const FeedforwardOrder& order,
                           const LoopTypeTable& lt, int critical,
                           const std::vector<int>& root) {
  if (!order.is_feedforward)
    throw Error("NotFeedforward", "mu orders need a feedforward network");
  const int m = tab.size();
  BranchPrediction pred;
  pred.critical = critical;

  if (lt.class_of[order.maximal_cells[0]] == critical) {
    pred.maximal_critical = true;
    pred.mu.assign(m, 1);
  } else {
    std::vector<bool> in_root(m, false);
    for (int s : root) {
      in_root[s] = true;
      if (lt.class_of[s] == critical)
        throw Error("CriticalClassIntersectsB",
                    "critical cell " + tab.elements[s] +
                        " lies in the root subnetwork");
    }
    pred.root = root;
    std::sort(pred.root.begin(), pred.root.end());
    pred.mu.assign(m, 0);
    for (int i = m - 1; i >= 0; --i) {  // descending: maximal cells first
      int s = order.topo_order[i];
      if (in_root[s]) continue;
      int best = 0;
      bool all_in_root = true;
      for (int r = 0; r < m; ++r) {
        int n = tab.compose[r][s];  // in-neighbor of cell s
        if (n == s) continue;
        best = std::max(best, pred.mu[n]);
        if (!in_root[n]) all_in_root = false;
      }
      bool crit = lt.class_of[s] == critical;
      pred.mu[s] = (crit && !all_in_root) ? best + 1 : best;
    }
  }
  for (int s = 0; s < m; ++s)
    pred.exponent.push_back(std::exp2(-pred.mu[s]));
  return pred;
}

std::vector<BranchDescriptor> predict_branches(const BranchPrediction& pred) {
  std::vector<BranchDescriptor> out;
  std::vector<bool> in_root(pred.mu.size(), false);
  for (int s : pred.root) in_root[s] = true;
  for (size_t s = 0; s < pred.mu.size(); ++s) {
    BranchDescriptor b;
    b.cell = static_cast<int>(s);
    b.exponent = pred.exponent[s];
    b.two_sided = !pred.maximal_critical && in_root[s];
    out.push_back(b);
  }
  return out;
}

}  // namespace ccn
