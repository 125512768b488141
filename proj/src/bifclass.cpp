#include "ccn/bifclass.hpp"

#include <algorithm>

namespace ccn {

std::vector<ClassSummary> class_summary(const Decomposition& dec) {
  std::vector<ClassSummary> out;
  for (const auto& [cls, cnt] : dec.multiplicities) {
    ClassSummary s;
    s.iso_class = cls;
    s.count = cnt;
    for (const auto& c : dec.components)
      if (c.iso_class == cls) {
        s.dim = c.dim;
        s.type = c.type_tag;
        break;
      }
    out.push_back(s);
  }
  return out;
}

namespace {

int kernel_weight(char type) { return type == 'R' ? 1 : type == 'C' ? 2 : 4; }

int center_weight(char type, int copies) {
  return type == 'R' ? (copies + 1) / 2 : copies;
}

// depth-first over copy vectors in class order; natural lexicographic output
void enumerate(const std::vector<ClassSummary>& cls, int l, bool centers,
               bool hopf_only, size_t at, std::vector<int>& pick,
               std::vector<KernelConfig>& out) {
  if (at == cls.size()) {
    KernelConfig cfg;
    for (size_t i = 0; i < cls.size(); ++i) {
      if (pick[i] == 0) continue;
      cfg.copies[cls[i].iso_class] = pick[i];
      cfg.kernel_count += kernel_weight(cls[i].type) * pick[i];
      cfg.center_count += center_weight(cls[i].type, pick[i]);
    }
    if (cfg.copies.empty()) return;
    if ((centers ? cfg.center_count : cfg.kernel_count) > l) return;
    out.push_back(std::move(cfg));
    return;
  }
  for (int c = 0; c <= cls[at].count; ++c) {
    if (hopf_only && cls[at].type == 'R' && c % 2) continue;
    // cheap prune: both budgets are monotone in every copy count
    int w = centers ? center_weight(cls[at].type, c)
                    : kernel_weight(cls[at].type) * c;
    if (w > l) break;
    pick[at] = c;
    enumerate(cls, l, centers, hopf_only, at + 1, pick, out);
  }
  pick[at] = 0;
}

std::vector<KernelConfig> run_enum(const Decomposition& dec, int l,
                                   bool centers, bool hopf_only) {
  auto cls = class_summary(dec);
  std::vector<int> pick(cls.size(), 0);
  std::vector<KernelConfig> out;
  if (l > 0) enumerate(cls, l, centers, hopf_only, 0, pick, out);
  return out;
}

bool contains(const std::vector<KernelConfig>& set, const KernelConfig& c) {
  return std::find(set.begin(), set.end(), c) != set.end();
}

}  // namespace

std::vector<KernelConfig> enumerate_generic_kernels(const Decomposition& dec,
                                                    int l) {
  return run_enum(dec, l, false, false);
}

std::vector<KernelConfig> enumerate_generic_centers(const Decomposition& dec,
                                                    int l, bool hopf_only) {
  return run_enum(dec, l, true, hopf_only);
}

ComparisonReport compare_1d_dd(const MonoidTable& tab, int l, int d_max,
                               std::uint64_t seed) {
  ComparisonReport rep;
  rep.l = l;
  rep.d_max = d_max;
  rep.hopf_heuristic = l > 1;
  Decomposition dec1 = decompose_representation(tab, 1, seed);
  for (int d = 1; d <= d_max; ++d) {
    Decomposition dec = d == 1 ? dec1 : lift_decomposition(dec1, d);
    rep.steady.push_back(enumerate_generic_kernels(dec, l));
    rep.hopf.push_back(enumerate_generic_centers(dec, l, true));
  }
  auto flag = [&](const KernelConfig& c) {
    if (!contains(rep.counterexamples, c)) rep.counterexamples.push_back(c);
  };
  for (const auto& c : rep.steady[0])
    if (!contains(rep.steady.back(), c)) rep.one_d_subset = false, flag(c);
  for (const auto& c : rep.hopf[0])
    if (!contains(rep.hopf.back(), c)) rep.one_d_subset = false, flag(c);
  for (int d = std::max(l, 1); d < d_max; ++d) {
    const auto& lo = rep.steady[std::max(l, 1) - 1];
    for (const auto& c : rep.steady[d])
      if (!contains(lo, c)) rep.steady_stabilized = false, flag(c);
    if (rep.steady[d].size() != lo.size()) rep.steady_stabilized = false;
  }
  for (int d = std::max(2 * l, 1); d < d_max; ++d) {
    const auto& lo = rep.hopf[std::max(2 * l, 1) - 1];
    for (const auto& c : rep.hopf[d])
      if (!contains(lo, c)) rep.hopf_stabilized = false, flag(c);
    if (rep.hopf[d].size() != lo.size()) rep.hopf_stabilized = false;
  }
  return rep;
}

}  // namespace ccn
