#pragma once

#include <map>
#include <vector>

#include "ccn/decomp.hpp"

namespace ccn {

// one isomorphism class of indecomposable components
struct ClassSummary {
  int iso_class = -1;
  int dim = 0;
  char type = '?';  // 'R', 'C', 'H'
  int count = 0;    // multiplicity s_i in the decomposition
};

std::vector<ClassSummary> class_summary(const Decomposition& dec);

// choice of component copies spanning a generic kernel / center subspace
struct KernelConfig {
  std::map<int, int> copies;  // iso_class -> number of copies (nonzero only)
  int kernel_count = 0;       // K_U = sum rho + 2 sum gamma + 4 sum iota
  int center_count = 0;       // C_U = sum ceil(rho/2) + sum gamma + sum iota

  friend bool operator==(const KernelConfig& a, const KernelConfig& b) {
    return a.copies == b.copies;
  }
  friend bool operator<(const KernelConfig& a, const KernelConfig& b) {
    return a.copies < b.copies;
  }
};

// All nonzero copy assignments with K_U <= l, lexicographically ordered by
// the per-class copy vector.  Generic steady-state kernels for l parameters.
std::vector<KernelConfig> enumerate_generic_kernels(const Decomposition& dec,
                                                    int l);

// All nonzero copy assignments with C_U <= l.  With hopf_only, real-type
// copy counts must be even (an unpaired real copy can only carry a zero
// eigenvalue, never an imaginary pair).
std::vector<KernelConfig> enumerate_generic_centers(const Decomposition& dec,
                                                    int l, bool hopf_only);

struct ComparisonReport {
  int l = 0;
  int d_max = 1;
  std::vector<std::vector<KernelConfig>> steady;  // index d-1
  std::vector<std::vector<KernelConfig>> hopf;
  bool one_d_subset = true;      // every d=1 config recurs at every d
  bool steady_stabilized = true; // steady sets equal for all d >= l
  bool hopf_stabilized = true;   // hopf sets equal for all d >= 2l
  bool hopf_heuristic = false;   // even-real refinement unproven for l > 1
  std::vector<KernelConfig> counterexamples;
};

// Enumerates configs at internal dimensions 1..d_max (components lifted from
// the d=1 decomposition so class ids line up) and checks the 1D<->dD
// comparison statements combinatorially.
ComparisonReport compare_1d_dd(const MonoidTable& tab, int l, int d_max,
                               std::uint64_t seed = 1);

}  // namespace ccn
