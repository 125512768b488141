#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ccn/linmaps.hpp"

namespace ccn {

struct Subrepresentation {
  Mat basis;           // (n*d) × dim, orthonormal columns, invariant span
  int dim = 0;
  char type_tag = '?';  // 'R', 'C', 'H' (division algebra of End/rad)
  int iso_class = -1;
};

struct Decomposition {
  std::vector<Subrepresentation> components;
  std::map<int, int> multiplicities;  // iso_class -> count
  int internal_dim = 1;
};

// Splits (R^d)^n into indecomposable subrepresentations of the regular
// representation by recursively cutting along real generalized eigenspaces of
// random commutant elements; a subspace counts as indecomposable when eight
// independent random elements fail to split it and its endomorphism algebra
// E has dim(E/rad) in {1,2,4}.  Deterministic given (seed, tol).
Decomposition decompose_representation(const MonoidTable& tab, int d,
                                       std::uint64_t seed, double tol = 1e-9);

// Division-algebra type of an indecomposable component: dim(E/rad(E)) of the
// restricted endomorphism algebra, radical via the trace bilinear form.
// Throws NotIndecomposable when the quotient dimension is not 1, 2 or 4.
char classify_component_type(const Subrepresentation& sub, const MonoidTable& tab,
                             double tol = 1e-9);

// True iff the intertwiner space between the two subrepresentations contains
// an invertible element (random-element singular value test, 8 retries).
bool are_isomorphic(const Subrepresentation& a, const Subrepresentation& b,
                    const MonoidTable& tab, double tol = 1e-6);

// Tensor lift of a 1-dim-internal decomposition: components Y_i ⊗ <w_j> for
// the columns w_j of basis_of_W (default identity).  Types and iso-classes
// carry over; multiplicities multiply by d.
Decomposition lift_decomposition(const Decomposition& dec1, int d,
                                 const Mat& basis_of_W = Mat());

// Orthonormal basis of the synchrony subspace of a balanced partition
// (class labels per fundamental cell), dim = r·d.  Throws NotBalanced.
Mat synchrony_basis(const std::vector<int>& partition, const MonoidTable& tab,
                    int d);

// dim(Δ_P ∩ span(sub)) by rank of stacked bases.  Throws NotBalanced.
int synchrony_component_intersection(const std::vector<int>& partition,
                                     const Subrepresentation& sub,
                                     const MonoidTable& tab, double tol = 1e-9);

// True iff every color maps partition classes into classes consistently.
bool is_balanced(const std::vector<int>& partition, const MonoidTable& tab);

// All balanced partitions of the fundamental cells (canonical restricted
// growth labels).  Exponential in cell count; fixtures are tiny.
std::vector<std::vector<int>> enumerate_balanced_partitions(const MonoidTable& tab);

}  // namespace ccn
