#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "ccn/monoid.hpp"
#include "ccn/rng.hpp"

namespace ccn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Kronecker product, column-major layout: (a ⊗ b)[i*rows(b)+k, j*cols(b)+l].
Mat kron(const Mat& a, const Mat& b);

// Adjacency matrix of color s on the fundamental network, tensored with the
// d-dim identity: (B_s x)_t = x_{st}.  Exactly one 1 per row; B_s B_t = B_{ts}.
Mat adjacency_matrix(const MonoidTable& tab, int s, int d = 1);

// Adjacency matrix of a color on a general network: (B x)_p = x_{c(p)}.
Mat adjacency_matrix(const Network& net, int color, int d = 1);

// Regular representation map: (A_s x)_t = x_{ts}; A_s A_t = A_{st}.  The
// d-dim action is A_s ⊗ 1.
Mat representation_map(const MonoidTable& tab, int s, int d = 1);

// Orthonormal-ish basis of { M : M (A_s ⊗ 1) = (A_s ⊗ 1) M for all s },
// computed by solving the stacked linear system over all elements.
std::vector<Mat> commutant_basis(const MonoidTable& tab, int d, double tol = 1e-9);

// L = sum_s B_s ⊗ b_s acting on (R^d)^n.
struct LinearAdmissibleMap {
  int internal_dim = 1;
  std::vector<Mat> blocks;  // one d×d block per monoid element

  Mat realize(const MonoidTable& tab) const;
};

// Bifurcation constraints for random map/field construction: at most one
// loop-type class (index into loop_type_classes) may be marked critical,
// meaning 0 ∈ spec(sum of its loop-set blocks) with the zero simple for d > 1
// and the sum exactly zero for d = 1; all other class sums stay invertible.
struct Constraints {
  std::vector<int> critical_classes;
};

LinearAdmissibleMap random_linear_admissible(const MonoidTable& tab, int d,
                                             std::uint64_t seed,
                                             const Constraints& constraints = {});

// One polynomial term of the governing function f: coef * prod(u[slots]) *
// (lambda[lambda_index] if lambda_index >= 0).
struct PolyTerm {
  Vec coef;                  // d-vector
  std::array<int, 3> slots;  // input-slot indices, only the first `degree` used
  int degree = 0;            // 0..3
  int lambda_index = -1;
};

// Polynomial admissible vector field: the same f : (R^d)^n × R^l -> R^d is
// applied at every cell with inputs gathered along the colored input maps, so
// the induced network map is equivariant by construction.  f(0,0) = 0 and the
// linear part at the origin is `linear`.
struct AdmissibleField {
  int internal_dim = 1;
  int n_params = 1;
  int n_elements = 0;
  LinearAdmissibleMap linear;
  std::vector<PolyTerm> terms;  // quadratic/cubic in u plus lambda-linear terms

  Vec f(const Vec& u, const Vec& lambda) const;       // u has n*d entries
  Mat df_du(const Vec& u, const Vec& lambda) const;   // d × (n*d)
  // Full network map on the fundamental network: cell t sees input u_s = v_{st}.
  Vec gamma(const MonoidTable& tab, const Vec& v, const Vec& lambda) const;
};

AdmissibleField build_admissible_field(const MonoidTable& tab, int d, int l,
                                       std::uint64_t seed,
                                       const Constraints& constraints = {});

}  // namespace ccn
