#include "ccn/linmaps.hpp"

#include <Eigen/SVD>
#include <algorithm>

#include "ccn/error.hpp"

namespace ccn {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat adjacency_matrix(const MonoidTable& tab, int s, int d) {
  const int m = tab.size();
  Mat B = Mat::Zero(m, m);
  for (int t = 0; t < m; ++t) B(t, tab.compose[s][t]) = 1.0;
  return d == 1 ? B : kron(B, Mat::Identity(d, d));
}

Mat adjacency_matrix(const Network& net, int color, int d) {
  const int n = net.n_cells();
  Mat B = Mat::Zero(n, n);
  for (int p = 0; p < n; ++p) B(p, net.maps[color][p]) = 1.0;
  return d == 1 ? B : kron(B, Mat::Identity(d, d));
}

Mat representation_map(const MonoidTable& tab, int s, int d) {
  const int m = tab.size();
  Mat A = Mat::Zero(m, m);
  for (int t = 0; t < m; ++t) A(t, tab.compose[t][s]) = 1.0;
  return d == 1 ? A : kron(A, Mat::Identity(d, d));
}

std::vector<Mat> commutant_basis(const MonoidTable& tab, int d, double tol) {
  const int N = tab.size() * d;
  std::vector<int> gens = tab.generators;
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  gens.erase(std::remove(gens.begin(), gens.end(), 0), gens.end());

  std::vector<Mat> basis;
  if (gens.empty()) {
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        Mat E = Mat::Zero(N, N);
        E(i, j) = 1.0;
        basis.push_back(E);
      }
    return basis;
  }

  const Mat I = Mat::Identity(N, N);
  Mat C(static_cast<int>(gens.size()) * N * N, N * N);
  for (size_t g = 0; g < gens.size(); ++g) {
    Mat A = representation_map(tab, gens[g], d);
    // vec(M A - A M) = (A^T ⊗ I - I ⊗ A) vec(M)
    C.middleRows(static_cast<int>(g) * N * N, N * N) =
        kron(A.transpose(), I) - kron(I, A);
  }
  Eigen::FullPivLU<Mat> lu(C);
  lu.setThreshold(tol);
  Mat ker = lu.kernel();
  // orthonormalize the kernel basis
  Eigen::HouseholderQR<Mat> qr(ker);
  Mat Q = qr.householderQ() * Mat::Identity(N * N, ker.cols());
  for (int k = 0; k < Q.cols(); ++k) {
    Eigen::VectorXd v = Q.col(k);
    basis.push_back(Eigen::Map<Mat>(v.data(), N, N));
  }
  return basis;
}

Mat LinearAdmissibleMap::realize(const MonoidTable& tab) const {
  const int m = tab.size();
  const int d = internal_dim;
  Mat L = Mat::Zero(m * d, m * d);
  for (int s = 0; s < m; ++s) {
    for (int t = 0; t < m; ++t)
      L.block(t * d, tab.compose[s][t] * d, d, d) += blocks[s];
  }
  return L;
}

namespace {

// Random d×d matrix with a simple zero eigenvalue and the remaining spectrum
// real, distinct and bounded away from zero: P (D) P^{-1} with D triangular.
Mat singular_block(int d, Rng& rng) {
  for (;;) {
    Mat D = Mat::Zero(d, d);
    for (int i = 1; i < d; ++i) D(i, i) = rng.coeff();
    bool distinct = true;
    for (int i = 1; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (std::abs(D(i, i) - D(j, j)) < 1e-3) distinct = false;
    if (!distinct) continue;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) D(i, j) = rng.coeff();
    Mat P(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) P(i, j) = rng.coeff();
    Eigen::JacobiSVD<Mat> svd(P);
    if (svd.singularValues()(d - 1) < 1e-2 * svd.singularValues()(0)) continue;
    return P * D * P.inverse();
  }
}

LinearAdmissibleMap sample_linear(const MonoidTable& tab, int d, Rng& rng,
                                  const Constraints& cons) {
  if (cons.critical_classes.size() > 1)
    throw Error("InfeasibleConstraint",
                "at most one loop-type class can be critical");
  auto classes = loop_type_classes(tab);
  auto ls = loop_sets(tab);
  int K = cons.critical_classes.empty() ? -1 : cons.critical_classes[0];
  if (K >= static_cast<int>(classes.size()) || K < -1)
    throw Error("InfeasibleConstraint", "no such loop-type class");

  for (int attempt = 0; attempt < 64; ++attempt) {
    LinearAdmissibleMap L;
    L.internal_dim = d;
    L.blocks.resize(tab.size());
    for (auto& b : L.blocks) {
      b = Mat(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) b(i, j) = rng.coeff();
    }
    if (K >= 0) {
      const auto& lsK = ls[classes[K].front()];
      // Shift the loop-set element that disturbs the fewest other classes.
      int tstar = lsK.front(), best = tab.size() + 1;
      for (int t : lsK) {
        int cnt = 0;
        for (size_t k = 0; k < classes.size(); ++k) {
          if (static_cast<int>(k) == K) continue;
          const auto& other = ls[classes[k].front()];
          if (std::find(other.begin(), other.end(), t) != other.end()) ++cnt;
        }
        if (cnt < best) {
          best = cnt;
          tstar = t;
        }
      }
      Mat S = Mat::Zero(d, d);
      for (int t : lsK) S += L.blocks[t];
      if (d == 1) {
        L.blocks[tstar](0, 0) -= S(0, 0);  // class sum exactly zero
      } else {
        L.blocks[tstar] += singular_block(d, rng) - S;
      }
    }
    bool ok = true;
    for (size_t k = 0; k < classes.size() && ok; ++k) {
      Mat S = Mat::Zero(d, d);
      for (int t : ls[classes[k].front()]) S += L.blocks[t];
      Eigen::JacobiSVD<Mat> svd(S);
      double smin = svd.singularValues()(d - 1);
      if (static_cast<int>(k) == K) {
        if (smin > 1e-10) ok = false;  // zero eigenvalue lost
        if (d > 1) {
          Eigen::EigenSolver<Mat> es(S);
          int near_zero = 0;
          for (int i = 0; i < d; ++i)
            if (std::abs(es.eigenvalues()(i)) < 1e-6) ++near_zero;
          if (near_zero != 1) ok = false;  // zero must stay simple
        }
      } else if (smin < 1e-4) {
        ok = false;  // class sum must stay invertible
      }
    }
    if (ok) return L;
  }
  throw Error("InfeasibleConstraint",
              "could not realize the criticality constraint generically");
}

}  // namespace

LinearAdmissibleMap random_linear_admissible(const MonoidTable& tab, int d,
                                             std::uint64_t seed,
                                             const Constraints& constraints) {
  Rng rng(seed);
  return sample_linear(tab, d, rng, constraints);
}

Vec AdmissibleField::f(const Vec& u, const Vec& lambda) const {
  const int d = internal_dim;
  Vec out = Vec::Zero(d);
  for (int s = 0; s < n_elements; ++s)
    out += linear.blocks[s] * u.segment(s * d, d);
  for (const auto& t : terms) {
    double prod = 1.0;
    for (int p = 0; p < t.degree; ++p) prod *= u(t.slots[p]);
    if (t.lambda_index >= 0) prod *= lambda(t.lambda_index);
    out += prod * t.coef;
  }
  return out;
}

Mat AdmissibleField::df_du(const Vec& u, const Vec& lambda) const {
  const int d = internal_dim;
  Mat J = Mat::Zero(d, n_elements * d);
  for (int s = 0; s < n_elements; ++s)
    J.block(0, s * d, d, d) = linear.blocks[s];
  for (const auto& t : terms) {
    double lf = t.lambda_index >= 0 ? lambda(t.lambda_index) : 1.0;
    for (int p = 0; p < t.degree; ++p) {
      double prod = lf;
      for (int q = 0; q < t.degree; ++q)
        if (q != p) prod *= u(t.slots[q]);
      J.col(t.slots[p]) += prod * t.coef;
    }
  }
  return J;
}

Vec AdmissibleField::gamma(const MonoidTable& tab, const Vec& v,
                           const Vec& lambda) const {
  const int d = internal_dim;
  const int m = tab.size();
  Vec out(m * d);
  Vec u(m * d);
  for (int t = 0; t < m; ++t) {
    for (int s = 0; s < m; ++s)
      u.segment(s * d, d) = v.segment(tab.compose[s][t] * d, d);
    out.segment(t * d, d) = f(u, lambda);
  }
  return out;
}

AdmissibleField build_admissible_field(const MonoidTable& tab, int d, int l,
                                       std::uint64_t seed,
                                       const Constraints& constraints) {
  Rng rng(seed);
  AdmissibleField F;
  F.internal_dim = d;
  F.n_params = l;
  F.n_elements = tab.size();
  F.linear = sample_linear(tab, d, rng, constraints);

  const int m = tab.size() * d;  // input slots
  auto coef_vec = [&] {
    Vec c(d);
    for (int i = 0; i < d; ++i) c(i) = rng.coeff();
    return c;
  };
  for (int j = 0; j < l; ++j) {
    PolyTerm c;  // lambda_j constant drive
    c.coef = coef_vec();
    c.degree = 0;
    c.lambda_index = j;
    F.terms.push_back(std::move(c));
    for (int a = 0; a < m; ++a) {
      PolyTerm t;  // lambda_j * u_a
      t.coef = coef_vec();
      t.degree = 1;
      t.slots = {a, 0, 0};
      t.lambda_index = j;
      F.terms.push_back(std::move(t));
    }
  }
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      PolyTerm t;
      t.coef = coef_vec();
      t.degree = 2;
      t.slots = {a, b, 0};
      F.terms.push_back(std::move(t));
    }
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b)
      for (int c = b; c < m; ++c) {
        PolyTerm t;
        t.coef = coef_vec();
        t.degree = 3;
        t.slots = {a, b, c};
        F.terms.push_back(std::move(t));
      }
  return F;
}

}  // namespace ccn
