#include "ccn/decomp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>

#include "ccn/error.hpp"
#include "ccn/rng.hpp"

namespace ccn {

namespace {

int rank_of(const Mat& A, double tol) {
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * smax && sv(i) > 1e-300) ++rank;
  return rank;
}

std::vector<Mat> restricted_maps(const MonoidTable& tab, int d, const Mat& Q) {
  std::vector<Mat> R;
  for (int e = 1; e < tab.size(); ++e) {
    Mat A = representation_map(tab, e, d);
    R.push_back(Q.transpose() * A * Q);
  }
  return R;
}

// Basis of the commutant of a set of k×k maps (the endomorphism algebra of
// the subrepresentation they restrict).
std::vector<Mat> full_matrix_basis(int k) {
  std::vector<Mat> basis;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      Mat E = Mat::Zero(k, k);
      E(i, j) = 1.0;
      basis.push_back(E);
    }
  return basis;
}

std::vector<Mat> maps_commutant(const std::vector<Mat>& R, int k, double tol) {
  if (R.empty()) return full_matrix_basis(k);
  const Mat I = Mat::Identity(k, k);
  Mat C(static_cast<int>(R.size()) * k * k, k * k);
  for (size_t g = 0; g < R.size(); ++g)
    C.middleRows(static_cast<int>(g) * k * k, k * k) =
        kron(R[g].transpose(), I) - kron(I, R[g]);
  // every map scalar => constraints numerically zero; relative pivot
  // thresholds would misjudge the rank, and everything commutes anyway
  if (C.cwiseAbs().maxCoeff() < 1e-12) return full_matrix_basis(k);
  std::vector<Mat> basis;
  Eigen::FullPivLU<Mat> lu(C);
  lu.setThreshold(tol);
  Mat ker = lu.kernel();
  if (ker.cols() == 1 && ker.isZero(0.0)) return basis;  // trivial kernel
  for (int c = 0; c < ker.cols(); ++c) {
    Eigen::VectorXd v = ker.col(c);
    basis.push_back(Eigen::Map<Mat>(v.data(), k, k));
  }
  return basis;
}

// dim(E / rad(E)) with the radical as the kernel of the trace Gram form.
int quotient_dim(const std::vector<Mat>& E, double tol) {
  const int m = static_cast<int>(E.size());
  Mat G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) G(i, j) = G(j, i) = (E[i] * E[j]).trace();
  return rank_of(G, tol);
}

struct Cluster {
  double re, im;  // representative (im >= 0)
  int mult;
};

std::vector<Cluster> cluster_spectrum(const Eigen::VectorXcd& ev, double tol) {
  std::vector<Cluster> cl;
  for (int i = 0; i < ev.size(); ++i) {
    double re = ev(i).real(), im = std::abs(ev(i).imag());
    bool placed = false;
    for (auto& c : cl) {
      if (std::hypot(re - c.re, im - c.im) <= tol) {
        // representative = running mean: Jordan-block perturbations come in
        // symmetric eps^(1/p) fans, so the mean is far more accurate than
        // any single member
        c.re = (c.re * c.mult + re) / (c.mult + 1);
        c.im = (c.im * c.mult + im) / (c.mult + 1);
        ++c.mult;
        placed = true;
        break;
      }
    }
    if (!placed) cl.push_back({re, im, 1});
  }
  return cl;
}

Mat matrix_power(Mat F, int p) {
  Mat out = Mat::Identity(F.rows(), F.cols());
  for (int i = 0; i < p; ++i) out = out * F;
  return out;
}

// One attempt at splitting span(Q) along the real generalized eigenspaces of
// a random element of its endomorphism algebra.  Complex-conjugate pairs stay
// merged into one real block (they get probed again one level down).  Returns
// the pieces (ambient orthonormal bases), or nothing when the attempt fails.
std::vector<Mat> try_split(const Mat& Q, const std::vector<Mat>& E, Rng& rng,
                           double tol, double cluster_tol) {
  const int k = static_cast<int>(Q.cols());
  Mat M = Mat::Zero(k, k);
  for (const auto& e : E) M += rng.gauss() * e;
  Eigen::EigenSolver<Mat> es(M);
  Eigen::VectorXcd ev = es.eigenvalues();
  double rad = 0.0;
  for (int i = 0; i < k; ++i) rad = std::max(rad, std::abs(ev(i)));
  if (rad < 1e-12) return {};
  M /= rad;
  ev /= rad;
  // generous clustering: nilpotent Jordan structure perturbs eigenvalues by
  // eps^(1/p), so nearby values must merge; over-merged clusters just recurse
  auto clusters = cluster_spectrum(ev, cluster_tol);
  if (clusters.size() < 2) return {};

  std::vector<Mat> pieces;
  int total = 0;
  const Mat I = Mat::Identity(k, k);
  for (const auto& c : clusters) {
    Mat F;
    int power;
    if (c.im > 1e-4) {
      if (c.mult % 2) return {};  // conjugate pair bookkeeping broke down
      F = M * M - 2 * c.re * M + (c.re * c.re + c.im * c.im) * I;
      power = c.mult / 2;
    } else {
      F = M - c.re * I;
      power = c.mult;
    }
    // defective eigenvalues only resolve to eps^(1/p), so a fixed kernel
    // threshold misses them; cut at the gap predicted by the multiplicity
    Eigen::JacobiSVD<Mat> svd(matrix_power(F, power), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int cut = k - c.mult;
    if (cut < 1 || sv(cut - 1) <= 1e3 * sv(cut)) return {};  // ambiguous split
    pieces.push_back(Q * svd.matrixV().rightCols(c.mult));
    total += c.mult;
  }
  if (total != k) return {};
  // an under-merged defective cluster yields nested kernels (ker n inside
  // ker n^2): genuinely invariant pieces that are not independent
  Mat all(Q.rows(), k);
  int col = 0;
  for (const auto& p : pieces) {
    all.middleCols(col, static_cast<int>(p.cols())) = p;
    col += static_cast<int>(p.cols());
  }
  if (rank_of(all, 1e-6) != k) return {};
  return pieces;
}

// Newton refinement of an approximately invariant subspace against the exact
// representation maps.  Each step solves the stacked Sylvester least-squares
// T Δ − Δ S = −R over all maps for the complement correction Δ; without it
// the eps^(1/p) basis error of a defective split amplifies to eps^(1/3p)
// eigenvalue fuzz one recursion level down and breaks the clustering.
Mat refine_invariant(const MonoidTable& tab, int d, Mat V,
                     double* residual_out = nullptr) {
  const int N = static_cast<int>(V.rows());
  const int k = static_cast<int>(V.cols());
  if (residual_out) *residual_out = 0.0;
  if (k == N || tab.size() < 2) return V;
  const int kk = (N - k) * k;
  for (int iter = 0; iter < 4; ++iter) {
    Eigen::HouseholderQR<Mat> qr(V);
    Mat Qfull = Mat(qr.householderQ());
    V = Qfull.leftCols(k);
    Mat W = Qfull.rightCols(N - k);
    Mat C(static_cast<int>(tab.size() - 1) * kk, kk);
    Vec rhs(C.rows());
    double resid = 0.0;
    for (int e = 1; e < tab.size(); ++e) {
      Mat A = representation_map(tab, e, d);
      Mat S = V.transpose() * A * V;
      Mat T = W.transpose() * A * W;
      Mat R = W.transpose() * A * V;
      resid = std::max(resid, R.norm());
      C.middleRows((e - 1) * kk, kk) =
          kron(Mat::Identity(k, k), T) -
          kron(S.transpose(), Mat::Identity(N - k, N - k));
      rhs.segment((e - 1) * kk, kk) = -Eigen::Map<Vec>(R.data(), kk);
    }
    if (resid <= 1e-14 * N) break;
    Vec delta = C.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    V = V + W * Eigen::Map<Mat>(delta.data(), N - k, k);
  }
  Eigen::HouseholderQR<Mat> qr(V);
  V = Mat(qr.householderQ()).leftCols(k);
  if (residual_out) {
    double resid = 0.0;
    for (int e = 1; e < tab.size(); ++e) {
      Mat A = representation_map(tab, e, d);
      Mat img = A * V;
      resid = std::max(resid, (img - V * (V.transpose() * img)).norm());
    }
    *residual_out = resid;
  }
  return V;
}

struct RawComponent {
  Mat basis;
  char type;
};

void split_recursive(const MonoidTable& tab, int d, const Mat& Q, Rng& rng,
                     double tol, std::vector<RawComponent>& out) {
  const int k = static_cast<int>(Q.cols());
  auto R = restricted_maps(tab, d, Q);
  auto E = maps_commutant(R, k, tol);
  if (std::getenv("CCN_DEBUG"))
    std::fprintf(stderr, "split k=%d Edim=%zu\n", k, E.size());
  if (E.size() > 1) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      // escalate the merge radius: defective eigenvalue fans scale like
      // eps^(1/p) and can exceed the base tolerance; over-merging is safe
      // (an over-merged piece just recurses), under-merging is not
      auto pieces = try_split(Q, E, rng, tol, 1e-4 * std::pow(4.0, attempt));
      if (!pieces.empty()) {
        // a split is only real when every piece refines onto a genuinely
        // invariant subspace; spurious kernels of mis-clustered defective
        // eigenvalues keep a large residual and void the attempt
        bool invariant = true;
        for (auto& p : pieces) {
          double resid = 0.0;
          p = refine_invariant(tab, d, p, &resid);
          if (resid > 1e-10) {
            invariant = false;
            break;
          }
        }
        if (invariant) {
          for (const auto& p : pieces) split_recursive(tab, d, p, rng, tol, out);
          return;
        }
      }
    }
  }
  int q = quotient_dim(E, tol);
  char type;
  switch (q) {
    case 1: type = 'R'; break;
    case 2: type = 'C'; break;
    case 4: type = 'H'; break;
    default:
      throw Error("NumericalRankFailure",
                  "subspace of dim " + std::to_string(k) +
                      " neither splits nor classifies (End/rad dim " +
                      std::to_string(q) + ")");
  }
  out.push_back({Q, type});
}

}  // namespace

Decomposition decompose_representation(const MonoidTable& tab, int d,
                                       std::uint64_t seed, double tol) {
  const int N = tab.size() * d;
  Rng rng(seed);
  std::vector<RawComponent> raw;
  split_recursive(tab, d, Mat::Identity(N, N), rng, tol, raw);

  Decomposition dec;
  dec.internal_dim = d;
  for (const auto& r : raw) {
    Subrepresentation s;
    s.basis = r.basis;
    s.dim = static_cast<int>(r.basis.cols());
    s.type_tag = r.type;
    dec.components.push_back(std::move(s));
  }

  // direct-sum sanity: the stacked bases must span everything
  Mat all(N, N);
  int col = 0;
  for (const auto& c : dec.components) {
    all.middleCols(col, c.dim) = c.basis;
    col += c.dim;
  }
  if (col != N || rank_of(all, tol) != N)
    throw Error("NumericalRankFailure", "components do not form a direct sum");

  // isomorphism classes (union-find over pairwise tests)
  const int nc = static_cast<int>(dec.components.size());
  std::vector<int> parent(nc);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j) {
      if (dec.components[i].dim != dec.components[j].dim) continue;
      if (find(i) == find(j)) continue;
      if (are_isomorphic(dec.components[i], dec.components[j], tab))
        parent[find(j)] = find(i);
    }
  // deterministic class ids: sort representatives by (dim, type, first index)
  std::vector<int> reps;
  for (int i = 0; i < nc; ++i)
    if (find(i) == i) reps.push_back(i);
  std::sort(reps.begin(), reps.end(), [&](int a, int b) {
    const auto& ca = dec.components[a];
    const auto& cb = dec.components[b];
    if (ca.dim != cb.dim) return ca.dim < cb.dim;
    if (ca.type_tag != cb.type_tag) return ca.type_tag < cb.type_tag;
    return a < b;
  });
  for (size_t id = 0; id < reps.size(); ++id) {
    for (int i = 0; i < nc; ++i)
      if (find(i) == reps[id]) dec.components[i].iso_class = static_cast<int>(id);
  }
  for (const auto& c : dec.components) dec.multiplicities[c.iso_class]++;
  return dec;
}

char classify_component_type(const Subrepresentation& sub, const MonoidTable& tab,
                             double tol) {
  const int d = static_cast<int>(sub.basis.rows()) / tab.size();
  auto R = restricted_maps(tab, d, sub.basis);
  auto E = maps_commutant(R, sub.dim, tol);
  switch (quotient_dim(E, tol)) {
    case 1: return 'R';
    case 2: return 'C';
    case 4: return 'H';
    default:
      throw Error("NotIndecomposable",
                  "endomorphism quotient dimension is not 1, 2 or 4");
  }
}

bool are_isomorphic(const Subrepresentation& a, const Subrepresentation& b,
                    const MonoidTable& tab, double tol) {
  if (a.dim != b.dim) return false;
  const int k = a.dim;
  const int d = static_cast<int>(a.basis.rows()) / tab.size();
  auto Ra = restricted_maps(tab, d, a.basis);
  auto Rb = restricted_maps(tab, d, b.basis);
  const Mat I = Mat::Identity(k, k);
  Mat C(std::max<size_t>(Ra.size(), 1) * k * k, k * k);
  if (Ra.empty()) {
    C.setZero();  // trivial monoid: every map intertwines
  } else {
    for (size_t g = 0; g < Ra.size(); ++g)
      C.middleRows(static_cast<int>(g) * k * k, k * k) =
          kron(Ra[g].transpose(), I) - kron(I, Rb[g]);
  }
  Mat ker;
  if (C.cwiseAbs().maxCoeff() < 1e-12) {
    ker = Mat::Identity(k * k, k * k);  // both actions scalar and equal
  } else {
    Eigen::FullPivLU<Mat> lu(C);
    lu.setThreshold(1e-9);
    ker = lu.kernel();
    if (ker.cols() == 1 && ker.isZero(0.0)) return false;
  }
  Rng rng(0x9E3779B97F4A7C15ull);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(k * k);
    for (int c = 0; c < ker.cols(); ++c) v += rng.gauss() * ker.col(c);
    Mat T = Eigen::Map<Mat>(v.data(), k, k);
    Eigen::JacobiSVD<Mat> svd(T);
    const auto& sv = svd.singularValues();
    if (sv(0) > 0 && sv(k - 1) > tol * sv(0)) return true;
  }
  return false;
}

Decomposition lift_decomposition(const Decomposition& dec1, int d,
                                 const Mat& basis_of_W) {
  if (dec1.internal_dim != 1)
    throw Error("NotIndecomposable", "lift starts from an internal_dim=1 decomposition");
  Mat W = basis_of_W.size() ? basis_of_W : Mat::Identity(d, d);
  Decomposition dec;
  dec.internal_dim = d;
  for (const auto& comp : dec1.components) {
    for (int j = 0; j < d; ++j) {
      Vec w = W.col(j).normalized();
      Subrepresentation s;
      s.dim = comp.dim;
      s.type_tag = comp.type_tag;
      s.iso_class = comp.iso_class;
      s.basis = Mat(comp.basis.rows() * d, comp.dim);
      for (int c = 0; c < comp.dim; ++c) {
        for (int t = 0; t < comp.basis.rows(); ++t)
          s.basis.block(t * d, c, d, 1) = comp.basis(t, c) * w;
      }
      dec.components.push_back(std::move(s));
    }
  }
  for (const auto& [cls, cnt] : dec1.multiplicities)
    dec.multiplicities[cls] = cnt * d;
  return dec;
}

bool is_balanced(const std::vector<int>& partition, const MonoidTable& tab) {
  const int m = tab.size();
  for (int s = 0; s < m; ++s) {
    for (int t = 0; t < m; ++t)
      for (int u = t + 1; u < m; ++u) {
        if (partition[t] != partition[u]) continue;
        if (partition[tab.compose[s][t]] != partition[tab.compose[s][u]])
          return false;
      }
  }
  return true;
}

Mat synchrony_basis(const std::vector<int>& partition, const MonoidTable& tab,
                    int d) {
  const int m = tab.size();
  if (static_cast<int>(partition.size()) != m)
    throw Error("NotBalanced", "partition size mismatch");
  int r = *std::max_element(partition.begin(), partition.end()) + 1;
  if (!is_balanced(partition, tab))
    throw Error("NotBalanced", "partition is not balanced");
  Mat B = Mat::Zero(m * d, r * d);
  std::vector<int> size(r, 0);
  for (int t = 0; t < m; ++t) ++size[partition[t]];
  for (int t = 0; t < m; ++t) {
    double w = 1.0 / std::sqrt(static_cast<double>(size[partition[t]]));
    for (int j = 0; j < d; ++j) B(t * d + j, partition[t] * d + j) = w;
  }
  return B;
}

int synchrony_component_intersection(const std::vector<int>& partition,
                                     const Subrepresentation& sub,
                                     const MonoidTable& tab, double tol) {
  const int d = static_cast<int>(sub.basis.rows()) / tab.size();
  Mat D = synchrony_basis(partition, tab, d);
  Mat stacked(D.rows(), D.cols() + sub.dim);
  stacked << D, sub.basis;
  return static_cast<int>(D.cols()) + sub.dim - rank_of(stacked, tol);
}

std::vector<std::vector<int>> enumerate_balanced_partitions(const MonoidTable& tab) {
  const int m = tab.size();
  std::vector<std::vector<int>> out;
  std::vector<int> labels(m, 0);
  std::function<void(int, int)> rec = [&](int pos, int used) {
    if (pos == m) {
      if (is_balanced(labels, tab)) out.push_back(labels);
      return;
    }
    for (int l = 0; l <= used; ++l) {
      labels[pos] = l;
      rec(pos + 1, std::max(used, l + 1));
    }
  };
  rec(0, 0);
  return out;
}

}  // namespace ccn
