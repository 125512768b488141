#include "ccn/decomp.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"

using namespace ccn;

namespace {

std::multiset<std::pair<int, char>> dim_type_multiset(const Decomposition& dec) {
  std::multiset<std::pair<int, char>> out;
  for (const auto& c : dec.components) out.insert({c.dim, c.type_tag});
  return out;
}

// residual of span-invariance under every representation map
double invariance_residual(const Decomposition& dec, const MonoidTable& tab) {
  double worst = 0.0;
  for (const auto& c : dec.components) {
    Mat P = c.basis * c.basis.transpose();  // orthogonal projector
    for (int s = 0; s < tab.size(); ++s) {
      Mat A = representation_map(tab, s, dec.internal_dim);
      Mat img = A * c.basis;
      worst = std::max(worst, (img - P * img).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("chain3 splits into the generalized kernel plane and the diagonal") {
  MonoidTable tab = fixtures::closure(fixtures::kChain3);
  Decomposition dec = decompose_representation(tab, 1, 1);
  REQUIRE(dec.components.size() == 2);
  auto mt = dim_type_multiset(dec);
  CHECK(mt == std::multiset<std::pair<int, char>>{{1, 'R'}, {2, 'R'}});
  CHECK(invariance_residual(dec, tab) < 1e-9);
  CHECK(dec.multiplicities.size() == 2);  // the two components are not isomorphic
  for (const auto& c : dec.components) {
    if (c.dim == 1) {
      // the only invariant line is the diagonal span{(1,1,1)}
      Vec v = c.basis.col(0);
      CHECK(std::abs(std::abs(v.dot(Vec::Ones(3).normalized())) - 1.0) < 1e-9);
    } else {
      // hand-computed generalized kernel: { x : x_{s*s} = 0 }
      CHECK(c.basis.row(2).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("ring3 splits into trivial (R) plus rotation plane (C)") {
  MonoidTable tab = fixtures::closure(fixtures::kRing3);
  Decomposition dec = decompose_representation(tab, 1, 1);
  auto mt = dim_type_multiset(dec);
  CHECK(mt == std::multiset<std::pair<int, char>>{{1, 'R'}, {2, 'C'}});
  CHECK(invariance_residual(dec, tab) < 1e-9);
}

TEST_CASE("chain4 splits into a 3-dim nilpotent block plus the diagonal") {
  MonoidTable tab = fixtures::closure(fixtures::kChain4);
  Decomposition dec = decompose_representation(tab, 1, 1);
  auto mt = dim_type_multiset(dec);
  CHECK(mt == std::multiset<std::pair<int, char>>{{1, 'R'}, {3, 'R'}});
}

TEST_CASE("trivial monoid at d=3 gives three isomorphic lines") {
  MonoidTable tab =
      monoid_closure(parse_network(R"({"version":1,"cells":["a"]})").network);
  Decomposition dec = decompose_representation(tab, 3, 5);
  REQUIRE(dec.components.size() == 3);
  for (const auto& c : dec.components) {
    CHECK(c.dim == 1);
    CHECK(c.type_tag == 'R');
    CHECK(c.iso_class == 0);
  }
  CHECK(dec.multiplicities.at(0) == 3);
}

TEST_CASE("q8 regular representation contains a quaternionic component") {
  MonoidTable tab = fixtures::closure(fixtures::kQ8);
  Decomposition dec = decompose_representation(tab, 1, 3);
  auto mt = dim_type_multiset(dec);
  CHECK(mt == std::multiset<std::pair<int, char>>{
                  {1, 'R'}, {1, 'R'}, {1, 'R'}, {1, 'R'}, {4, 'H'}});
  // the four characters of Q8/{±1} are pairwise non-isomorphic
  CHECK(dec.multiplicities.size() == 5);
  for (const auto& c : dec.components)
    if (c.dim == 4) CHECK(classify_component_type(c, tab) == 'H');
  CHECK(invariance_residual(dec, tab) < 1e-9);
}

TEST_CASE("dim-type multiset at internal dimension d is d copies of d=1") {
  for (const char* text : {fixtures::kChain3, fixtures::kRing3}) {
    MonoidTable tab = fixtures::closure(text);
    auto base = dim_type_multiset(decompose_representation(tab, 1, 1));
    for (int d : {2, 3}) {
      auto full = dim_type_multiset(decompose_representation(tab, d, 1));
      std::multiset<std::pair<int, char>> expect;
      for (const auto& p : base)
        for (int i = 0; i < d; ++i) expect.insert(p);
      CHECK(full == expect);
    }
  }
}

TEST_CASE("different seeds agree up to isomorphism") {
  for (const char* text : {fixtures::kChain3, fixtures::kQ8}) {
    MonoidTable tab = fixtures::closure(text);
    Decomposition a = decompose_representation(tab, 1, 17);
    Decomposition b = decompose_representation(tab, 1, 71);
    CHECK(dim_type_multiset(a) == dim_type_multiset(b));
    CHECK(a.multiplicities == b.multiplicities);
  }
}

TEST_CASE("isomorphism testing: tensor copies, mismatches, equivalence") {
  MonoidTable tab = fixtures::closure(fixtures::kChain3);
  Decomposition dec1 = decompose_representation(tab, 1, 1);
  Decomposition lifted = lift_decomposition(dec1, 2);
  REQUIRE(lifted.components.size() == 4);
  // copies Y ⊗ e1 and Y ⊗ e2 of the same component are isomorphic
  for (size_t i = 0; i < dec1.components.size(); ++i) {
    const auto& c1 = lifted.components[2 * i];
    const auto& c2 = lifted.components[2 * i + 1];
    CHECK(are_isomorphic(c1, c2, tab));
    CHECK(are_isomorphic(c1, c1, tab));  // reflexive
    CHECK(are_isomorphic(c2, c1, tab));  // symmetric
  }
  // dimension mismatch
  CHECK_FALSE(are_isomorphic(dec1.components[0], dec1.components[1], tab));
  // ring3: trivial vs rotation component have zero intertwiners
  MonoidTable ring = fixtures::closure(fixtures::kRing3);
  Decomposition rdec = decompose_representation(ring, 1, 1);
  Decomposition rlift = lift_decomposition(rdec, 2);
  const Subrepresentation* triv = nullptr;
  const Subrepresentation* rot = nullptr;
  for (const auto& c : rlift.components) {
    if (c.dim == 1) triv = &c;
    if (c.dim == 2) rot = &c;
  }
  REQUIRE(triv != nullptr);
  REQUIRE(rot != nullptr);
  CHECK_FALSE(are_isomorphic(*rot, *triv, ring));
}

TEST_CASE("lift preserves dims, types, classes and scales multiplicities") {
  for (const char* text : {fixtures::kChain3, fixtures::kRing3, fixtures::kQ8}) {
    MonoidTable tab = fixtures::closure(text);
    Decomposition dec1 = decompose_representation(tab, 1, 1);
    for (int d : {1, 3}) {
      Decomposition lifted = lift_decomposition(dec1, d);
      CHECK(lifted.components.size() == dec1.components.size() * d);
      if (d == 1) {
        // lifting to d=1 is the identity on structure
        CHECK(dim_type_multiset(lifted) == dim_type_multiset(dec1));
      }
      for (const auto& [cls, cnt] : dec1.multiplicities)
        CHECK(lifted.multiplicities.at(cls) == cnt * d);
      CHECK(invariance_residual(lifted, tab) < 1e-9);
      // lifted pieces still form a direct sum
      Mat all(tab.size() * d, tab.size() * d);
      int col = 0;
      for (const auto& c : lifted.components) {
        all.middleCols(col, c.dim) = c.basis;
        col += c.dim;
      }
      Eigen::JacobiSVD<Mat> svd(all);
      CHECK(svd.singularValues()(all.cols() - 1) >
            1e-9 * svd.singularValues()(0));
    }
  }
}

TEST_CASE("synchrony bases of balanced partitions") {
  MonoidTable tab = fixtures::closure(fixtures::kChain3);
  std::vector<int> full_sync = {0, 0, 0};
  Mat b1 = synchrony_basis(full_sync, tab, 1);
  REQUIRE(b1.cols() == 1);
  CHECK(std::abs(std::abs(b1.col(0).dot(Vec::Ones(3).normalized())) - 1) < 1e-12);
  CHECK(synchrony_basis(full_sync, tab, 4).cols() == 4);  // dim r*d with r=1
  // the discrete partition (quotient coloring of a fundamental network viewed
  // as its own original) is balanced with dim N*d
  std::vector<int> discrete = {0, 1, 2};
  CHECK(synchrony_basis(discrete, tab, 2).cols() == 6);
  // an unbalanced partition: {1,3} vs {2} — s-inputs of 1 and 3 split classes
  std::vector<int> bad = {0, 1, 0};
  CHECK_THROWS_AS(synchrony_basis(bad, tab, 1), Error);
}

TEST_CASE("balanced-partition enumeration and tensor intersection rule") {
  for (const char* text : {fixtures::kChain3, fixtures::kQ8}) {
    MonoidTable tab = fixtures::closure(text);
    auto partitions = enumerate_balanced_partitions(tab);
    CHECK(!partitions.empty());
    for (const auto& p : partitions) CHECK(is_balanced(p, tab));
    // full synchrony is always balanced
    CHECK(std::count(partitions.begin(), partitions.end(),
                     std::vector<int>(tab.size(), 0)) == 1);

    Decomposition dec1 = decompose_representation(tab, 1, 1);
    for (int d : {2, 3}) {
      Decomposition lifted = lift_decomposition(dec1, d);
      for (const auto& p : partitions) {
        CHECK(synchrony_basis(p, tab, d).cols() ==
              (*std::max_element(p.begin(), p.end()) + 1) * d);
        for (size_t i = 0; i < dec1.components.size(); ++i) {
          int lhs1 = synchrony_component_intersection(p, dec1.components[i], tab);
          for (int j = 0; j < d; ++j) {
            int lhsd = synchrony_component_intersection(
                p, lifted.components[i * d + j], tab);
            CHECK(lhsd == lhs1);  // dim(Δ ∩ Y ⊗ <w>) = dim(Δ¹ ∩ Y)
          }
        }
      }
    }
  }
}

TEST_CASE("chain3 full synchrony meets the lifted components as predicted") {
  MonoidTable tab = fixtures::closure(fixtures::kChain3);
  Decomposition dec1 = decompose_representation(tab, 1, 1);
  Decomposition lifted = lift_decomposition(dec1, 2);
  std::vector<int> full_sync = {0, 0, 0};
  for (size_t i = 0; i < dec1.components.size(); ++i) {
    int expect = dec1.components[i].dim == 1 ? 1 : 0;  // diagonal lies in the line
    for (int j = 0; j < 2; ++j)
      CHECK(synchrony_component_intersection(full_sync,
                                             lifted.components[i * 2 + j], tab) ==
            expect);
  }
}
