#include "doctest.h"

#include "loopiso/gcm.hpp"

using namespace loopiso;

namespace {

IMat mat(std::vector<std::vector<long>> v) { return v; }

}  // namespace

TEST_CASE("validation accepts standard matrices") {
  CHECK(gcm_validate(mat({{2}})).n == 1);
  CHECK(gcm_validate(mat({{2, -1}, {-1, 2}})).n == 2);
  CHECK(gcm_validate(mat({{2, -1}, {-3, 2}})).eps == std::vector<long>({1, 3}));
  CHECK(gcm_validate(mat({{2, -2}, {-2, 2}})).n == 2);
}

TEST_CASE("validation rejects malformed input") {
  CHECK_THROWS_AS(gcm_validate(mat({{1}})), Error);
  CHECK_THROWS_AS(gcm_validate(mat({{2, 1}, {1, 2}})), Error);
  CHECK_THROWS_AS(gcm_validate(mat({{2, -1}, {0, 2}})), Error);
  CHECK_THROWS_AS(gcm_validate(mat({{2, 0}, {0, 2}})), Error);  // decomposable
  // cycle with mismatched products is not symmetrizable
  CHECK_THROWS_AS(gcm_validate(mat({{2, -1, -2}, {-2, 2, -1}, {-1, -1, 2}})), Error);
}

TEST_CASE("symmetrizer makes the form symmetric") {
  for (const auto& entry : finite_catalog()) {
    GCM g = gcm_validate(entry.matrix);
    auto b = root_form(g);
    for (long i = 0; i < g.n; ++i)
      for (long j = 0; j < g.n; ++j) CHECK(b[i][j] == b[j][i]);
  }
}

TEST_CASE("classification of small matrices") {
  auto c1 = classify(gcm_validate(mat({{2, -1}, {-1, 2}})));
  CHECK(c1.type == KacType::Finite);
  CHECK(c1.label == "A2");
  auto c2 = classify(gcm_validate(mat({{2, -2}, {-2, 2}})));
  CHECK(c2.type == KacType::Affine);
  CHECK(c2.label == "A1^(1)");
  CHECK(c2.corank == 1);
  auto c3 = classify(gcm_validate(mat({{2, -1}, {-4, 2}})));
  CHECK(c3.type == KacType::Affine);
  CHECK(c3.label == "A2^(2)");
  auto c4 = classify(gcm_validate(mat({{2, -3}, {-3, 2}})));
  CHECK(c4.type == KacType::Indefinite);
  // double bond at the first edge, short first node: B3 written backwards
  auto c5 = classify(gcm_validate(mat({{2, -2, 0}, {-1, 2, -1}, {0, -1, 2}})));
  CHECK(c5.label == "B3");
  auto c6 = classify(gcm_validate(*finite_matrix_for("C3")));
  CHECK(c6.label == "C3");
}

TEST_CASE("every catalog entry classifies as itself") {
  for (const auto& entry : finite_catalog()) {
    auto c = classify(gcm_validate(entry.matrix));
    CHECK(c.type == KacType::Finite);
    CHECK(c.label == entry.label);
  }
  for (const auto& entry : affine_catalog()) {
    auto c = classify(gcm_validate(entry.matrix));
    CHECK(c.type == KacType::Affine);
    CHECK(c.label == entry.label);
    CHECK(c.corank == 1);
  }
}

TEST_CASE("catalog labels are pairwise non-isomorphic") {
  auto check_distinct = [](const std::vector<CatalogEntry>& cat) {
    for (size_t i = 0; i < cat.size(); ++i)
      for (size_t j = i + 1; j < cat.size(); ++j) {
        if (cat[i].matrix.size() != cat[j].matrix.size()) continue;
        CHECK(!find_iso_perm(cat[i].matrix, cat[j].matrix).has_value());
      }
  };
  check_distinct(finite_catalog());
  check_distinct(affine_catalog());
}

TEST_CASE("affine catalog entries have positive one dimensional radical") {
  for (const auto& entry : affine_catalog()) {
    GCM g = gcm_validate(entry.matrix);
    Mat a(g.n, g.n);
    for (long i = 0; i < g.n; ++i)
      for (long j = 0; j < g.n; ++j) a.at(i, j) = CycNum(rat(g.a[i][j]));
    auto ns = nullspace(a);
    REQUIRE(ns.size() == 1);
    // marks can be scaled so every coordinate is strictly positive
    Rat first;
    bool sign_ok = true;
    for (long i = 0; i < g.n; ++i) {
      Rat v = ns[0][i].to_rational();
      if (v == 0) { sign_ok = false; break; }
      if (i == 0) first = v;
      if (v * first <= 0) { sign_ok = false; break; }
    }
    CHECK(sign_ok);
  }
}

TEST_CASE("positive roots of rank two systems") {
  GCM a2 = gcm_validate(mat({{2, -1}, {-1, 2}}));
  auto r = positive_roots(a2);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == std::vector<long>({0, 1}));
  CHECK(r[1] == std::vector<long>({1, 0}));
  CHECK(r[2] == std::vector<long>({1, 1}));

  GCM g2 = gcm_validate(mat({{2, -1}, {-3, 2}}));
  auto rg = positive_roots(g2);
  CHECK(rg.size() == 6);
  CHECK(highest_root(g2) == std::vector<long>({2, 3}));
}

TEST_CASE("positive root counts match dimension formulas") {
  auto count = [](const std::string& label) {
    return positive_roots(gcm_validate(*finite_matrix_for(label))).size();
  };
  CHECK(count("A3") == 6);
  CHECK(count("B3") == 9);
  CHECK(count("C4") == 16);
  CHECK(count("D4") == 12);
  CHECK(count("F4") == 24);
  CHECK(count("E6") == 36);
}

TEST_CASE("root generation rejects non finite input") {
  GCM aff = gcm_validate(mat({{2, -2}, {-2, 2}}));
  CHECK_THROWS_AS(positive_roots(aff), Error);
}

TEST_CASE("coroot coordinates are integral and correct") {
  GCM a2 = gcm_validate(mat({{2, -1}, {-1, 2}}));
  CHECK(coroot_coords(a2, {1, 1}) == std::vector<long>({1, 1}));
  GCM g2 = gcm_validate(mat({{2, -1}, {-3, 2}}));
  CHECK(coroot_coords(g2, highest_root(g2)) == std::vector<long>({2, 1}));
  // pairing of a root with its own coroot is always 2
  for (const auto& label : {"A3", "B3", "C3", "D4", "G2", "F4"}) {
    GCM g = gcm_validate(*finite_matrix_for(label));
    for (const auto& alpha : positive_roots(g)) {
      auto av = coroot_coords(g, alpha);
      long s = 0;
      for (long i = 0; i < g.n; ++i) s += av[i] * pair_with_simple_coroot(g, alpha, i);
      CHECK(s == 2);
    }
  }
}

TEST_CASE("realization satisfies the defining pairings") {
  for (const auto& m : {mat({{2, -1}, {-1, 2}}), mat({{2, -2}, {-2, 2}}),
                        mat({{2, -1}, {-4, 2}})}) {
    GCM g = gcm_validate(m);
    Realization re = realization(g);
    CHECK(re.dim == re.n + re.corank);
    for (long j = 0; j < g.n; ++j)
      for (long i = 0; i < g.n; ++i) CHECK(re.alpha[j][i] == g.a[i][j]);
    CHECK((long)re.center.size() == re.corank);
    for (const auto& z : re.center)
      for (long j = 0; j < g.n; ++j) {
        Rat s(0);
        for (long x = 0; x < re.dim; ++x) s += rat(re.alpha[j][x]) * z[x];
        CHECK(s == 0);
      }
  }
}

TEST_CASE("matrix isomorphism matcher") {
  CHECK(find_iso_perm(mat({{2, -1}, {-4, 2}}), mat({{2, -4}, {-1, 2}})).has_value());
  CHECK(!find_iso_perm(*finite_matrix_for("B3"), *finite_matrix_for("C3")).has_value());
  CHECK(find_iso_perm(*finite_matrix_for("D4"), *finite_matrix_for("D4")).has_value());
}
