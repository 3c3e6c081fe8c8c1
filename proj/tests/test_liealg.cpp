#include <map>
#include <random>

#include "doctest.h"
#include "loopiso/errors.hpp"
#include "loopiso/liealg.hpp"

using namespace loopiso;

namespace {

CycVec jacobi_defect(const LieAlgebra& L, long i, long j, long k) {
  auto term = [&](long a, long b, long c) {
    CycVec acc(L.dim);
    for (auto& [t, w] : L.bracket_basis(b, c)) {
      for (auto& [u, v] : L.bracket_basis(a, t)) acc[u] += w * v;
    }
    return acc;
  };
  return vec_add(vec_add(term(i, j, k), term(j, k, i)), term(k, i, j));
}

void check_jacobi_exhaustive(const LieAlgebra& L) {
  for (long i = 0; i < L.dim; ++i)
    for (long j = i + 1; j < L.dim; ++j)
      for (long k = j + 1; k < L.dim; ++k)
        REQUIRE(vec_is_zero(jacobi_defect(L, i, j, k)));
}

bool is_homomorphism(const LieAlgebra& L, const Mat& m) {
  for (long i = 0; i < L.dim; ++i) {
    CycVec mi(L.dim);
    for (long r = 0; r < L.dim; ++r) mi[r] = m.at(r, i);
    for (long j = i + 1; j < L.dim; ++j) {
      CycVec mj(L.dim);
      for (long r = 0; r < L.dim; ++r) mj[r] = m.at(r, j);
      CycVec lhs = m.apply(sparse_to_dense(L.bracket_basis(i, j), L.dim));
      if (!vec_is_zero(vec_sub(lhs, L.bracket(mi, mj)))) return false;
    }
  }
  return true;
}

long fixed_dim(const Mat& m) {
  Mat d = m - Mat::identity(m.rows());
  return (long)nullspace(d).size();
}

CycVec unit_vec(long dim, long k) {
  CycVec v(dim);
  v[k] = CycNum(1L);
  return v;
}

}  // namespace

TEST_CASE("sl2 has the textbook structure") {
  auto L = build_finite("A1");
  CHECK(L->dim == 3);
  // [h, e] = 2e, [h, f] = -2f, [e, f] = h
  auto he = L->bracket(L->gen_h[0], L->gen_e[0]);
  CHECK(he == vec_scaled(L->gen_e[0], CycNum(2L)));
  auto hf = L->bracket(L->gen_h[0], L->gen_f[0]);
  CHECK(hf == vec_scaled(L->gen_f[0], CycNum(-2L)));
  auto ef = L->bracket(L->gen_e[0], L->gen_f[0]);
  CHECK(ef == L->gen_h[0]);
}

TEST_CASE("dimensions match the classical tables") {
  std::map<std::string, long> want = {
      {"A1", 3},  {"A2", 8},  {"A3", 15}, {"A4", 24}, {"B3", 21}, {"B4", 36},
      {"C2", 10}, {"C3", 21}, {"C4", 36}, {"D4", 28}, {"G2", 14}, {"F4", 52}};
  for (auto& [label, d] : want) {
    auto L = build_finite(label);
    CHECK(L->dim == d);
    CHECK(L->label == label);
  }
}

TEST_CASE("Jacobi identity holds on every basis triple") {
  for (const char* label : {"A2", "C2", "G2", "A3", "B3", "D4"}) {
    auto L = build_finite(label);
    check_jacobi_exhaustive(*L);
  }
}

TEST_CASE("Jacobi identity holds on sampled F4 triples") {
  auto L = build_finite("F4");
  std::mt19937_64 rng(20260821);
  std::uniform_int_distribution<long> pick(0, L->dim - 1);
  for (int t = 0; t < 4000; ++t) {
    long i = pick(rng), j = pick(rng), k = pick(rng);
    REQUIRE(vec_is_zero(jacobi_defect(*L, i, j, k)));
  }
}

TEST_CASE("structure constants have magnitude p+1") {
  for (const char* label : {"A3", "G2", "F4"}) {
    auto L = build_finite(label);
    std::vector<std::vector<long>> all;
    for (auto& r : L->proots) {
      all.push_back(r);
      std::vector<long> neg(r.size());
      for (size_t t = 0; t < r.size(); ++t) neg[t] = -r[t];
      all.push_back(neg);
    }
    auto is_root = [&](const std::vector<long>& r) {
      for (auto& q : all)
        if (q == r) return true;
      return false;
    };
    for (auto& a : all) {
      for (auto& b : all) {
        std::vector<long> sum(a.size());
        bool zero = true;
        for (size_t t = 0; t < a.size(); ++t) {
          sum[t] = a[t] + b[t];
          if (sum[t] != 0) zero = false;
        }
        if (zero || !is_root(sum)) continue;
        Rat n = chevalley_constant(*L, a, b);
        REQUIRE(n != 0);
        REQUIRE(n.get_den() == 1);
        long p = string_down_length(*L, a, b);
        REQUIRE(abs(n) == Rat(p + 1));
      }
    }
  }
}

TEST_CASE("extraspecial pairs carry positive constants") {
  for (const char* label : {"A3", "B3", "G2", "D4"}) {
    auto L = build_finite(label);
    for (auto& eps : L->proots) {
      if (root_height(eps) < 2) continue;
      // first positive root gamma (in basis order) with eps-gamma a later root
      bool done = false;
      for (long c = 0; c < (long)L->proots.size() && !done; ++c) {
        std::vector<long> delta(eps.size());
        bool ok = true;
        for (size_t t = 0; t < eps.size(); ++t) {
          delta[t] = eps[t] - L->proots[c][t];
          if (delta[t] < 0) ok = false;
        }
        if (!ok) continue;
        auto it = L->pos_of.find(delta);
        if (it == L->pos_of.end() || it->second <= c) continue;
        Rat n = chevalley_constant(*L, L->proots[c], delta);
        long p = string_down_length(*L, L->proots[c], delta);
        CHECK(n == Rat(p + 1));
        done = true;
      }
      CHECK(done);
    }
  }
}

TEST_CASE("opposite root vectors bracket to the coroot") {
  auto L = build_finite("G2");
  for (auto& al : L->proots) {
    std::vector<long> neg(al.size());
    for (size_t t = 0; t < al.size(); ++t) neg[t] = -al[t];
    auto s = L->bracket_basis(L->root_index(al), L->root_index(neg));
    auto co = coroot_coords(L->gcm, al);
    CycVec want(L->dim);
    for (long l = 0; l < L->gcm.n; ++l) want[l] = CycNum(co[l]);
    CHECK(sparse_to_dense(s, L->dim) == want);
  }
}

TEST_CASE("antisymmetry relations of the constant table") {
  auto L = build_finite("D4");
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> pick(0, (long)L->proots.size() - 1);
  long done = 0;
  while (done < 60) {
    auto a = L->proots[pick(rng)];
    auto b = L->proots[pick(rng)];
    std::vector<long> sum(a.size()), na(a.size()), nb(a.size());
    bool zero = true;
    for (size_t t = 0; t < a.size(); ++t) {
      sum[t] = a[t] + b[t];
      na[t] = -a[t];
      nb[t] = -b[t];
      if (sum[t] != 0) zero = false;
    }
    if (zero || !L->pos_of.count(sum)) continue;
    Rat n1 = chevalley_constant(*L, a, b);
    CHECK(chevalley_constant(*L, b, a) == -n1);
    CHECK(chevalley_constant(*L, na, nb) == -n1);
    ++done;
  }
}

TEST_CASE("invariant form is symmetric invariant and normalized") {
  for (const char* label : {"A2", "G2"}) {
    auto L = build_finite(label);
    Mat g = invariant_form(*L);
    CHECK(g == g.transpose());
    for (long i = 0; i < L->gcm.n; ++i)
      for (long j = 0; j < L->gcm.n; ++j)
        CHECK(g.at(i, j) == CycNum(L->gcm.eps[i] * L->gcm.a[j][i]));
    // ([x,y],z) == (x,[y,z]) over all basis triples
    for (long i = 0; i < L->dim; ++i)
      for (long j = 0; j < L->dim; ++j)
        for (long k = 0; k < L->dim; ++k) {
          CycNum lhs, rhs;
          for (auto& [t, c] : L->bracket_basis(i, j)) lhs += c * g.at(t, k);
          for (auto& [t, c] : L->bracket_basis(j, k)) rhs += g.at(i, t) * c;
          REQUIRE(lhs == rhs);
        }
    CHECK(!det(g).is_zero());
  }
}

TEST_CASE("diagram flip of sl3 splits it into 3 + 5") {
  auto L = build_finite("A2");
  Mat m = diagram_automorphism_matrix(*L, {1, 0});
  CHECK(is_homomorphism(*L, m));
  CHECK(m.power(2) == Mat::identity(L->dim));
  CHECK(fixed_dim(m) == 3);
  Mat anti = m + Mat::identity(L->dim);
  CHECK((long)nullspace(anti).size() == 5);
}

TEST_CASE("diagram flip of sl4 fixes a 10 dimensional subalgebra") {
  auto L = build_finite("A3");
  Mat m = diagram_automorphism_matrix(*L, {2, 1, 0});
  CHECK(is_homomorphism(*L, m));
  CHECK(m.power(2) == Mat::identity(L->dim));
  CHECK(fixed_dim(m) == 10);
}

TEST_CASE("triality fixes a copy of g2 inside so8") {
  auto L = build_finite("D4");
  Mat m = diagram_automorphism_matrix(*L, {2, 1, 3, 0});
  CHECK(is_homomorphism(*L, m));
  CHECK(m.power(3) == Mat::identity(L->dim));
  CHECK(!(m == Mat::identity(L->dim)));
  CHECK(fixed_dim(m) == 14);
}

TEST_CASE("chevalley involution negates the cartan and flips roots") {
  auto L = build_finite("B3");
  Mat m = chevalley_involution_matrix(*L);
  CHECK(is_homomorphism(*L, m));
  CHECK(m.power(2) == Mat::identity(L->dim));
  for (long i = 0; i < L->gcm.n; ++i)
    CHECK(m.apply(L->gen_h[i]) == vec_scaled(L->gen_h[i], CycNum(-1L)));
  for (auto& al : L->proots) {
    // image of a positive root vector lies on the opposite root line
    CycVec img = m.apply(unit_vec(L->dim, L->root_index(al)));
    std::vector<long> neg(al.size());
    for (size_t t = 0; t < al.size(); ++t) neg[t] = -al[t];
    long target = L->root_index(neg);
    for (long r = 0; r < L->dim; ++r)
      if (r != target) CHECK(img[r].is_zero());
    CHECK(!img[target].is_zero());
  }
}

TEST_CASE("centroid of a simple algebra is one dimensional") {
  CHECK(centroid_of(*build_finite("A1")).size() == 1);
  CHECK(centroid_of(*build_finite("A2")).size() == 1);
}

TEST_CASE("centroid of sl2+sl2 is two dimensional") {
  auto A = build_finite("A1");
  auto S = direct_sum(A, A);
  CHECK(S->dim == 6);
  check_jacobi_exhaustive(*S);
  auto cents = centroid_of(*S);
  CHECK(cents.size() == 2);
}

TEST_CASE("derived algebra and centre of semisimple models") {
  auto L = build_finite("A2");
  auto dc = derived_and_center(*L);
  CHECK((long)dc.derived.size() == L->dim);
  CHECK(dc.center.empty());
  auto S = direct_sum(build_finite("A1"), build_finite("A1"));
  auto dcs = derived_and_center(*S);
  CHECK(dcs.derived.size() == 6);
  CHECK(dcs.center.empty());
}

TEST_CASE("untwisted affine model of sl2") {
  auto m = gcm_validate({{2, -2}, {-2, 2}});
  auto L = build_affine(m, 2);
  CHECK(L->label == "A1^(1)");
  CHECK(L->dim == 17);  // 3 per degree in [-2,2], plus c and d
  std::map<long, long> per_degree;
  for (long i = 0; i < L->dim; ++i)
    if (L->eigcol[i] >= 0) per_degree[L->z_deg[i]]++;
  for (long t = -2; t <= 2; ++t) CHECK(per_degree[t] == 3);
  auto dc = derived_and_center(*L);
  CHECK((long)dc.derived.size() == L->dim - 1);  // everything except d
  CHECK(dc.center.size() == 1);
  CHECK(!dc.center[0][L->c_index].is_zero());
}

TEST_CASE("untwisted affine sl2 with room for serre relations") {
  auto m = gcm_validate({{2, -2}, {-2, 2}});
  auto L = build_affine(m, 8);  // construction verifies the relations
  CHECK(L->dim == 3 * 17 + 2);
  CHECK(L->gen_deg[0] + L->gen_deg[1] == 1);  // exactly one loop generator
}

TEST_CASE("untwisted affine sl3 degree zero part") {
  auto m = gcm_validate({{2, -1, -1}, {-1, 2, -1}, {-1, -1, 2}});
  auto L = build_affine(m, 2);
  CHECK(L->label == "A2^(1)");
  long deg0 = 0;
  for (long i = 0; i < L->dim; ++i)
    if (L->z_deg[i] == 0) deg0++;
  CHECK(deg0 == 10);  // sl3 plus c plus d
}

TEST_CASE("window overflow is loud") {
  auto m = gcm_validate({{2, -2}, {-2, 2}});
  auto L = build_affine(m, 2);
  long i2 = -1, i1 = -1;
  for (long i = 0; i < L->dim; ++i) {
    if (L->eigcol[i] < 0) continue;
    if (L->z_deg[i] == 2 && i2 < 0) i2 = i;
    if (L->z_deg[i] == 1 && i1 < 0) i1 = i;
  }
  CHECK_THROWS_WITH_AS(L->bracket_basis(i2, i1), doctest::Contains("window"),
                       Error);
}

TEST_CASE("twisted affine model from the order two fold of sl3") {
  auto m = gcm_validate({{2, -4}, {-1, 2}});
  auto L = build_affine(m, 8);
  CHECK(L->label == "A2^(2)");
  CHECK(L->twist_order == 2);
  std::map<long, long> per_degree;
  for (long i = 0; i < L->dim; ++i)
    if (L->eigcol[i] >= 0) per_degree[L->z_deg[i]]++;
  CHECK(per_degree[0] == 3);
  CHECK(per_degree[1] == 5);
  CHECK(per_degree[2] == 3);
  CHECK(per_degree[-1] == 5);
  // sampled Jacobi inside the window
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> pick(0, L->dim - 1);
  long done = 0;
  while (done < 300) {
    long i = pick(rng), j = pick(rng), k = pick(rng);
    long s = L->z_deg[i] + L->z_deg[j] + L->z_deg[k];
    long worst = std::max({std::labs(L->z_deg[i] + L->z_deg[j]),
                           std::labs(L->z_deg[j] + L->z_deg[k]),
                           std::labs(L->z_deg[i] + L->z_deg[k]), std::labs(s)});
    if (worst > L->window) continue;
    REQUIRE(vec_is_zero(jacobi_defect(*L, i, j, k)));
    ++done;
  }
}

TEST_CASE("twisted affine model from triality") {
  auto m = gcm_validate({{2, -1, 0}, {-1, 2, -3}, {0, -1, 2}});
  auto L = build_affine(m, 6);
  CHECK(L->label == "D4^(3)");
  CHECK(L->twist_order == 3);
  std::map<long, long> per_degree;
  for (long i = 0; i < L->dim; ++i)
    if (L->eigcol[i] >= 0) per_degree[L->z_deg[i]]++;
  CHECK(per_degree[0] == 14);  // the fixed g2
  CHECK(per_degree[1] == 7);
  CHECK(per_degree[2] == 7);
  CHECK(per_degree[3] == 14);
}

TEST_CASE("remaining twisted families build and verify their relations") {
  for (const char* lbl : {"A4^(2)", "A5^(2)", "D3^(2)", "D5^(2)", "E6^(2)"}) {
    const CatalogEntry* hit = nullptr;
    for (auto& e : affine_catalog())
      if (e.label == lbl) hit = &e;
    REQUIRE(hit != nullptr);
    auto L = build_affine(gcm_validate(hit->matrix), 8);
    CHECK(L->label == lbl);
  }
}

TEST_CASE("affine invariant form couples opposite degrees and c with d") {
  auto m = gcm_validate({{2, -2}, {-2, 2}});
  auto L = build_affine(m, 3);
  Mat g = invariant_form(*L);
  CHECK(g == g.transpose());
  CHECK(!g.at(L->c_index, L->d_index).is_zero());
  CHECK(g.at(L->d_index, L->d_index).is_zero());
  CHECK(g.at(L->c_index, L->c_index).is_zero());
  for (long i = 0; i < L->gcm.n; ++i) {
    // (alpha_i_vee, alpha_j_vee) = eps_i a_ji
    for (long j = 0; j < L->gcm.n; ++j) {
      CycNum lhs;
      for (long r = 0; r < L->dim; ++r)
        for (long c = 0; c < L->dim; ++c)
          if (!L->gen_h[i][r].is_zero() && !L->gen_h[j][c].is_zero())
            lhs += L->gen_h[i][r] * g.at(r, c) * L->gen_h[j][c];
      CHECK(lhs == CycNum(L->gcm.eps[i] * L->gcm.a[j][i]));
    }
  }
  // invariance on sampled triples that stay in the window
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> pick(0, L->dim - 1);
  long done = 0;
  while (done < 200) {
    long i = pick(rng), j = pick(rng), k = pick(rng);
    if (!L->bracket_defined(i, j) || !L->bracket_defined(j, k)) continue;
    CycNum lhs, rhs;
    for (auto& [t, c] : L->bracket_basis(i, j)) lhs += c * g.at(t, k);
    for (auto& [t, c] : L->bracket_basis(j, k)) rhs += g.at(i, t) * c;
    REQUIRE(lhs == rhs);
    ++done;
  }
}

TEST_CASE("affine build rejects finite and indefinite input") {
  CHECK_THROWS_AS(build_affine(gcm_validate({{2, -1}, {-1, 2}}), 4), Error);
  CHECK_THROWS_AS(build_affine(gcm_validate({{2, -3}, {-3, 2}}), 4), Error);
}
