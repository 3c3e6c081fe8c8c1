#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "loopiso/erasing.hpp"
#include "loopiso/errors.hpp"
#include "loopiso/gcm.hpp"
#include "loopiso/loop.hpp"

using namespace loopiso;

namespace {

LiePtr lie(const std::string& label) {
  auto m = finite_matrix_for(label);
  REQUIRE(m.has_value());
  return build_finite(gcm_validate(*m));
}

AutWord wid() { return AutWord{}; }
AutWord womega() { return AutWord{{GenOmega{}}}; }
AutWord wflip(long n) {
  std::vector<long> p(n);
  for (long i = 0; i < n; ++i) p[i] = n - 1 - i;
  return AutWord{{GenDiagram{p}}};
}
AutWord wadr(std::vector<long> exps, long mod) {
  return AutWord{{GenAdR{std::move(exps), mod}}};
}
AutWord wrho(const std::vector<long>& a, long m) {
  return AutWord{{GenAdR{a, m}}};
}

std::vector<long> covec_mat(const std::vector<long>& a, const IMat& m) {
  std::vector<long> out(a.size(), 0);
  for (size_t j = 0; j < a.size(); ++j)
    for (size_t k = 0; k < a.size(); ++k) out[j] += a[k] * m[k][j];
  return out;
}

// order-3 symmetry of the D4 diagram, found by brute force
std::vector<long> triality(const IMat& a) {
  std::vector<long> p = {0, 1, 2, 3};
  do {
    bool hom = true;
    for (long i = 0; i < 4 && hom; ++i)
      for (long j = 0; j < 4 && hom; ++j)
        if (a[p[i]][p[j]] != a[i][j]) hom = false;
    if (!hom) continue;
    std::vector<long> q(4), r(4);
    for (long i = 0; i < 4; ++i) q[i] = p[p[i]];
    for (long i = 0; i < 4; ++i) r[i] = p[q[i]];
    bool id3 = true, id1 = true;
    for (long i = 0; i < 4; ++i) {
      if (r[i] != i) id3 = false;
      if (p[i] != i) id1 = false;
    }
    if (id3 && !id1) return p;
  } while (std::next_permutation(p.begin(), p.end()));
  REQUIRE(false);
  return {};
}

LoopElt img_of(const LoopMap& f, long deg, long k) {
  return f.images[deg + f.source->window][k];
}

LoopElt mono(long deg, const CycVec& v, const CycNum& s = CycNum(1)) {
  LoopElt e;
  e[deg] = vec_scaled(v, s);
  return e;
}

CycVec unit_vec(long dim, long idx) {
  CycVec v(dim);
  v[idx] = CycNum(1);
  return v;
}

// untwisted sources carry the standard basis; the index checks below need it
void require_standard_basis(const LoopAlgebra& L) {
  REQUIRE(L.m == 1);
  for (long k = 0; k < (long)L.resid_basis[0].size(); ++k)
    REQUIRE(vec_is_zero(
        vec_sub(L.resid_basis[0][k], unit_vec(L.base->dim, k))));
}

}  // namespace

TEST_CASE("the gap polynomial satisfies its identity") {
  CHECK(gd_polynomial(1).empty());
  CHECK(gd_polynomial(2) == std::vector<long>{1});
  CHECK(gd_polynomial(3) == std::vector<long>{2, 1});
  for (long d = 1; d <= 64; ++d) {
    auto g = gd_polynomial(d);
    // multiply out g(x) (x-1)^2 with plain integer arithmetic
    std::vector<long> prod(d + 3, 0);
    for (long i = 0; i < (long)g.size(); ++i) {
      prod[i] += g[i];
      prod[i + 1] -= 2 * g[i];
      prod[i + 2] += g[i];
    }
    std::vector<long> want(d + 3, 0);
    want[0] = d - 1;
    want[1] = -d;
    want[d] += 1;
    CHECK(prod == want);
  }
  CHECK_THROWS_WITH_AS(gd_polynomial(0), doctest::Contains("positive"), Error);
}

TEST_CASE("erasing covectors satisfy their constraints") {
  {
    auto D = erasing_data({{1}}, {5}, 3);
    CHECK(D.d == 1);
    CHECK(D.b == std::vector<long>{0});
    CHECK(D.c == std::vector<long>{5});
  }
  {
    auto D = erasing_data({{-1}}, {1}, 2);
    CHECK(D.d == 2);
    CHECK(D.b == std::vector<long>{-1});
    CHECK(D.c == std::vector<long>{0});
  }
  {
    auto D = erasing_data({{0, 1}, {1, 0}}, {1, 0}, 2);
    CHECK(D.d == 2);
    CHECK(D.b == std::vector<long>{-1, 0});
    CHECK(D.c == std::vector<long>{1, 1});
  }

  std::vector<IMat> actions = {
      {{1, 0}, {0, 1}},
      {{0, 1}, {1, 0}},
      {{-1, 0}, {0, -1}},
      {{0, -1}, {-1, 0}},
      {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},
  };
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> pick(-5, 5);
  for (auto& th : actions) {
    const long n = (long)th.size();
    IMat shifted = th;
    for (long i = 0; i < n; ++i) shifted[i][i] -= 1;
    for (long m : {2L, 3L, 4L, 6L}) {
      for (int trial = 0; trial < 8; ++trial) {
        std::vector<long> a(n);
        for (auto& x : a) x = pick(rng);
        auto D = erasing_data(th, a, m);
        auto n1 = covec_mat(D.b, shifted);
        for (long j = 0; j < n; ++j) CHECK(n1[j] + D.c[j] == D.d * a[j]);
        auto n2 = covec_mat(D.c, shifted);
        for (long j = 0; j < n; ++j) CHECK(n2[j] == 0);
      }
    }
  }

  CHECK_THROWS_WITH_AS(erasing_data({{1, 1}, {0, 1}}, {1, 0}, 2),
                       doctest::Contains("no period"), Error);
}

TEST_CASE("the erasing map twists by root characters") {
  auto L1 = lie("A1");
  const long he = L1->root_index({1});
  const long hf = L1->root_index({-1});

  auto phi = erasing_iso(L1, wid(), {1}, 2);
  require_standard_basis(*phi.source);
  for (long i = -3; i <= 3; ++i) {
    CHECK(loop_elt_eq(img_of(phi, i, he), mono(i + 1, unit_vec(L1->dim, he))));
    CHECK(loop_elt_eq(img_of(phi, i, hf), mono(i - 1, unit_vec(L1->dim, hf))));
    CHECK(loop_elt_eq(img_of(phi, i, 0), mono(i, unit_vec(L1->dim, 0))));
  }

  auto noop = erasing_iso(L1, wid(), {0}, 2);
  for (long i = -2; i <= 2; ++i)
    for (long k = 0; k < L1->dim; ++k)
      CHECK(loop_elt_eq(img_of(noop, i, k), mono(i, unit_vec(L1->dim, k))));

  auto L2 = lie("A2");
  auto psi = erasing_iso(L2, wflip(2), {1, 1}, 2);
  require_standard_basis(*psi.source);
  // d = 2, so scalars live at level dm = 4 and both simple shifts are 2
  const long e1 = L2->root_index({1, 0});
  const long e12 = L2->root_index({1, 1});
  CycNum z4i = CycNum::zeta_pow(4, 3);
  for (long i = -2; i <= 2; ++i) {
    CHECK(loop_elt_eq(img_of(psi, i, e1),
                      mono(i + 2, unit_vec(L2->dim, e1), z4i)));
    CHECK(loop_elt_eq(img_of(psi, i, e12),
                      mono(i + 4, unit_vec(L2->dim, e12), CycNum(-1))));
    CHECK(loop_elt_eq(img_of(psi, i, 0), mono(i, unit_vec(L2->dim, 0))));
  }

  CHECK_THROWS_WITH_AS(erasing_iso(L2, wflip(2), {1, 0}, 2),
                       doctest::Contains("does not commute"), Error);
  AutWord welem{{GenElementary{{1, 0}, CycNum(1)}}};
  CHECK_THROWS_WITH_AS(erasing_iso(L2, welem, {1, 1}, 2),
                       doctest::Contains("elementary"), Error);
  CHECK_THROWS_WITH_AS(erasing_iso(L2, wflip(2), {1, 1}, 3),
                       doctest::Contains("not of period"), Error);
}

TEST_CASE("conjugation transports the twist") {
  struct Cfg {
    std::string label;
    AutWord tau;
    std::vector<long> a;
    long m;
  };
  auto d4 = finite_matrix_for("D4");
  REQUIRE(d4.has_value());
  std::vector<Cfg> battery = {
      {"A1", wid(), {1}, 2},
      {"A1", womega(), {3}, 2},
      {"A2", wflip(2), {1, 1}, 2},
      {"A2", wadr({1, 2}, 3), {2, -1}, 3},
      {"A3", wflip(3), {1, 0, 1}, 2},
      {"A3", womega(), {2, 1, 0}, 2},
  };
  auto tri = triality(*d4);
  std::vector<long> a4(4, 0);
  for (long i = 0; i < 4; ++i) a4[i] = (tri[i] == i) ? 0 : 1;
  battery.push_back({"D4", AutWord{{GenDiagram{tri}}}, a4, 3});

  for (auto& cfg : battery) {
    CAPTURE(cfg.label);
    CAPTURE(cfg.m);
    auto L = lie(cfg.label);
    auto phi = erasing_iso(L, cfg.tau, cfg.a, cfg.m, cfg.m + 3);
    CHECK(verify_conj(phi, cfg.tau, cfg.a, cfg.m));
  }

  // fixed points travel to fixed points, both ways
  auto L = lie("A2");
  std::vector<long> a = {1, 1};
  auto phi = erasing_iso(L, wflip(2), a, 2);
  require_standard_basis(*phi.source);
  const long W = phi.source->window;  // 2dm+4 with dm = 4
  auto trword = word_concat(wflip(2), wrho(a, 2));
  auto Lt = build_loop(L, wflip(2), 4, W);
  auto Ltr = build_loop(L, trword, 4, phi.target->window);
  for (long i = -W; i <= W; ++i)
    for (long k = 0; k < Lt->comp_dim(i); ++k)
      CHECK(loop_membership(*Ltr, apply_loop_map(phi, basis_elt(*Lt, i, k))));

  std::vector<long> na = {-1, -1};
  auto back = erasing_iso(L, trword, na, 2);
  CHECK(verify_conj(back, trword, na, 2));
  const long Wb = back.source->window;
  auto Ltr2 = build_loop(L, trword, 4, Wb);
  auto Lt2 = build_loop(L, wflip(2), 4, back.target->window);
  for (long i = -Wb; i <= Wb; ++i)
    for (long k = 0; k < Ltr2->comp_dim(i); ++k)
      CHECK(loop_membership(*Lt2, apply_loop_map(back, basis_elt(*Ltr2, i, k))));

  // knocking one phase off ruins the conjugation identity
  auto wrong = phi;
  const long e1 = L->root_index({1, 0});
  for (long i = -W; i <= W; ++i)
    wrong.images[i + W][e1] =
        loop_elt_scale(wrong.images[i + W][e1], CycNum::zeta_pow(4, 1));
  CHECK_FALSE(verify_conj(wrong, wflip(2), a, 2));
}
