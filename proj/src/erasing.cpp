#include "loopiso/erasing.hpp"

#include <algorithm>

#include "loopiso/errors.hpp"

namespace loopiso {

namespace {

long md(long x, long m) {
  long r = x % m;
  return r < 0 ? r + m : r;
}

IMat imat_id(long n) {
  IMat e(n, std::vector<long>(n, 0));
  for (long i = 0; i < n; ++i) e[i][i] = 1;
  return e;
}

IMat imat_mul(const IMat& a, const IMat& b) {
  const long n = (long)a.size();
  IMat c(n, std::vector<long>(n, 0));
  for (long i = 0; i < n; ++i)
    for (long k = 0; k < n; ++k) {
      if (a[i][k] == 0) continue;
      for (long j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

long imat_order(const IMat& t, long bound) {
  const long n = (long)t.size();
  IMat p = t;
  for (long k = 1; k <= bound; ++k) {
    if (p == imat_id(n)) return k;
    p = imat_mul(p, t);
  }
  fail("NotFiniteOrder", "the grading action has no period up to 512");
}

// row covector times matrix
std::vector<long> covec_mat(const std::vector<long>& a, const IMat& m) {
  const long n = (long)a.size();
  std::vector<long> out(n, 0);
  for (long j = 0; j < n; ++j)
    for (long k = 0; k < n; ++k) out[j] += a[k] * m[k][j];
  return out;
}

// covector value on every basis index; Cartan rows sit at degree zero
std::vector<long> index_values(const LieAlgebra& L,
                               const std::vector<long>& cov) {
  std::vector<long> out(L.dim, 0);
  for (long idx = L.gcm.n; idx < L.dim; ++idx) {
    auto r = L.root_of_index(idx);
    long s = 0;
    for (long k = 0; k < L.gcm.n; ++k) s += cov[k] * r[k];
    out[idx] = s;
  }
  return out;
}

}  // namespace

std::vector<long> gd_polynomial(long d) {
  require(d >= 1, "BadInput", "period must be positive");
  std::vector<long> g;
  for (long i = 0; i + 2 <= d; ++i) g.push_back(d - i - 1);
  std::vector<long> lhs(d + 1, 0), rhs(d + 1, 0);
  for (long i = 0; i < (long)g.size(); ++i) {
    lhs[i] += g[i];
    lhs[i + 1] -= 2 * g[i];
    lhs[i + 2] += g[i];
  }
  rhs[0] += d - 1;
  rhs[1] -= d;
  rhs[d] += 1;
  require(lhs == rhs, "InternalError", "gap polynomial identity failed");
  return g;
}

ErasingData erasing_data(const IMat& tau_hat, const std::vector<long>& a,
                         long m) {
  const long n = (long)tau_hat.size();
  for (auto& row : tau_hat)
    require((long)row.size() == n, "BadInput", "square matrix required");
  require((long)a.size() == n, "BadInput", "one covector entry per node");
  require(m >= 1, "BadInput", "period must be positive");
  ErasingData D;
  D.m = m;
  D.a = a;
  D.tau_hat = tau_hat;
  D.d = imat_order(tau_hat, 512);
  auto g = gd_polynomial(D.d);
  IMat gt(n, std::vector<long>(n, 0));
  IMat p = imat_id(n);
  for (long i = 0; i < (long)g.size(); ++i) {
    for (long r = 0; r < n; ++r)
      for (long c = 0; c < n; ++c) gt[r][c] += g[i] * p[r][c];
    p = imat_mul(p, tau_hat);
  }
  auto bg = covec_mat(a, gt);
  D.b.assign(n, 0);
  for (long j = 0; j < n; ++j) D.b[j] = -bg[j];
  IMat shifted = tau_hat;
  for (long i = 0; i < n; ++i) shifted[i][i] -= 1;
  auto bs = covec_mat(D.b, shifted);
  D.c.assign(n, 0);
  for (long j = 0; j < n; ++j) D.c[j] = D.d * a[j] - bs[j];
  for (long j = 0; j < n; ++j)
    require(bs[j] + D.c[j] == D.d * a[j], "VerifyFailed",
            "erasing covectors broke their first identity");
  auto cs = covec_mat(D.c, shifted);
  for (long j = 0; j < n; ++j)
    require(cs[j] == 0, "VerifyFailed",
            "erasing covectors broke their second identity");
  return D;
}

LoopMap erasing_iso(const LiePtr& L, const AutWord& tau,
                    const std::vector<long>& a, long m, long window) {
  require(L != nullptr, "BadInput", "null algebra");
  require(L->type == KacType::Finite && !L->is_sum, "WrongType",
          "erasing needs a finite type base");
  require(word_grading_compatible(tau), "NotGradingCompatible",
          "erasing needs a word without elementary factors");
  require((long)a.size() == L->gcm.n, "BadInput", "one exponent per node");
  require(m >= 1, "NotPeriod", "period must be positive");
  MonomialAut mt = monomial_eval(tau, *L);
  long p = 0;
  try {
    p = monomial_period(mt, m);
  } catch (const Error& e) {
    if (e.code() != "PeriodExceeded") throw;
  }
  require(p >= 1 && m % p == 0, "NotPeriod",
          "word is not of period m on the base");
  IMat th = root_lattice_matrix(mt);
  const long n = L->gcm.n;
  for (long j = 0; j < n; ++j) {
    long s = -a[j];
    for (long k = 0; k < n; ++k) s += a[k] * th[k][j];
    require(md(s, m) == 0, "NotCommuting",
            "the diagonal twist does not commute with the word");
  }
  ErasingData D = erasing_data(th, a, m);
  const long dm = D.d * m;
  auto bv = index_values(*L, D.b);
  auto cv = index_values(*L, D.c);
  long cmax = 0;
  for (long v : cv) cmax = std::max(cmax, v < 0 ? -v : v);
  const long W = window <= 0 ? 2 * dm + 4 : window;
  auto src = build_loop(L, AutWord{}, 1, W);
  auto tgt = build_loop(L, AutWord{}, 1, W + cmax);
  std::vector<std::vector<LoopElt>> images(2 * W + 1);
  for (long i = -W; i <= W; ++i) {
    auto& row = images[i + W];
    for (const CycVec& v : src->resid_basis[src->residue(i)]) {
      LoopElt img;
      for (long idx = 0; idx < L->dim; ++idx) {
        if (v[idx].is_zero()) continue;
        CycVec& vec = img[i + cv[idx]];
        if (vec.empty()) vec.assign(L->dim, CycNum());
        vec[idx] += v[idx] * CycNum::zeta_pow(dm, md(bv[idx], dm));
      }
      loop_elt_trim(img);
      row.push_back(std::move(img));
    }
  }
  return make_loop_map(src, tgt, std::move(images), CycNum(1), 1);
}

bool verify_conj(const LoopMap& phi, const AutWord& tau,
                 const std::vector<long>& a, long m) {
  const LiePtr& L = phi.source->base;
  IMat th = root_lattice_matrix(monomial_eval(tau, *L));
  const long dm = imat_order(th, 512) * m;
  Mat T = eval_word(tau, L).mat;
  Mat TR = T * eval_word(AutWord{{GenAdR{a, m}}}, L).mat;
  const long W = phi.source->window;
  const long tW = phi.target->window;
  for (long i = -W; i <= W; ++i) {
    const auto& basis = phi.source->resid_basis[phi.source->residue(i)];
    for (long k = 0; k < (long)basis.size(); ++k) {
      LoopElt arg;
      arg[i] = vec_scaled(T.apply(basis[k]), CycNum::zeta_pow(dm, md(-i, dm)));
      loop_elt_trim(arg);
      LoopElt lhs = apply_loop_map(phi, arg);
      LoopElt rhs;
      for (auto& [j, vec] : phi.images[i + W][k]) {
        if (j < -tW || j > tW) return false;
        rhs[j] = vec_scaled(TR.apply(vec), CycNum::zeta_pow(dm, md(-j, dm)));
      }
      loop_elt_trim(rhs);
      if (!loop_elt_eq(lhs, rhs)) return false;
    }
  }
  return true;
}

}  // namespace loopiso
