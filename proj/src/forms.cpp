#include "loopiso/forms.hpp"

#include "loopiso/errors.hpp"
#include "loopiso/gcm.hpp"

namespace loopiso {

namespace {

long md(long x, long m) {
  long r = x % m;
  return r < 0 ? r + m : r;
}

// true when every value word evaluates to a matrix on the model
bool eval_all(const Cocycle& u, std::vector<Mat>& out) {
  out.clear();
  try {
    for (auto& v : u.values) out.push_back(eval_word(v.word, u.base).mat);
  } catch (const Error& e) {
    if (e.code() != "WindowOverflow" && e.code() != "Unsupported") throw;
    return false;
  }
  return true;
}

}  // namespace

Cocycle loop_cocycle(const LiePtr& base, const AutWord& w, long m) {
  require(base != nullptr, "BadInput", "null algebra");
  require(m >= 1, "NotPeriod", "period must be positive");
  bool ok = false;
  try {
    AutMatrix am = eval_word(w, base);
    ok = am.mat.power(m) == Mat::identity(am.mat.rows());
  } catch (const Error& e) {
    if (e.code() != "WindowOverflow" && e.code() != "Unsupported") throw;
    try {
      ok = m % monomial_period(monomial_eval(w, *base), m) == 0;
    } catch (const Error& e2) {
      if (e2.code() != "PeriodExceeded") throw;
    }
  }
  require(ok, "NotPeriod", "word is not of period m on the base");
  Cocycle u;
  u.base = base;
  u.m = m;
  for (long i = 0; i < m; ++i) u.values.push_back({word_power(w, -i), 0});
  return u;
}

bool check_cocycle(const Cocycle& u) {
  if (!u.base || u.m < 1 || (long)u.values.size() != u.m) return false;
  const long m = u.m;
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < m; ++j) {
      long s = u.values[i].twist + u.values[j].twist;
      if (md(s - u.values[md(i + j, m)].twist, m) != 0) return false;
    }
  std::vector<Mat> A;
  if (eval_all(u, A)) {
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < m; ++j)
        if (!(A[i] * A[j] == A[md(i + j, m)])) return false;
    return true;
  }
  std::vector<MonomialAut> M;
  for (auto& v : u.values) M.push_back(monomial_eval(v.word, *u.base));
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < m; ++j)
      if (!(monomial_compose(M[i], M[j]) == M[md(i + j, m)])) return false;
  return true;
}

long GradedForm::comp_dim(long deg) const {
  require(deg >= -window && deg <= window, "WindowOverflow",
          "degree outside the window");
  return (long)comps[deg + window].size();
}

GradedForm fixed_form(const Cocycle& u, const LiePtr& L, long window) {
  require(L != nullptr && u.base != nullptr, "BadInput", "null algebra");
  require(L->dim == u.base->dim && L->gcm == u.base->gcm, "BadInput",
          "cocycle lives on a different algebra");
  require(check_cocycle(u), "BadInput",
          "values do not satisfy the cocycle identity");
  const long m = u.m;
  const long W = window <= 0 ? 2 * m + 4 : window;
  const FormAut& g1 = u.values[m == 1 ? 0 : 1];
  Mat A = eval_word(g1.word, L).mat;
  auto eig = eigenspaces(A, m);
  GradedForm F;
  F.base = L;
  F.m = m;
  F.window = W;
  F.comps.assign(2 * W + 1, {});
  for (long j = -W; j <= W; ++j) {
    long r = md(-(1 + g1.twist) * j, m);
    for (auto& [res, basis] : eig)
      if (res == r) F.comps[j + W] = basis;
  }
  return F;
}

bool cohomologous_witness_check(const Cocycle& u, const Cocycle& v,
                                const FormAut& f) {
  if (!u.base || !v.base || u.m != v.m) return false;
  if (u.base->dim != v.base->dim || !(u.base->gcm == v.base->gcm)) return false;
  if (!check_cocycle(u) || !check_cocycle(v)) return false;
  const long m = u.m;
  // the conjugated twist exponents come back unchanged
  for (long i = 0; i < m; ++i)
    if (md(u.values[i].twist - v.values[i].twist, m) != 0) return false;
  // compare f v_i with u_i f to avoid inverting anything
  std::vector<Mat> A, B;
  Cocycle vv = v;
  vv.base = u.base;
  if (eval_all(u, A) && eval_all(vv, B)) {
    Mat F = eval_word(f.word, u.base).mat;
    for (long i = 0; i < m; ++i)
      if (!(F * B[i] == A[i] * F)) return false;
    return true;
  }
  MonomialAut F = monomial_eval(f.word, *u.base);
  for (long i = 0; i < m; ++i) {
    MonomialAut Ui = monomial_eval(u.values[i].word, *u.base);
    MonomialAut Vi = monomial_eval(v.values[i].word, *u.base);
    if (!(monomial_compose(F, Vi) == monomial_compose(Ui, F))) return false;
  }
  return true;
}

namespace {

// scalars of a word on the center line and on h/h' of an affine model
std::pair<CycNum, CycNum> center_scalars(const AutWord& w, const LiePtr& L) {
  try {
    MonomialAut a = monomial_eval(w, *L);
    Realization R = realization(L->gcm);
    require(!R.center.empty() && a.hmat.rows() == R.dim, "InternalError",
            "realization shape mismatch");
    CycVec c(R.dim);
    for (long i = 0; i < R.dim; ++i) c[i] = CycNum(R.center[0][i]);
    CycVec img = a.hmat.apply(c);
    long k = 0;
    while (k < R.dim && c[k].is_zero()) ++k;
    require(k < R.dim, "InternalError", "empty center line");
    CycNum lam = img[k] * c[k].inverse();
    for (long i = 0; i < R.dim; ++i)
      require(img[i] == lam * c[i], "VerifyFailed",
              "the word does not preserve the center line");
    return {lam, a.hmat.at(R.dim - 1, R.dim - 1)};
  } catch (const Error& e) {
    if (e.code() != "NotGradingCompatible") throw;
  }
  Mat A = eval_word(w, L).mat;
  const long ci = L->c_index, di = L->d_index;
  for (long r = 0; r < A.rows(); ++r)
    require(r == ci || A.at(r, ci).is_zero(), "VerifyFailed",
            "the word does not preserve the center line");
  return {A.at(ci, ci), A.at(di, di)};
}

}  // namespace

TwistedAction twist_action(const Cocycle& u, long window) {
  require(u.base != nullptr, "BadInput", "null algebra");
  require(u.base->type == KacType::Affine && !u.base->is_sum, "TrivialModule",
          "coefficient module vanishes: the base has no center line");
  require(check_cocycle(u), "BadInput",
          "values do not satisfy the cocycle identity");
  const long m = u.m;
  const long W = window <= 0 ? 2 * m + 4 : window;
  const FormAut& g1 = u.values[m == 1 ? 0 : 1];
  auto [lam, beta] = center_scalars(g1.word, u.base);
  require(!lam.is_zero() && !beta.is_zero(), "VerifyFailed",
          "degenerate scalars on the module lines");
  CycNum unit = beta * lam.inverse();
  TwistedAction t;
  t.u = u;
  t.window = W;
  t.lam = lam;
  t.beta = beta;
  const long n = 2 * W + 1;
  t.action = Mat(n, n);
  for (long s = -W; s <= W; ++s)
    t.action.at(s + W, s + W) = unit * CycNum::zeta_pow(m, md((1 + g1.twist) * s, m));
  require(t.action.power(m) == Mat::identity(n), "VerifyFailed",
          "action period broke on the window");
  return t;
}

long h1_vanishing_check(const TwistedAction& t) {
  const long m = t.u.m;
  require(m >= 1, "BadInput", "empty group");
  const long n = t.action.rows();
  require(t.action.cols() == n && n == 2 * t.window + 1, "BadInput",
          "malformed action");
  require(t.action.power(m) == Mat::identity(n), "WindowNotStable",
          "action does not close on the truncated module; enlarge the window");
  Mat N(n, n), P = Mat::identity(n);
  for (long i = 0; i < m; ++i) {
    N = N + P;
    P = P * t.action;
  }
  long z1 = (long)nullspace(N).size();
  long b1 = n - (long)nullspace(t.action - Mat::identity(n)).size();
  return z1 - b1;
}

}  // namespace loopiso
