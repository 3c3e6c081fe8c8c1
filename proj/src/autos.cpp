#include "loopiso/autos.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "loopiso/errors.hpp"

namespace loopiso {

namespace {

bool is_perm(const std::vector<long>& p) {
  std::vector<char> seen(p.size(), 0);
  for (long v : p) {
    if (v < 0 || v >= (long)p.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

CycVec unit_vec(long dim, long idx) {
  CycVec v(dim);
  v[idx] = CycNum(1);
  return v;
}

CycVec mat_col(const Mat& m, long j) {
  CycVec v(m.rows());
  for (long i = 0; i < m.rows(); ++i) v[i] = m.at(i, j);
  return v;
}

bool vec_eq(const CycVec& a, const CycVec& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

// u == s * t for some scalar s
std::optional<CycNum> proportionality(const CycVec& u, const CycVec& t) {
  long p = -1;
  for (size_t i = 0; i < t.size(); ++i)
    if (!t[i].is_zero()) {
      p = (long)i;
      break;
    }
  if (p < 0) return vec_is_zero(u) ? std::optional<CycNum>(CycNum(1)) : std::nullopt;
  CycNum s = u[p] / t[p];
  if (!vec_eq(u, vec_scaled(t, s))) return std::nullopt;
  return s;
}

// bracket-compatibility on every basis pair whose image bracket stays
// in the window; image brackets with out-of-window support are skipped
bool hom_on_basis(const LieAlgebra& L, const Mat& m) {
  long dim = L.dim;
  if (m.rows() != dim || m.cols() != dim) return false;
  std::vector<CycVec> col(dim);
  for (long j = 0; j < dim; ++j) col[j] = mat_col(m, j);
  for (long i = 0; i < dim; ++i)
    for (long j = i + 1; j < dim; ++j) {
      if (!L.bracket_defined(i, j)) continue;
      bool in_window = true;
      CycVec rhs(dim);
      for (long p = 0; p < dim && in_window; ++p) {
        if (col[i][p].is_zero()) continue;
        for (long q = 0; q < dim; ++q) {
          if (col[j][q].is_zero()) continue;
          if (!L.bracket_defined(p, q)) {
            in_window = false;
            break;
          }
          for (auto& [k, c] : L.bracket_basis(p, q)) rhs[k] += col[i][p] * col[j][q] * c;
        }
      }
      if (!in_window) continue;
      CycVec lhs = m.apply(sparse_to_dense(L.bracket_basis(i, j), dim));
      if (!vec_eq(lhs, rhs)) return false;
    }
  return true;
}

void verify_model_auto(const LieAlgebra& L, const Mat& m, const char* what) {
  require(hom_on_basis(L, m), "VerifyFailed",
          std::string(what) + ": bracket compatibility check failed");
}

// ----- affine root bookkeeping -----

// simple-root coordinates of the ad-weight of every basis vector
struct AffineCoords {
  std::vector<std::vector<long>> coords;  // per basis index, length n
};

AffineCoords affine_root_coords(const LieAlgebra& L) {
  long n = L.gcm.n, dim = L.dim;
  std::vector<long> hidx;
  for (long i = 0; i < dim; ++i) {
    if (i == L.c_index) continue;
    bool wz = true;
    for (long v : L.weight[i])
      if (v != 0) wz = false;
    if (i == L.d_index || (L.z_deg[i] == 0 && wz && L.eigcol[i] >= 0)) hidx.push_back(i);
  }
  long hn = (long)hidx.size();
  Mat afun(hn, n);
  for (long j = 0; j < n; ++j)
    for (long u = 0; u < hn; ++u) afun.at(u, j) = L.alpha_fun[j][hidx[u]];
  AffineCoords out;
  out.coords.assign(dim, std::vector<long>(n, 0));
  for (long b = 0; b < dim; ++b) {
    CycVec lam(hn);
    for (long u = 0; u < hn; ++u) {
      for (auto& [k, c] : L.bracket_basis(hidx[u], b))
        if (k == b) lam[u] = c;
    }
    auto k = solve(afun, lam);
    require(k.has_value(), "VerifyFailed", "basis vector has no root coordinates");
    for (long j = 0; j < n; ++j) {
      require((*k)[j].is_rational(), "VerifyFailed", "non-rational root coordinate");
      Rat r = (*k)[j].to_rational();
      require(r.get_den() == 1, "VerifyFailed", "non-integral root coordinate");
      out.coords[b][j] = (long)r.get_num().get_si();
    }
  }
  return out;
}

// ----- per-generator matrices -----

void validate_diagram(const GCM& g, const std::vector<long>& perm) {
  require((long)perm.size() == g.n && is_perm(perm), "InvalidWord",
          "diagram generator: not a node permutation");
  require(is_gcm_automorphism(g, perm), "InvalidWord",
          "diagram generator: permutation does not preserve the Cartan matrix");
}

long zmod(long long k, long m) { return (long)(((k % m) + m) % m); }

Mat adr_matrix(const LieAlgebra& L, const GenAdR& g) {
  long n = L.gcm.n;
  require((long)g.exps.size() == n, "InvalidWord", "diagonal generator: exponent count");
  require(g.modulus >= 1, "InvalidWord", "diagonal generator: modulus");
  Mat m(L.dim, L.dim);
  if (L.type == KacType::Finite) {
    for (long idx = 0; idx < L.dim; ++idx) {
      long s = 0;
      if (idx >= n) {
        auto beta = L.root_of_index(idx);
        for (long j = 0; j < n; ++j) s += g.exps[j] * beta[j];
      }
      m.at(idx, idx) = CycNum::zeta_pow(g.modulus, zmod(s, g.modulus));
    }
  } else {
    auto rc = affine_root_coords(L);
    for (long idx = 0; idx < L.dim; ++idx) {
      long s = 0;
      for (long j = 0; j < n; ++j) s += g.exps[j] * rc.coords[idx][j];
      m.at(idx, idx) = CycNum::zeta_pow(g.modulus, zmod(s, g.modulus));
    }
  }
  return m;
}

long affine_special_node(const LieAlgebra& L) {
  for (long i = 0; i < L.gcm.n; ++i)
    if (L.gen_deg[i] != 0) return i;
  return -1;
}

// diagonal automorphism scaling the root space of alpha by prod chi[j]^k_j,
// alpha = sum k_j alpha_j; fixes the whole Cartan part
Mat root_character(const LieAlgebra& L, const AffineCoords& rc,
                   const std::vector<CycNum>& chi) {
  Mat d = Mat::identity(L.dim);
  for (long idx = 0; idx < L.dim; ++idx) {
    CycNum v(1);
    for (long j = 0; j < L.gcm.n; ++j)
      if (rc.coords[idx][j] != 0) v = v * chi[j].pow(rc.coords[idx][j]);
    d.at(idx, idx) = v;
  }
  return d;
}

// reassemble base map G (base coords) degree-wise; flip degrees when neg
std::optional<Mat> loop_transport(const LieAlgebra& L, const Mat& g, bool neg,
                                  const CycNum& cd_scale) {
  long dim = L.dim;
  Mat m(dim, dim);
  m.at(L.c_index, L.c_index) = cd_scale;
  m.at(L.d_index, L.d_index) = cd_scale;
  for (long idx = 0; idx < dim; ++idx) {
    if (idx == L.c_index || idx == L.d_index) continue;
    long t = L.z_deg[idx];
    long tt = neg ? -t : t;
    CycVec v = mat_col(L.eigen_cols, L.eigcol[idx]);
    CycVec w = L.eigen_cols_inv.apply(g.apply(v));
    for (long cc = 0; cc < (long)w.size(); ++cc) {
      if (w[cc].is_zero()) continue;
      auto it = L.loop_index.find({tt, cc});
      if (it == L.loop_index.end()) return std::nullopt;
      m.at(it->second, idx) = w[cc];
    }
  }
  return m;
}

Mat omega_matrix_affine(const LieAlgebra& L) {
  const LieAlgebra& base = *L.base;
  long r = L.twist_order;
  Mat w0 = chevalley_involution_matrix(base);
  std::vector<std::vector<long>> candidates;
  if (r <= 2) {
    candidates.push_back(perm_identity(base.gcm.n));
  } else {
    Mat nu_inv = L.nu.power(r - 1);
    for (auto& p : diagram_automorphism_group(base.gcm)) {
      Mat dp = diagram_automorphism_matrix(base, p);
      if (dp * L.nu == nu_inv * dp) candidates.push_back(p);
    }
  }
  auto rc = affine_root_coords(L);
  for (auto& p : candidates) {
    Mat g = diagram_automorphism_matrix(base, p) * w0;
    auto mm = loop_transport(L, g, true, CycNum(-1));
    if (!mm) continue;
    Mat m = *mm;
    bool ok = true;
    std::vector<CycNum> chi(L.gcm.n, CycNum(1));
    bool need = false;
    for (long i = 0; i < L.gcm.n && ok; ++i) {
      CycVec u = m.apply(L.gen_e[i]);
      auto s = proportionality(u, vec_scaled(L.gen_f[i], CycNum(-1)));
      if (!s || s->is_zero()) {
        ok = false;
        break;
      }
      chi[i] = *s;
      if (*s != CycNum(1)) need = true;
    }
    if (!ok) continue;
    if (need) m = root_character(L, rc, chi) * m;
    for (long i = 0; i < L.gcm.n && ok; ++i) {
      if (!vec_eq(m.apply(L.gen_e[i]), vec_scaled(L.gen_f[i], CycNum(-1)))) ok = false;
      if (!vec_eq(m.apply(L.gen_f[i]), vec_scaled(L.gen_e[i], CycNum(-1)))) ok = false;
      if (!vec_eq(m.apply(L.gen_h[i]), vec_scaled(L.gen_h[i], CycNum(-1)))) ok = false;
    }
    if (!ok) continue;
    verify_model_auto(L, m, "involution");
    return m;
  }
  fail("Unsupported", "involution not realizable on this loop model");
}

Mat diagram_matrix_affine(const LieAlgebra& L, const std::vector<long>& perm) {
  bool trivial = true;
  for (long i = 0; i < L.gcm.n; ++i)
    if (perm[i] != i) trivial = false;
  if (trivial) return Mat::identity(L.dim);
  for (long i = 0; i < L.gcm.n; ++i)
    require(L.gen_deg[perm[i]] == L.gen_deg[i], "WindowOverflow",
            "node permutation shifts loop degrees beyond any finite window");
  require(L.twist_order == 1, "Unsupported",
          "degree-preserving node permutation on a twisted loop model");
  const LieAlgebra& base = *L.base;
  long node0 = affine_special_node(L);
  // recover which base node each degree-0 generator came from
  std::vector<long> base_of(L.gcm.n, -1);
  for (long i = 0; i < L.gcm.n; ++i) {
    if (L.gen_deg[i] != 0) continue;
    CycVec bv(base.dim);
    for (long idx = 0; idx < L.dim; ++idx) {
      if (L.gen_e[i][idx].is_zero()) continue;
      require(L.z_deg[idx] == 0 && L.eigcol[idx] >= 0, "VerifyFailed",
              "generator outside the degree-0 block");
      bv = vec_add(bv, vec_scaled(mat_col(L.eigen_cols, L.eigcol[idx]), L.gen_e[i][idx]));
    }
    for (long k = 0; k < base.gcm.n; ++k)
      if (vec_eq(base.gen_e[k], bv)) base_of[i] = k;
    require(base_of[i] >= 0, "VerifyFailed", "generator not matched to the base");
  }
  std::vector<long> nu0(base.gcm.n, -1);
  for (long i = 0; i < L.gcm.n; ++i)
    if (i != node0) nu0[base_of[i]] = base_of[perm[i]];
  require(is_perm(nu0), "VerifyFailed", "induced base permutation is not total");
  Mat g = diagram_automorphism_matrix(base, nu0);
  auto mm = loop_transport(L, g, false, CycNum(1));
  require(mm.has_value(), "VerifyFailed", "degree-preserving transport failed");
  Mat m = *mm;
  auto rc = affine_root_coords(L);
  std::vector<CycNum> chi(L.gcm.n, CycNum(1));
  bool need = false;
  for (long i = 0; i < L.gcm.n; ++i) {
    auto s = proportionality(m.apply(L.gen_e[i]), L.gen_e[perm[i]]);
    require(s.has_value() && !s->is_zero(), "VerifyFailed",
            "node image is not proportional to its target");
    chi[perm[i]] = s->inverse();
    if (*s != CycNum(1)) need = true;
  }
  if (need) m = root_character(L, rc, chi) * m;
  for (long i = 0; i < L.gcm.n; ++i) {
    require(vec_eq(m.apply(L.gen_e[i]), L.gen_e[perm[i]]) &&
                vec_eq(m.apply(L.gen_f[i]), L.gen_f[perm[i]]) &&
                vec_eq(m.apply(L.gen_h[i]), L.gen_h[perm[i]]),
            "VerifyFailed", "node permutation does not pin the generators");
  }
  verify_model_auto(L, m, "node permutation");
  return m;
}

Mat exp_ad(const LieAlgebra& L, const CycVec& x) {
  long dim = L.dim;
  Mat m = Mat::identity(dim);
  std::vector<CycVec> cur(dim);
  for (long j = 0; j < dim; ++j) cur[j] = unit_vec(dim, j);
  long kmax = 2 * dim + 4;
  for (long k = 1; k <= kmax; ++k) {
    bool all_zero = true;
    CycNum inv_k(rat(1, k));
    for (long j = 0; j < dim; ++j) {
      cur[j] = vec_scaled(L.bracket(x, cur[j]), inv_k);
      if (vec_is_zero(cur[j])) continue;
      all_zero = false;
      for (long i = 0; i < dim; ++i) m.at(i, j) += cur[j][i];
    }
    if (all_zero) return m;
  }
  fail("NonNilpotent", "exponential does not terminate");
}

Mat elementary_matrix(const LieAlgebra& L, const GenElementary& g) {
  long n = L.gcm.n;
  require((long)g.root.size() == n, "InvalidWord", "elementary generator: root length");
  if (L.type == KacType::Finite) {
    std::vector<long> pos = g.root, negr = g.root;
    for (auto& v : negr) v = -v;
    if (!L.pos_of.count(pos) && !L.pos_of.count(negr))
      fail("NonNilpotent", "elementary generator: not a real root");
    long idx = L.root_index(g.root);
    Mat m = exp_ad(L, vec_scaled(unit_vec(L.dim, idx), g.coeff));
    verify_model_auto(L, m, "elementary");
    return m;
  }
  Rat q = root_inner(L.gcm, g.root, g.root);
  if (q == 0) fail("NonNilpotent", "elementary generator: isotropic root");
  auto rc = affine_root_coords(L);
  long hit = -1, hits = 0;
  for (long idx = 0; idx < L.dim; ++idx) {
    if (idx == L.c_index || idx == L.d_index) continue;
    if (rc.coords[idx] == g.root) {
      hit = idx;
      ++hits;
    }
  }
  if (hits != 1) fail("NonNilpotent", "elementary generator: not a real root of the model");
  Mat m = exp_ad(L, vec_scaled(unit_vec(L.dim, hit), g.coeff));
  verify_model_auto(L, m, "elementary");
  return m;
}

Mat gen_matrix(const AutGen& g, const LieAlgebra& L) {
  if (auto* p = std::get_if<GenDiagram>(&g)) {
    validate_diagram(L.gcm, p->perm);
    if (L.type == KacType::Finite) {
      Mat m = diagram_automorphism_matrix(L, p->perm);
      verify_model_auto(L, m, "node permutation");
      return m;
    }
    return diagram_matrix_affine(L, p->perm);
  }
  if (std::get_if<GenOmega>(&g)) {
    if (L.type == KacType::Finite) {
      Mat m = chevalley_involution_matrix(L);
      verify_model_auto(L, m, "involution");
      return m;
    }
    return omega_matrix_affine(L);
  }
  if (auto* p = std::get_if<GenAdR>(&g)) {
    Mat m = adr_matrix(L, *p);
    verify_model_auto(L, m, "diagonal");
    return m;
  }
  return elementary_matrix(L, std::get<GenElementary>(g));
}

// ----- symbolic generator values -----

MonomialAut monomial_gen(const AutGen& g, const LieAlgebra& L) {
  long n = L.gcm.n;
  bool affine = (L.type == KacType::Affine);
  long hdim = n + (affine ? 1 : 0);
  MonomialAut a;
  a.n = n;
  a.perm = perm_identity(n);
  a.escale.assign(n, CycNum(1));
  a.fscale.assign(n, CycNum(1));
  a.hmat = Mat::identity(hdim);
  if (auto* p = std::get_if<GenDiagram>(&g)) {
    validate_diagram(L.gcm, p->perm);
    a.perm = p->perm;
    a.hmat = Mat(hdim, hdim);
    for (long k = 0; k < n; ++k) a.hmat.at(p->perm[k], k) = CycNum(1);
    if (affine) {
      a.hmat.at(n, n) = CycNum(1);
      // image of d: unique finite-order solution of the pinning relations
      auto pinv = perm_inverse(p->perm);
      Mat at(n, n);
      for (long j = 0; j < n; ++j)
        for (long k = 0; k < n; ++k) at.at(j, k) = CycNum(rat(L.gcm.a[k][j]));
      CycVec rhs(n);
      for (long j = 0; j < n; ++j)
        rhs[j] = CycNum(rat(L.gen_deg[pinv[j]] - L.gen_deg[j]));
      auto x0 = solve(at, rhs);
      require(x0.has_value(), "VerifyFailed", "no pinned image for the derivation");
      auto ns = nullspace(at);
      require(ns.size() == 1, "VerifyFailed", "affine radical is not a line");
      CycVec cc = ns[0];
      long N = perm_order(p->perm);
      CycVec x = *x0, acc(n), y = *x0;
      for (long k = 0; k < N; ++k) {
        acc = vec_add(acc, y);
        CycVec z(n);
        for (long i = 0; i < n; ++i) z[p->perm[i]] = y[i];
        y = z;
      }
      long j0 = -1;
      for (long j = 0; j < n; ++j)
        if (!cc[j].is_zero()) {
          j0 = j;
          break;
        }
      CycNum w = acc[j0] / cc[j0];
      require(vec_eq(acc, vec_scaled(cc, w)), "VerifyFailed",
              "derivation drift is not central");
      x = vec_sub(x, vec_scaled(cc, w * CycNum(rat(1, N))));
      for (long j = 0; j < n; ++j) a.hmat.at(j, n) = x[j];
    }
    return a;
  }
  if (std::get_if<GenOmega>(&g)) {
    a.swap_ef = true;
    for (long i = 0; i < n; ++i) a.escale[i] = a.fscale[i] = CycNum(-1);
    a.hmat = Mat::identity(hdim).scaled(CycNum(-1));
    return a;
  }
  if (auto* p = std::get_if<GenAdR>(&g)) {
    require((long)p->exps.size() == n, "InvalidWord", "diagonal generator: exponent count");
    require(p->modulus >= 1, "InvalidWord", "diagonal generator: modulus");
    for (long i = 0; i < n; ++i) {
      a.escale[i] = CycNum::zeta_pow(p->modulus, zmod(p->exps[i], p->modulus));
      a.fscale[i] = CycNum::zeta_pow(p->modulus, zmod(-p->exps[i], p->modulus));
    }
    return a;
  }
  fail("NotGradingCompatible", "elementary factors have no symbolic form");
}

}  // namespace

// ----- words -----

AutWord word_concat(const AutWord& a, const AutWord& b) {
  AutWord w = a;
  w.gens.insert(w.gens.end(), b.gens.begin(), b.gens.end());
  return w;
}

AutWord word_inverse(const AutWord& w) {
  AutWord out;
  for (auto it = w.gens.rbegin(); it != w.gens.rend(); ++it) {
    if (auto* p = std::get_if<GenDiagram>(&*it)) {
      out.gens.push_back(GenDiagram{perm_inverse(p->perm)});
    } else if (std::get_if<GenOmega>(&*it)) {
      out.gens.push_back(GenOmega{});
    } else if (auto* q = std::get_if<GenAdR>(&*it)) {
      GenAdR g = *q;
      for (auto& e : g.exps) e = -e;
      out.gens.push_back(g);
    } else {
      GenElementary g = std::get<GenElementary>(*it);
      g.coeff = -g.coeff;
      out.gens.push_back(g);
    }
  }
  return out;
}

AutWord word_power(const AutWord& w, long k) {
  if (k < 0) return word_power(word_inverse(w), -k);
  AutWord out;
  for (long i = 0; i < k; ++i) out = word_concat(out, w);
  return out;
}

bool word_grading_compatible(const AutWord& w) {
  for (auto& g : w.gens)
    if (std::get_if<GenElementary>(&g)) return false;
  return true;
}

// ----- permutations -----

std::vector<long> perm_identity(long n) {
  std::vector<long> p(n);
  for (long i = 0; i < n; ++i) p[i] = i;
  return p;
}

std::vector<long> perm_compose(const std::vector<long>& a, const std::vector<long>& b) {
  std::vector<long> p(b.size());
  for (size_t i = 0; i < b.size(); ++i) p[i] = a[b[i]];
  return p;
}

std::vector<long> perm_inverse(const std::vector<long>& p) {
  std::vector<long> q(p.size());
  for (size_t i = 0; i < p.size(); ++i) q[p[i]] = (long)i;
  return q;
}

long perm_order(const std::vector<long>& p) {
  long ord = 1;
  std::vector<char> seen(p.size(), 0);
  for (size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    long len = 0, j = (long)i;
    while (!seen[j]) {
      seen[j] = 1;
      j = p[j];
      ++len;
    }
    ord = lcm_long(ord, len);
  }
  return ord;
}

bool is_gcm_automorphism(const GCM& g, const std::vector<long>& perm) {
  if ((long)perm.size() != g.n || !is_perm(perm)) return false;
  for (long i = 0; i < g.n; ++i)
    for (long j = 0; j < g.n; ++j)
      if (g.a[perm[i]][perm[j]] != g.a[i][j]) return false;
  return true;
}

std::vector<std::vector<long>> diagram_automorphism_group(const GCM& g) {
  long n = g.n;
  // per-node signature: multiset of incident entry pairs
  std::vector<std::vector<std::pair<long, long>>> sig(n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j)
      if (j != i) sig[i].push_back({g.a[i][j], g.a[j][i]});
    std::sort(sig[i].begin(), sig[i].end());
  }
  std::vector<std::vector<long>> out;
  std::vector<long> p(n, -1);
  std::vector<char> used(n, 0);
  auto rec = [&](auto&& self, long pos) -> void {
    if (pos == n) {
      out.push_back(p);
      return;
    }
    for (long v = 0; v < n; ++v) {
      if (used[v] || sig[v] != sig[pos]) continue;
      bool ok = true;
      for (long j = 0; j < pos && ok; ++j)
        if (g.a[v][p[j]] != g.a[pos][j] || g.a[p[j]][v] != g.a[j][pos]) ok = false;
      if (!ok) continue;
      p[pos] = v;
      used[v] = 1;
      self(self, pos + 1);
      used[v] = 0;
      p[pos] = -1;
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<long> omega_outer_perm(const GCM& g) {
  auto cls = classify(g);
  require(cls.type == KacType::Finite && !cls.label.empty(), "WrongType",
          "finite catalog type required");
  char fam = cls.label[0];
  long n = std::stol(cls.label.substr(1));
  std::vector<long> t = perm_identity(n);
  if (fam == 'A' && n >= 2) {
    for (long i = 0; i < n; ++i) t[i] = n - 1 - i;
  } else if (fam == 'D' && n % 2 == 1) {
    std::swap(t[n - 2], t[n - 1]);
  } else if (fam == 'E' && n == 6) {
    t = {5, 1, 4, 3, 2, 0};
  }
  auto cat = finite_matrix_for(cls.label);
  require(cat.has_value(), "WrongType", "label outside the catalog");
  auto p = find_iso_perm(*cat, g.a);
  require(p.has_value(), "WrongType", "catalog match failed");
  std::vector<long> res(n);
  for (long i = 0; i < n; ++i) res[(*p)[i]] = (*p)[t[i]];
  require(is_gcm_automorphism(g, res), "VerifyFailed", "folded class is not an automorphism");
  require(perm_compose(res, res) == perm_identity(n), "VerifyFailed",
          "folded class is not an involution");
  return res;
}

// ----- outer group -----

OutElement OutGroup::identity() const { return {false, perm_identity(gcm.n)}; }

OutElement OutGroup::normalize(bool omega_flag, const std::vector<long>& perm) const {
  if (finite_type && omega_flag) return {false, perm_compose(omega_perm, perm)};
  return {omega_flag, perm};
}

OutElement OutGroup::mul(const OutElement& a, const OutElement& b) const {
  return normalize(a.omega_flag != b.omega_flag, perm_compose(a.perm, b.perm));
}

OutElement OutGroup::inv(const OutElement& a) const {
  return normalize(a.omega_flag, perm_inverse(a.perm));
}

std::optional<OutElement> OutGroup::conjugator(const OutElement& a,
                                               const OutElement& b) const {
  for (auto& g : elements)
    if (mul(mul(g, a), inv(g)) == b) return g;
  return std::nullopt;
}

bool OutGroup::contains(const OutElement& a) const {
  return std::find(elements.begin(), elements.end(), a) != elements.end();
}

OutGroup out_group(const GCM& g) {
  OutGroup G;
  G.gcm = g;
  auto cls = classify(g);
  G.finite_type = (cls.type == KacType::Finite);
  G.diagram_autos = diagram_automorphism_group(g);
  if (G.finite_type) G.omega_perm = omega_outer_perm(g);
  if (G.finite_type) {
    for (auto& p : G.diagram_autos) G.elements.push_back({false, p});
  } else {
    for (auto& p : G.diagram_autos) G.elements.push_back({false, p});
    for (auto& p : G.diagram_autos) G.elements.push_back({true, p});
  }
  return G;
}

OutElement outer_class(const AutWord& w, const OutGroup& G) {
  OutElement acc = G.identity();
  for (auto& g : w.gens) {
    OutElement cls = G.identity();
    if (auto* p = std::get_if<GenDiagram>(&g)) {
      validate_diagram(G.gcm, p->perm);
      cls = G.normalize(false, p->perm);
    } else if (std::get_if<GenOmega>(&g)) {
      cls = G.normalize(true, perm_identity(G.gcm.n));
    }
    acc = G.mul(acc, cls);
  }
  return acc;
}

bool conjugate_up_to_inverse(const OutElement& mu1, const OutElement& mu2,
                             const OutGroup& G) {
  if (G.conjugator(mu1, mu2).has_value()) return true;
  return G.conjugator(mu1, G.inv(mu2)).has_value();
}

// ----- symbolic evaluation -----

bool MonomialAut::is_identity() const {
  if (swap_ef || perm != perm_identity(n)) return false;
  for (long i = 0; i < n; ++i)
    if (escale[i] != CycNum(1) || fscale[i] != CycNum(1)) return false;
  return hmat == Mat::identity(hmat.rows());
}

bool MonomialAut::operator==(const MonomialAut& o) const {
  if (n != o.n || swap_ef != o.swap_ef || perm != o.perm) return false;
  for (long i = 0; i < n; ++i)
    if (escale[i] != o.escale[i] || fscale[i] != o.fscale[i]) return false;
  return hmat == o.hmat;
}

MonomialAut monomial_identity(const LieAlgebra& L) {
  MonomialAut a;
  a.n = L.gcm.n;
  a.perm = perm_identity(a.n);
  a.escale.assign(a.n, CycNum(1));
  a.fscale.assign(a.n, CycNum(1));
  a.hmat = Mat::identity(a.n + (L.type == KacType::Affine ? 1 : 0));
  return a;
}

MonomialAut monomial_compose(const MonomialAut& a, const MonomialAut& b) {
  require(a.n == b.n && a.hmat.rows() == b.hmat.rows(), "BadInput",
          "composing maps of different shapes");
  MonomialAut c;
  c.n = a.n;
  c.swap_ef = a.swap_ef != b.swap_ef;
  c.perm = perm_compose(a.perm, b.perm);
  c.escale.resize(c.n);
  c.fscale.resize(c.n);
  for (long i = 0; i < c.n; ++i) {
    c.escale[i] = b.escale[i] * (b.swap_ef ? a.fscale : a.escale)[b.perm[i]];
    c.fscale[i] = b.fscale[i] * (b.swap_ef ? a.escale : a.fscale)[b.perm[i]];
  }
  c.hmat = a.hmat * b.hmat;
  return c;
}

MonomialAut monomial_eval(const AutWord& w, const LieAlgebra& L) {
  MonomialAut acc = monomial_identity(L);
  for (auto& g : w.gens) acc = monomial_compose(acc, monomial_gen(g, L));
  return acc;
}

long monomial_period(const MonomialAut& a, long max_m) {
  MonomialAut acc = a;
  for (long k = 1; k <= max_m; ++k) {
    if (acc.is_identity()) return k;
    acc = monomial_compose(acc, a);
  }
  fail("PeriodExceeded", "no period up to the requested bound");
}

IMat root_lattice_matrix(const MonomialAut& a) {
  IMat r(a.n, std::vector<long>(a.n, 0));
  for (long i = 0; i < a.n; ++i) r[a.perm[i]][i] = a.swap_ef ? -1 : 1;
  return r;
}

// ----- matrix evaluation -----

AutMatrix eval_word(const AutWord& w, const LiePtr& L) {
  require(L != nullptr, "BadInput", "null algebra");
  require(!L->is_sum, "WrongType", "word evaluation needs a single catalog model");
  require(L->type != KacType::Indefinite, "WrongType",
          "finite or affine model required");
  Mat acc = Mat::identity(L->dim);
  for (auto& g : w.gens) acc = acc * gen_matrix(g, *L);
  return {acc, 0};
}

long period(const Mat& m, long max_m) {
  require(m.rows() == m.cols(), "BadInput", "square matrix required");
  Mat id = Mat::identity(m.rows());
  Mat acc = m;
  for (long k = 1; k <= max_m; ++k) {
    if (acc == id) return k;
    acc = acc * m;
  }
  fail("PeriodExceeded", "no period up to the requested bound");
}

std::vector<std::pair<long, std::vector<CycVec>>> eigenspaces(const Mat& m, long mod) {
  require(m.rows() == m.cols(), "BadInput", "square matrix required");
  require(mod >= 1, "BadInput", "positive modulus required");
  Mat id = Mat::identity(m.rows());
  std::vector<std::pair<long, std::vector<CycVec>>> out;
  long total = 0;
  for (long i = 0; i < mod; ++i) {
    auto ns = nullspace(m - id.scaled(CycNum::zeta_pow(mod, i)));
    total += (long)ns.size();
    if (!ns.empty()) out.push_back({i, ns});
  }
  require(total == m.rows(), "NotPeriod",
          "matrix is not diagonalizable by the requested roots of unity");
  return out;
}

Mat derivation_shift(const LieAlgebra& L, const CycNum& mu) {
  require(L.type == KacType::Affine && L.d_index >= 0 && L.c_index >= 0, "WrongType",
          "loop model with central element and derivation required");
  Mat m = Mat::identity(L.dim);
  m.at(L.c_index, L.d_index) = mu;
  return m;
}

bool is_bracket_automorphism(const LieAlgebra& L, const Mat& m) {
  if (m.rows() != L.dim || m.cols() != L.dim) return false;
  if (!inverse(m).has_value()) return false;
  return hom_on_basis(L, m);
}

}  // namespace loopiso
