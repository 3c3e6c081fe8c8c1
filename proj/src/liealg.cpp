#include "loopiso/liealg.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include "loopiso/errors.hpp"

namespace loopiso {

CycVec sparse_to_dense(const Sparse& s, long dim) {
  CycVec v(dim);
  for (auto& [k, c] : s) v[k] = c;
  return v;
}

Sparse dense_to_sparse(const CycVec& v) {
  Sparse s;
  for (long i = 0; i < (long)v.size(); ++i)
    if (!v[i].is_zero()) s.push_back({i, v[i]});
  return s;
}

namespace {

long mod_pos(long a, long m) { return ((a % m) + m) % m; }

std::vector<long> negated(const std::vector<long>& r) {
  std::vector<long> q(r.size());
  for (size_t i = 0; i < r.size(); ++i) q[i] = -r[i];
  return q;
}

std::vector<long> added(const std::vector<long>& a, const std::vector<long>& b) {
  std::vector<long> q(a.size());
  for (size_t i = 0; i < a.size(); ++i) q[i] = a[i] + b[i];
  return q;
}

bool coords_positive(const std::vector<long>& r) {
  for (long k : r)
    if (k != 0) return k > 0;
  return false;
}

std::string coords_str(const std::vector<long>& r) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < r.size(); ++i) {
    if (i) os << ",";
    os << r[i];
  }
  os << "]";
  return os.str();
}

Sparse sparse_negated(const Sparse& s) {
  Sparse out = s;
  for (auto& [k, c] : out) c = -c;
  return out;
}

CycNum dot(const CycVec& a, const CycVec& b) {
  CycNum acc;
  for (size_t i = 0; i < a.size(); ++i)
    if (!a[i].is_zero() && !b[i].is_zero()) acc += a[i] * b[i];
  return acc;
}

CycNum biform(const CycVec& v, const Mat& g, const CycVec& w) {
  return dot(v, g.apply(w));
}

CycVec unit_vec(long dim, long k) {
  CycVec v(dim);
  v[k] = CycNum(1L);
  return v;
}

// w == mu * v for a nonzero v; zero w gives 0
CycNum proportion_of(const CycVec& w, const CycVec& v, const char* who) {
  long k = -1;
  for (long i = 0; i < (long)v.size(); ++i)
    if (!v[i].is_zero()) {
      k = i;
      break;
    }
  require(k >= 0, "InternalError", std::string(who) + ": zero reference vector");
  CycNum mu = w[k] / v[k];
  CycVec check = vec_sub(w, vec_scaled(v, mu));
  require(vec_is_zero(check), "InternalError",
          std::string(who) + ": vector not proportional");
  return mu;
}

// ----- Chevalley structure constants -----

struct RootCtx {
  const GCM& g;
  const std::vector<std::vector<long>>& pos;
  const std::map<std::vector<long>, long>& idx;
  std::map<std::pair<long, long>, Rat> memo;

  bool is_root(const std::vector<long>& r) const {
    if (coords_positive(r)) return idx.count(r) > 0;
    return idx.count(negated(r)) > 0;
  }

  long posn(const std::vector<long>& r) const { return idx.at(r); }

  // extraspecial pair of a positive root of height >= 2, by position order
  std::pair<long, long> extraspecial(const std::vector<long>& eps) const {
    for (long c = 0; c < (long)pos.size(); ++c) {
      std::vector<long> delta(eps.size());
      bool ok = true;
      for (size_t t = 0; t < eps.size(); ++t) {
        delta[t] = eps[t] - pos[c][t];
        if (delta[t] < 0) ok = false;
      }
      if (!ok || !coords_positive(delta)) continue;
      auto it = idx.find(delta);
      if (it == idx.end()) continue;
      if (it->second > c) return {c, it->second};
    }
    fail("InternalError", "no special pair for " + coords_str(eps));
  }

  long down_length(const std::vector<long>& alpha,
                   const std::vector<long>& beta) const {
    long p = 0;
    std::vector<long> cur = beta;
    for (;;) {
      for (size_t t = 0; t < cur.size(); ++t) cur[t] -= alpha[t];
      if (!is_root(cur)) break;
      ++p;
    }
    return p;
  }

  Rat npos(long pa, long pb) {
    auto key = std::make_pair(pa, pb);
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;
    const auto& alpha = pos[pa];
    const auto& beta = pos[pb];
    auto eps = added(alpha, beta);
    auto [pg, pd] = extraspecial(eps);
    Rat val;
    if (pg == pa && pd == pb) {
      val = Rat(down_length(alpha, beta) + 1);
    } else {
      const auto& gamma = pos[pg];
      const auto& delta = pos[pd];
      Rat t1(0), t2(0);
      auto d1 = added(delta, negated(alpha));  // = beta - gamma
      if (is_root(d1))
        t1 = nconst(delta, negated(alpha)) * nconst(gamma, negated(beta)) /
             root_inner(g, d1, d1);
      auto d2 = added(gamma, negated(alpha));
      if (is_root(d2))
        t2 = nconst(negated(alpha), gamma) * nconst(delta, negated(beta)) /
             root_inner(g, d2, d2);
      val = root_inner(g, eps, eps) * (t1 + t2) / npos(pg, pd);
    }
    memo[key] = val;
    return val;
  }

  // signed roots a, b with a+b a root
  Rat nconst(const std::vector<long>& a, const std::vector<long>& b) {
    bool ap = coords_positive(a), bp = coords_positive(b);
    if (ap && bp) {
      long pa = posn(a), pb = posn(b);
      return pa < pb ? npos(pa, pb) : -npos(pb, pa);
    }
    if (!ap && !bp) return -nconst(negated(a), negated(b));
    if (!ap) return -nconst(b, a);
    // a positive, b negative; three roots a + b + (-(a+b)) sum to zero
    auto s = added(a, b);
    if (coords_positive(s)) {
      // N_{a,b}/(s,s) = N_{b,-s}/(a,a)
      return root_inner(g, s, s) * nconst(b, negated(s)) / root_inner(g, a, a);
    }
    // N_{a,b}/(s,s) = N_{-s,a}/(b,b)
    return root_inner(g, s, s) * nconst(negated(s), a) / root_inner(g, b, b);
  }
};

}  // namespace

// ----- basis bookkeeping -----

long LieAlgebra::root_index(const std::vector<long>& alpha) const {
  if (coords_positive(alpha)) {
    auto it = pos_of.find(alpha);
    if (it != pos_of.end()) return gcm.n + 2 * it->second;
  } else {
    auto it = pos_of.find(negated(alpha));
    if (it != pos_of.end()) return gcm.n + 2 * it->second + 1;
  }
  fail("BadInput", "not a root: " + coords_str(alpha));
}

std::vector<long> LieAlgebra::root_of_index(long idx) const {
  long off = idx - gcm.n;
  require(off >= 0 && off < 2 * (long)proots.size(), "BadInput",
          "basis index is not a root vector");
  auto r = proots[off / 2];
  return (off % 2) ? negated(r) : r;
}

bool LieAlgebra::bracket_defined(long i, long j) const {
  if (!base) return true;
  if (i == c_index || j == c_index || i == d_index || j == d_index) return true;
  return std::labs(z_deg[i] + z_deg[j]) <= window;
}

Sparse LieAlgebra::bracket_basis(long i, long j) const {
  if (i == j) return {};
  bool flip = i > j;
  long lo = flip ? j : i, hi = flip ? i : j;
  long key = lo * dim + hi;
  auto hit = table.find(key);
  if (hit == table.end()) {
    if (!base) return {};  // zero brackets are not stored
    // affine model: compute on demand
    Sparse out;
    if (lo == c_index || hi == c_index) {
      // central
    } else if (hi == d_index) {
      long t = z_deg[lo];
      if (t != 0) out.push_back({lo, CycNum(-t)});
    } else {
      long s = z_deg[lo], t = z_deg[hi], u = s + t;
      require(std::labs(u) <= window, "WindowOverflow",
              "bracket degree " + std::to_string(u) + " outside window " +
                  std::to_string(window));
      CycVec vi(base->dim), vj(base->dim);
      for (long r = 0; r < base->dim; ++r) {
        vi[r] = eigen_cols.at(r, eigcol[lo]);
        vj[r] = eigen_cols.at(r, eigcol[hi]);
      }
      CycVec w = base->bracket(vi, vj);
      if (!vec_is_zero(w)) {
        CycVec co = eigen_cols_inv.apply(w);
        long res = mod_pos(u, twist_order);
        for (long col = 0; col < (long)co.size(); ++col) {
          if (co[col].is_zero()) continue;
          auto at = loop_index.find({u, col});
          require(at != loop_index.end() &&
                      std::find(eigen_of_residue[res].begin(),
                                eigen_of_residue[res].end(),
                                col) != eigen_of_residue[res].end(),
                  "InternalError", "bracket escaped its eigencomponent");
          out.push_back({at->second, co[col]});
        }
        std::sort(out.begin(), out.end(),
                  [](auto& x, auto& y) { return x.first < y.first; });
      }
      if (u == 0 && s != 0) {
        CycNum cc = CycNum(s) * biform(vi, norm_form_base, vj);
        if (!cc.is_zero()) out.push_back({c_index, cc});
      }
    }
    hit = table.emplace(key, std::move(out)).first;
  }
  return flip ? sparse_negated(hit->second) : hit->second;
}

CycVec LieAlgebra::bracket(const CycVec& x, const CycVec& y) const {
  require((long)x.size() == dim && (long)y.size() == dim, "BadInput",
          "element size mismatch");
  CycVec out(dim);
  for (long i = 0; i < dim; ++i) {
    if (x[i].is_zero()) continue;
    for (long j = 0; j < dim; ++j) {
      if (y[j].is_zero()) continue;
      for (auto& [k, c] : bracket_basis(i, j)) out[k] += x[i] * y[j] * c;
    }
  }
  return out;
}

// ----- finite construction -----

LiePtr build_finite(const GCM& g) {
  auto cls = classify(g);
  require(cls.type == KacType::Finite, "WrongType",
          "finite type Cartan matrix required");
  auto L = std::make_shared<LieAlgebra>();
  L->gcm = g;
  L->type = cls.type;
  L->label = cls.label;
  L->proots = positive_roots(g);
  for (long k = 0; k < (long)L->proots.size(); ++k) L->pos_of[L->proots[k]] = k;
  long n = g.n, nr = (long)L->proots.size();
  L->dim = n + 2 * nr;

  L->sym.resize(L->dim);
  L->z_deg.assign(L->dim, 0);
  L->eigcol.assign(L->dim, -1);
  L->weight.assign(L->dim, std::vector<long>(n, 0));
  for (long i = 0; i < n; ++i) L->sym[i] = "h" + std::to_string(i + 1);
  for (long k = 0; k < nr; ++k) {
    L->sym[n + 2 * k] = "x" + coords_str(L->proots[k]);
    L->sym[n + 2 * k + 1] = "x" + coords_str(negated(L->proots[k]));
    L->weight[n + 2 * k] = L->proots[k];
    L->weight[n + 2 * k + 1] = negated(L->proots[k]);
  }

  RootCtx ctx{g, L->proots, L->pos_of, {}};

  for (long i = 0; i < L->dim; ++i) {
    for (long j = i + 1; j < L->dim; ++j) {
      Sparse s;
      if (i < n && j < n) continue;
      if (i < n) {
        long val = pair_with_simple_coroot(g, L->weight[j], i);
        if (val != 0) s.push_back({j, CycNum(val)});
      } else {
        auto a = L->root_of_index(i), b = L->root_of_index(j);
        auto sum = added(a, b);
        bool zero = true;
        for (long t : sum)
          if (t != 0) zero = false;
        if (zero) {
          bool apos = coords_positive(a);
          auto co = coroot_coords(g, apos ? a : b);
          for (long l = 0; l < n; ++l)
            if (co[l] != 0) s.push_back({l, CycNum(apos ? co[l] : -co[l])});
        } else if (ctx.is_root(sum)) {
          Rat c = ctx.nconst(a, b);
          if (c != 0) s.push_back({L->root_index(sum), CycNum(c)});
        }
      }
      if (!s.empty()) L->table[i * L->dim + j] = std::move(s);
    }
  }

  L->gen_e.resize(n);
  L->gen_f.resize(n);
  L->gen_h.resize(n);
  L->gen_deg.assign(n, 0);
  L->alpha_fun.resize(n);
  for (long i = 0; i < n; ++i) {
    std::vector<long> simple(n, 0);
    simple[i] = 1;
    L->gen_e[i] = unit_vec(L->dim, L->root_index(simple));
    L->gen_f[i] = unit_vec(L->dim, L->root_index(negated(simple)));
    L->gen_h[i] = unit_vec(L->dim, i);
    L->alpha_fun[i] = CycVec(L->dim);
    for (long j = 0; j < n; ++j) L->alpha_fun[i][j] = CycNum(g.a[j][i]);
  }
  return L;
}

LiePtr build_finite(const std::string& label) {
  auto m = finite_matrix_for(label);
  require(m.has_value(), "BadInput", "unknown catalog label " + label);
  return build_finite(gcm_validate(*m));
}

Rat chevalley_constant(const LieAlgebra& L, const std::vector<long>& a,
                       const std::vector<long>& b) {
  auto sum = added(a, b);
  bool zero = true;
  for (long t : sum)
    if (t != 0) zero = false;
  require(!zero, "BadInput", "opposite roots have a Cartan bracket");
  bool root = coords_positive(sum) ? L.pos_of.count(sum)
                                   : L.pos_of.count(negated(sum));
  if (!root) return Rat(0);
  auto s = L.bracket_basis(L.root_index(a), L.root_index(b));
  long k = L.root_index(sum);
  for (auto& [key, c] : s)
    if (key == k) {
      require(c.is_rational(), "InternalError", "irrational structure constant");
      return c.to_rational();
    }
  return Rat(0);
}

long string_down_length(const LieAlgebra& L, const std::vector<long>& alpha,
                        const std::vector<long>& beta) {
  RootCtx ctx{L.gcm, L.proots, L.pos_of, {}};
  return ctx.down_length(alpha, beta);
}

// ----- automorphism extension from generator images -----

namespace {

Mat extend_from_simple(const LieAlgebra& L, const std::vector<CycVec>& img_h,
                       const std::vector<CycVec>& img_e,
                       const std::vector<CycVec>& img_f) {
  long n = L.gcm.n;
  std::vector<CycVec> img(L.dim);
  for (long i = 0; i < n; ++i) img[i] = img_h[i];
  for (long k = 0; k < (long)L.proots.size(); ++k) {
    if (root_height(L.proots[k]) != 1) break;
    long node = -1;
    for (long t = 0; t < n; ++t)
      if (L.proots[k][t] == 1) node = t;
    img[n + 2 * k] = img_e[node];
    img[n + 2 * k + 1] = img_f[node];
  }
  RootCtx ctx{L.gcm, L.proots, L.pos_of, {}};
  for (long k = 0; k < (long)L.proots.size(); ++k) {
    const auto& eps = L.proots[k];
    if (root_height(eps) < 2) continue;
    auto [pg, pd] = ctx.extraspecial(eps);
    Rat nc = chevalley_constant(L, L.proots[pg], L.proots[pd]);
    require(nc != 0, "InternalError", "vanishing extraspecial constant");
    CycNum inv = CycNum(Rat(1) / nc);
    long ig = L.root_index(L.proots[pg]), id = L.root_index(L.proots[pd]);
    img[n + 2 * k] = vec_scaled(L.bracket(img[ig], img[id]), inv);
    long jg = L.root_index(negated(L.proots[pg]));
    long jd = L.root_index(negated(L.proots[pd]));
    img[n + 2 * k + 1] = vec_scaled(L.bracket(img[jg], img[jd]), -inv);
  }
  Mat m(L.dim, L.dim);
  for (long c = 0; c < L.dim; ++c)
    for (long r = 0; r < L.dim; ++r) m.at(r, c) = img[c][r];
  return m;
}

}  // namespace

Mat diagram_automorphism_matrix(const LieAlgebra& L,
                                const std::vector<long>& perm) {
  long n = L.gcm.n;
  require(!L.base && !L.is_sum && L.type == KacType::Finite, "Unsupported",
          "diagram extension needs a finite model");
  require((long)perm.size() == n, "BadInput", "permutation size mismatch");
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      require(L.gcm.a[perm[i]][perm[j]] == L.gcm.a[i][j], "BadInput",
              "not a Cartan matrix automorphism");
  std::vector<CycVec> ih(n), ie(n), ifv(n);
  for (long i = 0; i < n; ++i) {
    std::vector<long> simple(n, 0);
    simple[perm[i]] = 1;
    ih[i] = unit_vec(L.dim, perm[i]);
    ie[i] = unit_vec(L.dim, L.root_index(simple));
    ifv[i] = unit_vec(L.dim, L.root_index(negated(simple)));
  }
  return extend_from_simple(L, ih, ie, ifv);
}

Mat chevalley_involution_matrix(const LieAlgebra& L) {
  long n = L.gcm.n;
  require(!L.base && !L.is_sum && L.type == KacType::Finite, "Unsupported",
          "involution needs a finite model");
  std::vector<CycVec> ih(n), ie(n), ifv(n);
  CycNum neg(-1L);
  for (long i = 0; i < n; ++i) {
    std::vector<long> simple(n, 0);
    simple[i] = 1;
    ih[i] = vec_scaled(unit_vec(L.dim, i), neg);
    ie[i] = vec_scaled(unit_vec(L.dim, L.root_index(negated(simple))), neg);
    ifv[i] = vec_scaled(unit_vec(L.dim, L.root_index(simple)), neg);
  }
  return extend_from_simple(L, ih, ie, ifv);
}

// ----- affine construction -----

namespace {

struct TwistShape {
  std::string base_label;
  long r = 1;
  std::vector<long> perm;  // on base nodes; empty means identity
};

TwistShape parse_affine_label(const std::string& label) {
  auto cut = label.find("^(");
  require(cut != std::string::npos && label.back() == ')', "InternalError",
          "unparsable affine label " + label);
  TwistShape ts;
  ts.base_label = label.substr(0, cut);
  ts.r = std::stol(label.substr(cut + 2, label.size() - cut - 3));
  if (ts.r == 1) return ts;
  if (ts.base_label == "D3") ts.base_label = "A3";  // D3 = A3
  char family = ts.base_label[0];
  long rank = std::stol(ts.base_label.substr(1));
  if (ts.r == 2 && family == 'A') {
    for (long i = 0; i < rank; ++i) ts.perm.push_back(rank - 1 - i);
  } else if (ts.r == 2 && family == 'D') {
    for (long i = 0; i < rank; ++i) ts.perm.push_back(i);
    std::swap(ts.perm[rank - 2], ts.perm[rank - 1]);
  } else if (ts.r == 2 && ts.base_label == "E6") {
    ts.perm = {5, 1, 4, 3, 2, 0};
  } else if (ts.r == 3 && ts.base_label == "D4") {
    ts.perm = {2, 1, 3, 0};
  } else {
    fail("InternalError", "no twist data for " + label);
  }
  return ts;
}

}  // namespace

LiePtr build_affine(const GCM& g, long window) {
  auto cls = classify(g);
  require(cls.type == KacType::Affine, "WrongType",
          "affine type Cartan matrix required");
  require(!cls.label.empty(), "Unsupported",
          "affine matrix outside the built-in catalog");
  require(window >= 2, "BadInput", "window must be at least 2");

  auto ts = parse_affine_label(cls.label);
  auto bm = finite_matrix_for(ts.base_label);
  require(bm.has_value(), "InternalError", "missing base " + ts.base_label);
  LiePtr base = build_finite(gcm_validate(*bm));
  long bdim = base->dim, bn = base->gcm.n, r = ts.r;

  auto L = std::make_shared<LieAlgebra>();
  L->gcm = g;
  L->type = cls.type;
  L->label = cls.label;
  L->base = base;
  L->twist_order = r;
  L->window = window;
  L->nu = ts.perm.empty() ? Mat::identity(bdim)
                          : diagram_automorphism_matrix(*base, ts.perm);
  require(L->nu.power(r) == Mat::identity(bdim), "InternalError",
          "twist order mismatch");

  std::vector<long> perm(bn);
  for (long i = 0; i < bn; ++i) perm[i] = ts.perm.empty() ? i : ts.perm[i];

  // eigenbasis of the twist, orbit by orbit so every eigenvector is a
  // weight vector for the fixed Cartan subalgebra
  std::vector<CycVec> cols;
  std::vector<long> col_res;
  std::vector<bool> col_cartan;
  std::vector<std::vector<long>> col_weight;

  std::vector<bool> seen(bn, false);
  for (long start = 0; start < bn; ++start) {
    if (seen[start]) continue;
    std::vector<long> orb;
    long cur = start;
    do {
      orb.push_back(cur);
      seen[cur] = true;
      cur = perm[cur];
    } while (cur != start);
    long s = (long)orb.size();
    require(r % s == 0, "InternalError", "node orbit size does not divide r");
    for (long j = 0; j < s; ++j) {
      CycVec v(bdim);
      for (long i = 0; i < s; ++i)
        v[orb[i]] = CycNum::zeta_pow(s, mod_pos(-j * i, s));
      cols.push_back(v);
      col_res.push_back(j * (r / s));
      col_cartan.push_back(true);
      col_weight.push_back(std::vector<long>(bn, 0));
    }
  }

  auto act_on_root = [&](const std::vector<long>& rt) {
    std::vector<long> q(bn, 0);
    for (long l = 0; l < bn; ++l) q[perm[l]] = rt[l];
    return q;
  };
  std::set<long> used;
  long nroots = (long)base->proots.size();
  for (long sgn = 0; sgn < 2; ++sgn) {
    for (long k = 0; k < nroots; ++k) {
      long idx0 = bn + 2 * k + sgn;
      if (used.count(idx0)) continue;
      std::vector<long> orbit_idx;
      auto rt = base->root_of_index(idx0);
      auto cur = rt;
      do {
        long id = base->root_index(cur);
        orbit_idx.push_back(id);
        used.insert(id);
        cur = act_on_root(cur);
      } while (base->root_index(cur) != idx0);
      long s = (long)orbit_idx.size();
      Mat block(s, s);
      for (long q = 0; q < s; ++q)
        for (long p = 0; p < s; ++p)
          block.at(p, q) = L->nu.at(orbit_idx[p], orbit_idx[q]);
      long found = 0;
      for (long t = 0; t < r && found < s; ++t) {
        Mat m = block - Mat::identity(s).scaled(CycNum::zeta_pow(r, t));
        for (auto& w : nullspace(m)) {
          CycVec v(bdim);
          for (long q = 0; q < s; ++q) v[orbit_idx[q]] = w[q];
          cols.push_back(v);
          col_res.push_back(t);
          col_cartan.push_back(false);
          col_weight.push_back(rt);
          ++found;
        }
      }
      require(found == s, "InternalError", "twist not diagonalizable on orbit");
    }
  }
  require((long)cols.size() == bdim, "InternalError", "eigenbasis incomplete");

  L->eigen_cols = Mat(bdim, bdim);
  for (long c = 0; c < bdim; ++c)
    for (long rw = 0; rw < bdim; ++rw) L->eigen_cols.at(rw, c) = cols[c][rw];
  auto inv = inverse(L->eigen_cols);
  require(inv.has_value(), "InternalError", "eigenbasis not invertible");
  L->eigen_cols_inv = *inv;
  L->eigen_of_residue.assign(r, {});
  for (long c = 0; c < bdim; ++c) L->eigen_of_residue[col_res[c]].push_back(c);

  // invariant form on the base normalized to squared length 2 for long roots
  {
    Mat f = invariant_form(*base);
    auto theta = highest_root(base->gcm);
    Rat scale = Rat(2) / root_inner(base->gcm, theta, theta);
    L->norm_form_base = f.scaled(CycNum(scale));
  }

  // model basis: loop part by degree, then c, then d
  long idx = 0;
  for (long t = -window; t <= window; ++t) {
    long res = mod_pos(t, r);
    for (long c : L->eigen_of_residue[res]) {
      L->sym.push_back("u" + std::to_string(c) + "@" + std::to_string(t));
      L->z_deg.push_back(t);
      L->eigcol.push_back(c);
      L->weight.push_back(col_weight[c]);
      L->loop_index[{t, c}] = idx++;
    }
  }
  L->c_index = idx++;
  L->d_index = idx++;
  L->sym.push_back("c");
  L->sym.push_back("d");
  L->z_deg.push_back(0);
  L->z_deg.push_back(0);
  L->eigcol.push_back(-1);
  L->eigcol.push_back(-1);
  L->weight.push_back(std::vector<long>(bn, 0));
  L->weight.push_back(std::vector<long>(bn, 0));
  L->dim = idx;

  auto lift = [&](const CycVec& bv, long t) {
    CycVec out(L->dim);
    CycVec co = L->eigen_cols_inv.apply(bv);
    long res = mod_pos(t, r);
    for (long c = 0; c < bdim; ++c) {
      if (co[c].is_zero()) continue;
      require(col_res[c] == res, "InternalError",
              "vector not in the expected eigencomponent");
      out[L->loop_index.at({t, c})] = co[c];
    }
    return out;
  };

  // node orbits give the degree-zero generators
  std::vector<std::vector<long>> orbits;
  {
    std::vector<bool> vis(bn, false);
    for (long i = 0; i < bn; ++i) {
      if (vis[i]) continue;
      std::vector<long> orb;
      long cur = i;
      do {
        orb.push_back(cur);
        vis[cur] = true;
        cur = perm[cur];
      } while (cur != i);
      orbits.push_back(orb);
    }
  }
  require((long)orbits.size() + 1 == g.n, "InternalError",
          "orbit count does not match affine rank");

  std::vector<CycVec> oe, of;  // base coordinates, degree 0
  for (auto& orb : orbits) {
    CycVec e(bdim), f(bdim);
    long val = 0;
    for (long k : orb) {
      std::vector<long> simple(bn, 0);
      simple[k] = 1;
      e[base->root_index(simple)] = CycNum(1L);
      f[base->root_index(negated(simple))] = CycNum(1L);
      val += base->gcm.a[k][orb[0]];
    }
    require(val > 0, "InternalError", "orbit pairing not positive");
    oe.push_back(e);
    of.push_back(vec_scaled(f, CycNum(rat(2, val))));
  }

  // lowest weight vector of the degree +1 component under the fixed part
  auto solve_extreme = [&](long res, const std::vector<CycVec>& killers) {
    const auto& cset = L->eigen_of_residue[res];
    require(!cset.empty(), "InternalError", "empty eigencomponent");
    Mat m((long)killers.size() * bdim, (long)cset.size());
    for (long kq = 0; kq < (long)killers.size(); ++kq) {
      for (long cq = 0; cq < (long)cset.size(); ++cq) {
        CycVec w = base->bracket(killers[kq], cols[cset[cq]]);
        for (long rw = 0; rw < bdim; ++rw) m.at(kq * bdim + rw, cq) = w[rw];
      }
    }
    auto nl = nullspace(m);
    require(nl.size() == 1, "InternalError",
            "extreme vector space has dimension " + std::to_string(nl.size()));
    CycVec v(bdim);
    for (long cq = 0; cq < (long)cset.size(); ++cq)
      v = vec_add(v, vec_scaled(cols[cset[cq]], nl[0][cq]));
    return v;
  };

  CycVec e0b = solve_extreme(mod_pos(1, r), of);
  CycVec f0b = solve_extreme(mod_pos(-1, r), oe);
  CycVec hb = base->bracket(e0b, f0b);
  CycNum mu = proportion_of(base->bracket(hb, e0b), e0b, "affine seed");
  require(!mu.is_zero(), "InternalError", "degenerate seed pairing");
  f0b = vec_scaled(f0b, CycNum(2L) / mu);

  std::vector<CycVec> cand_e, cand_f;
  std::vector<long> cand_deg;
  cand_e.push_back(lift(e0b, 1));
  cand_f.push_back(lift(f0b, -1));
  cand_deg.push_back(1);
  for (size_t q = 0; q < orbits.size(); ++q) {
    cand_e.push_back(lift(oe[q], 0));
    cand_f.push_back(lift(of[q], 0));
    cand_deg.push_back(0);
  }

  auto weight_on = [&](const CycVec& h, const CycVec& e) {
    CycVec w = L->bracket(h, e);
    if (vec_is_zero(w)) return CycNum();
    return proportion_of(w, e, "affine weight");
  };

  IMat computed(g.n, std::vector<long>(g.n, 0));
  std::vector<CycVec> cand_h;
  for (long i = 0; i < g.n; ++i)
    cand_h.push_back(L->bracket(cand_e[i], cand_f[i]));
  for (long i = 0; i < g.n; ++i) {
    for (long j = 0; j < g.n; ++j) {
      CycNum v = weight_on(cand_h[i], cand_e[j]);
      require(v.is_rational(), "InternalError", "pairing not rational");
      Rat rv = v.to_rational();
      require(rv.get_den() == 1, "InternalError", "pairing not integral");
      computed[i][j] = rv.get_num().get_si();
    }
  }
  auto match = find_iso_perm(computed, g.a);
  require(match.has_value(), "InternalError",
          "constructed generators do not satisfy the input Cartan matrix");

  L->gen_e.resize(g.n);
  L->gen_f.resize(g.n);
  L->gen_h.resize(g.n);
  L->gen_deg.assign(g.n, 0);
  for (long i = 0; i < g.n; ++i) {
    long to = (*match)[i];
    L->gen_e[to] = cand_e[i];
    L->gen_f[to] = cand_f[i];
    L->gen_h[to] = cand_h[i];
    L->gen_deg[to] = cand_deg[i];
  }

  // the degree +1 coroot must leave the plain loop span through c
  {
    long node = -1;
    for (long i = 0; i < g.n; ++i)
      if (L->gen_deg[i] == 1) node = i;
    require(node >= 0, "InternalError", "no degree one generator");
    require(!L->gen_h[node][L->c_index].is_zero(), "InternalError",
            "affine coroot has no central part");
  }

  // simple roots as functionals on h = (fixed Cartan at degree 0) + c + d
  L->alpha_fun.assign(g.n, CycVec(L->dim));
  for (long b = 0; b < L->dim; ++b) {
    if (b == L->c_index) continue;
    bool in_h = (b == L->d_index) ||
                (L->z_deg[b] == 0 && L->eigcol[b] >= 0 && col_cartan[L->eigcol[b]]);
    if (!in_h) continue;
    CycVec hb1 = unit_vec(L->dim, b);
    for (long i = 0; i < g.n; ++i)
      L->alpha_fun[i][b] = weight_on(hb1, L->gen_e[i]);
  }

  // full Cartan matrix verification against the input
  for (long i = 0; i < g.n; ++i)
    for (long j = 0; j < g.n; ++j)
      require(dot(L->alpha_fun[j], L->gen_h[i]) == CycNum(g.a[i][j]),
              "InternalError", "Cartan pairing check failed");

  // Serre relations, when the window leaves room for them
  long worst = 0;
  for (long i = 0; i < g.n; ++i)
    for (long j = 0; j < g.n; ++j)
      if (i != j) worst = std::max(worst, 2 + (1 - g.a[i][j]));
  if (window >= worst) {
    for (long i = 0; i < g.n; ++i) {
      for (long j = 0; j < g.n; ++j) {
        if (i == j) continue;
        CycVec x = L->gen_e[j], y = L->gen_f[j];
        for (long k = 0; k < 1 - g.a[i][j]; ++k) {
          x = L->bracket(L->gen_e[i], x);
          y = L->bracket(L->gen_f[i], y);
        }
        require(vec_is_zero(x) && vec_is_zero(y), "InternalError",
                "Serre relation failed");
      }
    }
  }
  return L;
}

// ----- direct sums -----

LiePtr direct_sum(const LiePtr& a, const LiePtr& b) {
  require(!a->base && !b->base, "Unsupported",
          "direct sums need table-backed models");
  auto L = std::make_shared<LieAlgebra>();
  L->type = KacType::Finite;
  L->is_sum = true;
  L->label = a->label + "+" + b->label;
  long na = a->gcm.n, nb = b->gcm.n;
  L->gcm.n = na + nb;
  L->gcm.a.assign(na + nb, std::vector<long>(na + nb, 0));
  for (long i = 0; i < na; ++i)
    for (long j = 0; j < na; ++j) L->gcm.a[i][j] = a->gcm.a[i][j];
  for (long i = 0; i < nb; ++i)
    for (long j = 0; j < nb; ++j) L->gcm.a[na + i][na + j] = b->gcm.a[i][j];
  L->gcm.eps = a->gcm.eps;
  L->gcm.eps.insert(L->gcm.eps.end(), b->gcm.eps.begin(), b->gcm.eps.end());
  L->dim = a->dim + b->dim;
  L->z_deg.assign(L->dim, 0);
  L->eigcol.assign(L->dim, -1);
  for (auto& s : a->sym) L->sym.push_back("a0." + s);
  for (auto& s : b->sym) L->sym.push_back("a1." + s);
  for (auto& [key, s] : a->table) {
    long i = key / a->dim, j = key % a->dim;
    L->table[i * L->dim + j] = s;
  }
  for (auto& [key, s] : b->table) {
    long i = key / b->dim + a->dim, j = key % b->dim + a->dim;
    Sparse sh = s;
    for (auto& [k, c] : sh) k += a->dim;
    L->table[i * L->dim + j] = std::move(sh);
  }
  auto pad = [&](const CycVec& v, long off) {
    CycVec out(L->dim);
    for (long i = 0; i < (long)v.size(); ++i) out[off + i] = v[i];
    return out;
  };
  for (long i = 0; i < na; ++i) {
    L->gen_e.push_back(pad(a->gen_e[i], 0));
    L->gen_f.push_back(pad(a->gen_f[i], 0));
    L->gen_h.push_back(pad(a->gen_h[i], 0));
  }
  for (long i = 0; i < nb; ++i) {
    L->gen_e.push_back(pad(b->gen_e[i], a->dim));
    L->gen_f.push_back(pad(b->gen_f[i], a->dim));
    L->gen_h.push_back(pad(b->gen_h[i], a->dim));
  }
  L->gen_deg.assign(na + nb, 0);
  return L;
}

// ----- derived algebra, centre, centroid, invariant form -----

DerivedCenter derived_and_center(const LieAlgebra& L) {
  DerivedCenter out;
  std::vector<CycVec> gens;
  for (long i = 0; i < L.dim; ++i)
    for (long j = i + 1; j < L.dim; ++j) {
      if (!L.bracket_defined(i, j)) continue;
      auto s = L.bracket_basis(i, j);
      if (!s.empty()) gens.push_back(sparse_to_dense(s, L.dim));
    }
  if (!gens.empty()) {
    Mat m((long)gens.size(), L.dim);
    for (long r = 0; r < (long)gens.size(); ++r)
      for (long c = 0; c < L.dim; ++c) m.at(r, c) = gens[r][c];
    rref(m);
    for (long r = 0; r < m.rows(); ++r) {
      CycVec v(L.dim);
      bool nz = false;
      for (long c = 0; c < L.dim; ++c) {
        v[c] = m.at(r, c);
        if (!v[c].is_zero()) nz = true;
      }
      if (nz) out.derived.push_back(v);
    }
  }

  std::map<long, std::vector<long>> blocks;
  for (long i = 0; i < L.dim; ++i) blocks[L.z_deg[i]].push_back(i);
  for (auto& [deg, ids] : blocks) {
    std::vector<long> partners;
    for (long j = 0; j < L.dim; ++j) {
      bool ok = true;
      for (long i : ids)
        if (!L.bracket_defined(i, j)) ok = false;
      if (ok) partners.push_back(j);
    }
    Mat m((long)partners.size() * L.dim, (long)ids.size());
    for (long pq = 0; pq < (long)partners.size(); ++pq)
      for (long iq = 0; iq < (long)ids.size(); ++iq)
        for (auto& [k, c] : L.bracket_basis(ids[iq], partners[pq]))
          m.at(pq * L.dim + k, iq) = c;
    for (auto& w : nullspace(m)) {
      CycVec v(L.dim);
      for (long iq = 0; iq < (long)ids.size(); ++iq) v[ids[iq]] = w[iq];
      out.center.push_back(v);
    }
  }
  return out;
}

std::vector<Mat> centroid_of(const LieAlgebra& L) {
  require(!L.base, "Unsupported", "use the graded centroid for loop models");
  require(L.dim <= 16, "Unsupported", "centroid solve limited to small models");
  long d = L.dim, nu = d * d;  // unknown chi[r][c] at r*d+c
  std::vector<CycVec> rows;
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < d; ++j) {
      if (i == j) continue;
      auto br = L.bracket_basis(i, j);
      // chi([b_i,b_j]) - [b_i, chi(b_j)] = 0, one row per output coordinate
      Mat chunk(d, nu);
      for (auto& [k, c] : br)
        for (long r = 0; r < d; ++r) chunk.at(r, r * d + k) += c;
      for (long s = 0; s < d; ++s)
        for (auto& [k, c] : L.bracket_basis(i, s)) chunk.at(k, s * d + j) -= c;
      for (long r = 0; r < d; ++r) {
        CycVec row(nu);
        bool nz = false;
        for (long c = 0; c < nu; ++c) {
          row[c] = chunk.at(r, c);
          if (!row[c].is_zero()) nz = true;
        }
        if (nz) rows.push_back(row);
      }
    }
  }
  Mat m((long)rows.size(), nu);
  for (long r = 0; r < (long)rows.size(); ++r)
    for (long c = 0; c < nu; ++c) m.at(r, c) = rows[r][c];
  std::vector<Mat> out;
  for (auto& w : nullspace(m)) {
    Mat chi(d, d);
    for (long r = 0; r < d; ++r)
      for (long c = 0; c < d; ++c) chi.at(r, c) = w[r * d + c];
    out.push_back(chi);
  }
  return out;
}

Mat invariant_form(const LieAlgebra& L) {
  require(!L.is_sum, "Unsupported", "invariant form for sums not provided");
  if (!L.base) {
    require(L.type == KacType::Finite, "WrongType", "finite model expected");
    long n = L.gcm.n;
    Mat gm(L.dim, L.dim);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j)
        gm.at(i, j) = CycNum(Rat(L.gcm.eps[i] * L.gcm.a[j][i]));
    for (long k = 0; k < (long)L.proots.size(); ++k) {
      const auto& al = L.proots[k];
      long i = 0;
      while (pair_with_simple_coroot(L.gcm, al, i) == 0) ++i;
      auto co = coroot_coords(L.gcm, al);
      Rat num(0);
      for (long l = 0; l < n; ++l) num += Rat(co[l] * L.gcm.eps[l] * L.gcm.a[i][l]);
      Rat t = num / Rat(pair_with_simple_coroot(L.gcm, al, i));
      gm.at(n + 2 * k, n + 2 * k + 1) = CycNum(t);
      gm.at(n + 2 * k + 1, n + 2 * k) = CycNum(t);
    }
    return gm;
  }

  // affine loop model: pair degrees that cancel through the base form,
  // couple c with d, keep d isotropic
  long bdim = L.base->dim;
  Mat colnorm = L.eigen_cols.transpose() * L.norm_form_base * L.eigen_cols;
  CycNum lambda;
  bool have = false;
  for (long i = 0; i < L.gcm.n && !have; ++i) {
    for (long j = 0; j < L.gcm.n && !have; ++j) {
      CycVec vi(bdim), vj(bdim);
      for (long b = 0; b < L.dim; ++b) {
        if (L.z_deg[b] != 0 || L.eigcol[b] < 0) continue;
        if (!L.gen_h[i][b].is_zero())
          for (long rw = 0; rw < bdim; ++rw)
            vi[rw] += L.gen_h[i][b] * L.eigen_cols.at(rw, L.eigcol[b]);
        if (!L.gen_h[j][b].is_zero())
          for (long rw = 0; rw < bdim; ++rw)
            vj[rw] += L.gen_h[j][b] * L.eigen_cols.at(rw, L.eigcol[b]);
      }
      CycNum base_val = biform(vi, L.norm_form_base, vj);
      if (!base_val.is_zero()) {
        lambda = CycNum(Rat(L.gcm.eps[i] * L.gcm.a[j][i])) / base_val;
        have = true;
      }
    }
  }
  require(have, "InternalError", "could not normalize the affine form");
  long node = -1;
  for (long i = 0; i < L.gcm.n; ++i)
    if (L.gen_deg[i] == 1) node = i;
  CycNum kappa = CycNum(Rat(L.gcm.eps[node])) / L.gen_h[node][L.c_index];

  Mat gm(L.dim, L.dim);
  for (long i = 0; i < L.dim; ++i) {
    if (L.eigcol[i] < 0) continue;
    for (long j = 0; j < L.dim; ++j) {
      if (L.eigcol[j] < 0) continue;
      if (L.z_deg[i] + L.z_deg[j] != 0) continue;
      gm.at(i, j) = lambda * colnorm.at(L.eigcol[i], L.eigcol[j]);
    }
  }
  gm.at(L.c_index, L.d_index) = kappa;
  gm.at(L.d_index, L.c_index) = kappa;
  return gm;
}

}  // namespace loopiso
