#include "loopiso/loop.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "loopiso/errors.hpp"
#include "loopiso/linalg.hpp"

namespace loopiso {

namespace {

bool vec_eq(const CycVec& a, const CycVec& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

std::string deg_str(long i) { return std::to_string(i); }

}  // namespace

// ----- LoopAlgebra internals -----

std::optional<CycVec> LoopAlgebra::comp_coords(long deg, const CycVec& v) const {
  long r = residue(deg);
  long d = (long)resid_basis[r].size();
  if ((long)v.size() != base->dim) return std::nullopt;
  if (d == 0) {
    if (vec_is_zero(v)) return CycVec{};
    return std::nullopt;
  }
  CycVec sub(d);
  for (long i = 0; i < d; ++i) sub[i] = v[resid_rows[r][i]];
  CycVec coords = resid_inv[r].apply(sub);
  if (!vec_eq(comp_embed(deg, coords), v)) return std::nullopt;
  return coords;
}

CycVec LoopAlgebra::comp_embed(long deg, const CycVec& coords) const {
  long r = residue(deg);
  CycVec out(base->dim);
  const auto& bs = resid_basis[r];
  for (size_t k = 0; k < bs.size(); ++k) {
    if (coords[k].is_zero()) continue;
    for (long i = 0; i < base->dim; ++i) out[i] += coords[k] * bs[k][i];
  }
  return out;
}

const CycVec& LoopAlgebra::comp_bracket(long dp, long a, long dq,
                                        long b) const {
  std::array<long, 4> key{residue(dp), a, residue(dq), b};
  auto it = bk_cache.find(key);
  if (it != bk_cache.end()) return it->second;
  const CycVec& x = resid_basis[key[0]][a];
  const CycVec& y = resid_basis[key[2]][b];
  CycVec w = base->bracket(x, y);
  auto co = comp_coords(dp + dq, w);
  require(co.has_value(), "VerifyFailed",
          "bracket of component vectors left its component");
  return bk_cache.emplace(key, std::move(*co)).first->second;
}

LoopPtr build_loop(const LiePtr& base, const AutWord& w, long m, long window) {
  require(base != nullptr, "WrongType", "null base algebra");
  require(m >= 1, "NotPeriod", "period must be a positive integer");
  auto L = std::make_shared<LoopAlgebra>();
  L->base = base;
  L->sigma_word = w;
  L->m = m;
  L->window = window <= 0 ? 2 * m + 4 : window;
  AutMatrix am = eval_word(w, base);
  require(am.mat.power(m) == Mat::identity(base->dim), "NotPeriod",
          "word is not of period " + std::to_string(m) + " on the base");
  L->sigma_mat = am.mat;

  L->resid_basis.assign(m, {});
  L->resid_eig.assign(m, CycNum(1));
  for (auto& [r, bs] : eigenspaces(am.mat, m)) L->resid_basis[r] = bs;
  for (long r = 0; r < m; ++r) L->resid_eig[r] = CycNum::zeta_pow(m, r);
  long tot = 0;
  for (long r = 0; r < m; ++r) tot += (long)L->resid_basis[r].size();
  require(tot == base->dim, "NotPeriod",
          "component dimensions do not sum to the base dimension");

  // coordinate solvers: pick a row subset on which the eigenbasis is square
  L->resid_rows.assign(m, {});
  L->resid_inv.assign(m, Mat());
  long n = base->dim;
  for (long r = 0; r < m; ++r) {
    const auto& bs = L->resid_basis[r];
    long d = (long)bs.size();
    if (d == 0) continue;
    Mat work(n, d);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < d; ++j) work.at(i, j) = bs[j][i];
    std::vector<char> used(n, 0);
    std::vector<long> rows;
    for (long c = 0; c < d; ++c) {
      long pr = -1;
      for (long rr = 0; rr < n; ++rr)
        if (!used[rr] && !work.at(rr, c).is_zero()) {
          pr = rr;
          break;
        }
      require(pr >= 0, "NotPeriod", "degenerate eigenbasis");
      used[pr] = 1;
      rows.push_back(pr);
      CycNum piv = work.at(pr, c);
      for (long rr = 0; rr < n; ++rr) {
        if (rr == pr || work.at(rr, c).is_zero()) continue;
        CycNum f = work.at(rr, c) / piv;
        for (long cc = c; cc < d; ++cc)
          work.at(rr, cc) = work.at(rr, cc) - f * work.at(pr, cc);
      }
    }
    Mat S(d, d);
    for (long i = 0; i < d; ++i)
      for (long j = 0; j < d; ++j) S.at(i, j) = bs[j][rows[i]];
    auto Sinv = inverse(S);
    require(Sinv.has_value(), "NotPeriod", "component basis not invertible");
    L->resid_rows[r] = std::move(rows);
    L->resid_inv[r] = std::move(*Sinv);
  }

  L->flat_off.assign(2 * L->window + 1, 0);
  long off = 0;
  for (long i = -L->window; i <= L->window; ++i) {
    L->flat_off[i + L->window] = off;
    off += L->comp_dim(i);
  }
  L->flat_dim = off;
  return L;
}

// ----- element helpers -----

void loop_elt_trim(LoopElt& x) {
  for (auto it = x.begin(); it != x.end();) {
    if (vec_is_zero(it->second))
      it = x.erase(it);
    else
      ++it;
  }
}

LoopElt loop_elt_add(const LoopElt& x, const LoopElt& y) {
  LoopElt out = x;
  for (const auto& [d, v] : y) {
    auto it = out.find(d);
    if (it == out.end()) {
      out.emplace(d, v);
    } else {
      require(it->second.size() == v.size(), "VerifyFailed",
              "component size mismatch");
      for (size_t i = 0; i < v.size(); ++i) it->second[i] += v[i];
    }
  }
  loop_elt_trim(out);
  return out;
}

LoopElt loop_elt_scale(const LoopElt& x, const CycNum& c) {
  LoopElt out;
  if (c.is_zero()) return out;
  for (const auto& [d, v] : x) {
    CycVec w(v.size());
    for (size_t i = 0; i < v.size(); ++i) w[i] = c * v[i];
    out.emplace(d, std::move(w));
  }
  loop_elt_trim(out);
  return out;
}

LoopElt loop_elt_shift(const LoopElt& x, long delta) {
  LoopElt out;
  for (const auto& [d, v] : x) out.emplace(d + delta, v);
  return out;
}

bool loop_elt_eq(const LoopElt& x, const LoopElt& y) {
  LoopElt a = x, b = y;
  loop_elt_trim(a);
  loop_elt_trim(b);
  if (a.size() != b.size()) return false;
  for (const auto& [d, v] : a) {
    auto it = b.find(d);
    if (it == b.end() || !vec_eq(v, it->second)) return false;
  }
  return true;
}

LoopElt basis_elt(const LoopAlgebra& L, long deg, long k) {
  require(L.in_window(deg), "WindowOverflow",
          "degree " + deg_str(deg) + " outside window");
  require(k >= 0 && k < L.comp_dim(deg), "NotMember",
          "no basis vector " + std::to_string(k) + " at degree " +
              deg_str(deg));
  return LoopElt{{deg, L.comp(deg)[k]}};
}

bool loop_membership(const LoopAlgebra& L, const LoopElt& x) {
  for (const auto& [d, v] : x) {
    if (vec_is_zero(v)) continue;
    if (!L.in_window(d)) return false;
    if (!L.comp_coords(d, v).has_value()) return false;
  }
  return true;
}

LoopElt loop_bracket(const LoopAlgebra& L, const LoopElt& x, const LoopElt& y) {
  LoopElt out;
  for (const auto& [i, u] : x) {
    if (vec_is_zero(u)) continue;
    for (const auto& [j, v] : y) {
      if (vec_is_zero(v)) continue;
      require(L.in_window(i + j), "WindowOverflow",
              "bracket degree " + deg_str(i + j) + " outside window [" +
                  deg_str(-L.window) + ", " + deg_str(L.window) + "]");
      CycVec w = L.base->bracket(u, v);
      if (vec_is_zero(w)) continue;
      auto it = out.find(i + j);
      if (it == out.end()) {
        out.emplace(i + j, std::move(w));
      } else {
        for (size_t t = 0; t < w.size(); ++t) it->second[t] += w[t];
      }
    }
  }
  loop_elt_trim(out);
  return out;
}

// ----- maps -----

static bool elt_in_window(const LoopAlgebra& L, const LoopElt& x) {
  for (const auto& [d, v] : x)
    if (!vec_is_zero(v) && !L.in_window(d)) return false;
  return true;
}

LoopMap make_loop_map(LoopPtr source, LoopPtr target,
                      std::vector<std::vector<LoopElt>> images, CycNum scalar,
                      int tsign) {
  require(source != nullptr && target != nullptr, "VerifyFailed",
          "null loop algebra");
  require(!scalar.is_zero(), "VerifyFailed", "semilinear scalar must be nonzero");
  require(tsign == 1 || tsign == -1, "VerifyFailed", "tsign must be +1 or -1");
  long W = source->window;
  require((long)images.size() == 2 * W + 1, "VerifyFailed",
          "image table does not match the source window");
  for (long i = -W; i <= W; ++i)
    require((long)images[i + W].size() == source->comp_dim(i), "VerifyFailed",
            "image count mismatch at degree " + deg_str(i));

  for (long i = -W; i <= W; ++i)
    for (long k = 0; k < source->comp_dim(i); ++k)
      require(loop_membership(*target, images[i + W][k]), "VerifyFailed",
              "image of basis vector " + std::to_string(k) + " at degree " +
                  deg_str(i) + " is not in the target");

  // declared semilinearity: image of t*x must be scalar * t^tsign * image(x)
  long sm = source->m, tm = target->m;
  for (long i = -W; i + sm <= W; ++i) {
    for (long k = 0; k < source->comp_dim(i); ++k) {
      LoopElt expect = loop_elt_scale(
          loop_elt_shift(images[i + W][k], (long)tsign * tm), scalar);
      if (!elt_in_window(*target, expect)) continue;
      require(loop_elt_eq(images[i + sm + W][k], expect), "VerifyFailed",
              "semilinearity violated between degrees " + deg_str(i) + " and " +
                  deg_str(i + sm));
    }
  }

  // bracket preservation on every in-window pair
  for (long i = -W; i <= W; ++i) {
    for (long j = i; j <= W; ++j) {
      if (i + j < -W || i + j > W) continue;
      long di = source->comp_dim(i), dj = source->comp_dim(j);
      for (long k = 0; k < di; ++k) {
        for (long l = (i == j ? k + 1 : 0); l < dj; ++l) {
          LoopElt lhs, rhs;
          try {
            const CycVec& gam = source->comp_bracket(i, k, j, l);
            for (long c = 0; c < (long)gam.size(); ++c) {
              if (gam[c].is_zero()) continue;
              lhs = loop_elt_add(
                  lhs, loop_elt_scale(images[i + j + W][c], gam[c]));
            }
            rhs = loop_bracket(*target, images[i + W][k], images[j + W][l]);
          } catch (const Error& e) {
            if (e.code() == "WindowOverflow") continue;
            throw;
          }
          require(loop_elt_eq(lhs, rhs), "VerifyFailed",
                  "bracket not preserved on the pair at degrees (" +
                      deg_str(i) + ", " + deg_str(j) + ")");
        }
      }
    }
  }

  LoopMap f;
  f.source = std::move(source);
  f.target = std::move(target);
  f.images = std::move(images);
  f.scalar = std::move(scalar);
  f.tsign = tsign;
  return f;
}

LoopElt apply_loop_map(const LoopMap& f, const LoopElt& x) {
  LoopElt out;
  long W = f.source->window;
  for (const auto& [d, v] : x) {
    if (vec_is_zero(v)) continue;
    require(f.source->in_window(d), "NotMember",
            "degree " + deg_str(d) + " outside the source window");
    auto co = f.source->comp_coords(d, v);
    require(co.has_value(), "NotMember",
            "element is not in the source component at degree " + deg_str(d));
    for (long k = 0; k < (long)co->size(); ++k) {
      if ((*co)[k].is_zero()) continue;
      out = loop_elt_add(out, loop_elt_scale(f.images[d + W][k], (*co)[k]));
    }
  }
  return out;
}

static bool loops_match(const LoopAlgebra& a, const LoopAlgebra& b) {
  return a.base == b.base && a.m == b.m && a.window == b.window &&
         a.sigma_mat == b.sigma_mat;
}

LoopMap compose_loop_maps(const LoopMap& psi, const LoopMap& phi) {
  require(loops_match(*phi.target, *psi.source), "VerifyFailed",
          "composition source does not match the inner target");
  long W = phi.source->window;
  std::vector<std::vector<LoopElt>> images(2 * W + 1);
  for (long i = -W; i <= W; ++i) {
    images[i + W].resize(phi.source->comp_dim(i));
    for (long k = 0; k < phi.source->comp_dim(i); ++k)
      images[i + W][k] = apply_loop_map(psi, phi.images[i + W][k]);
  }
  CycNum scalar = phi.scalar * psi.scalar.pow(phi.tsign);
  return make_loop_map(phi.source, psi.target, std::move(images), scalar,
                       phi.tsign * psi.tsign);
}

LoopMap period_change_iso(const LiePtr& base, const AutWord& w, long d, long m,
                          long src_window) {
  require(d >= 1 && m >= 1 && m % d == 0, "NotDivisor",
          std::to_string(d) + " does not divide " + std::to_string(m));
  long e = m / d;
  LoopPtr src = build_loop(base, w, d, src_window);
  LoopPtr tgt = build_loop(base, w, m, std::max(2 * m + 4, e * src->window));
  long W = src->window;
  std::vector<std::vector<LoopElt>> images(2 * W + 1);
  for (long j = -W; j <= W; ++j) {
    images[j + W].resize(src->comp_dim(j));
    for (long k = 0; k < src->comp_dim(j); ++k)
      images[j + W][k] = LoopElt{{e * j, src->comp(j)[k]}};
  }
  return make_loop_map(src, tgt, std::move(images), CycNum(1), 1);
}

LoopMap inverse_iso(const LoopPtr& L) {
  LoopPtr tgt =
      build_loop(L->base, word_inverse(L->sigma_word), L->m, L->window);
  long W = L->window;
  std::vector<std::vector<LoopElt>> images(2 * W + 1);
  for (long j = -W; j <= W; ++j) {
    images[j + W].resize(L->comp_dim(j));
    for (long k = 0; k < L->comp_dim(j); ++k)
      images[j + W][k] = LoopElt{{-j, L->comp(j)[k]}};
  }
  return make_loop_map(L, tgt, std::move(images), CycNum(1), -1);
}

LoopMap conjugation_iso(const LoopPtr& L, const AutWord& tau) {
  Mat T = eval_word(tau, L->base).mat;
  AutWord tw =
      word_concat(tau, word_concat(L->sigma_word, word_inverse(tau)));
  LoopPtr tgt = build_loop(L->base, tw, L->m, L->window);
  long W = L->window;
  std::vector<std::vector<LoopElt>> images(2 * W + 1);
  for (long j = -W; j <= W; ++j) {
    images[j + W].resize(L->comp_dim(j));
    for (long k = 0; k < L->comp_dim(j); ++k)
      images[j + W][k] = LoopElt{{j, T.apply(L->comp(j)[k])}};
  }
  return make_loop_map(L, tgt, std::move(images), CycNum(1), 1);
}

LoopMap scaling_iso(const LoopPtr& L, const CycNum& b) {
  require(!b.is_zero(), "VerifyFailed", "scaling by zero");
  long W = L->window;
  std::vector<std::vector<LoopElt>> images(2 * W + 1);
  for (long j = -W; j <= W; ++j) {
    images[j + W].resize(L->comp_dim(j));
    CycNum bj = b.pow(j);
    for (long k = 0; k < L->comp_dim(j); ++k) {
      CycVec v = L->comp(j)[k];
      for (auto& c : v) c = c * bj;
      images[j + W][k] = LoopElt{{j, std::move(v)}};
    }
  }
  return make_loop_map(L, L, std::move(images), b.pow(L->m), 1);
}

// ----- centroid -----

namespace {

using SparseRow = std::map<long, CycNum>;

void row_add(SparseRow& row, long idx, const CycNum& v) {
  if (v.is_zero()) return;
  auto it = row.find(idx);
  if (it == row.end()) {
    row.emplace(idx, v);
  } else {
    it->second += v;
    if (it->second.is_zero()) row.erase(it);
  }
}

struct Elim {
  std::map<long, SparseRow> pivots;  // lead column -> normalized row

  long rank() const { return (long)pivots.size(); }

  void add(SparseRow row) {
    while (!row.empty()) {
      long lead = row.begin()->first;
      auto it = pivots.find(lead);
      if (it == pivots.end()) {
        CycNum inv = row.begin()->second.inverse();
        for (auto& [c, v] : row) v = v * inv;
        pivots.emplace(lead, std::move(row));
        return;
      }
      CycNum f = row.begin()->second;
      for (const auto& [c, v] : it->second) {
        auto jt = row.find(c);
        CycNum nv = (jt == row.end() ? CycNum() : jt->second) - f * v;
        if (nv.is_zero()) {
          if (jt != row.end()) row.erase(jt);
        } else if (jt == row.end()) {
          row.emplace(c, std::move(nv));
        } else {
          jt->second = std::move(nv);
        }
      }
    }
  }

  // null vectors of the pivot system on indices [0, total)
  std::vector<std::vector<CycNum>> null_vectors(long total) const {
    std::vector<char> is_pivot(total, 0);
    for (const auto& [lead, row] : pivots) is_pivot[lead] = 1;
    std::vector<std::vector<CycNum>> out;
    for (long fc = 0; fc < total; ++fc) {
      if (is_pivot[fc]) continue;
      std::vector<CycNum> sol(total);
      sol[fc] = CycNum(1);
      for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        CycNum acc;
        for (const auto& [c, v] : it->second) {
          if (c == it->first) continue;
          if (!sol[c].is_zero()) acc += v * sol[c];
        }
        sol[it->first] = -acc;
      }
      out.push_back(std::move(sol));
    }
    return out;
  }
};

}  // namespace

static std::vector<CentroidMap> centroid_shift(const LoopAlgebra& L, long s) {
  long W = L.window;
  std::vector<long> qdom;
  for (long q = -W; q <= W; ++q)
    if (L.in_window(q + s)) qdom.push_back(q);
  std::map<long, long> off;
  long total = 0;
  for (long q : qdom) {
    off[q] = total;
    total += L.comp_dim(q + s) * L.comp_dim(q);
  }
  if (total == 0) return {};

  // one constraint family: chi([x,y]) = [x, chi(y)], rows per output coord
  auto build_rows = [&](long p, long a, long q, long b,
                        std::vector<SparseRow>& out) {
    long dq = L.comp_dim(q), dpq = L.comp_dim(p + q);
    long dqs = L.comp_dim(q + s), dpqs = L.comp_dim(p + q + s);
    if (dpqs == 0) return;
    const CycVec& gam = L.comp_bracket(p, a, q, b);
    for (long r = 0; r < dpqs; ++r) {
      SparseRow row;
      for (long c = 0; c < dpq; ++c)
        if (!gam[c].is_zero()) row_add(row, off.at(p + q) + r * dpq + c, gam[c]);
      for (long rp = 0; rp < dqs; ++rp) {
        const CycVec& del = L.comp_bracket(p, a, q + s, rp);
        if (!del[r].is_zero()) row_add(row, off.at(q) + rp * dq + b, -del[r]);
      }
      if (!row.empty()) out.push_back(std::move(row));
    }
  };

  Elim elim;

  // the p = 0 block systems repeat per residue: solve one representative
  // and copy the pivots with shifted offsets
  if (L.comp_dim(0) > 0) {
    for (long r = 0; r < L.m; ++r) {
      std::vector<long> qs;
      for (long q : qdom)
        if (L.residue(q) == r && L.comp_dim(q) > 0 && L.comp_dim(q + s) > 0)
          qs.push_back(q);
      if (qs.empty()) continue;
      long q0 = qs[0];
      Elim local;
      std::vector<SparseRow> rows;
      for (long a = 0; a < L.comp_dim(0); ++a)
        for (long b = 0; b < L.comp_dim(q0); ++b) build_rows(0, a, q0, b, rows);
      for (auto& row : rows) local.add(std::move(row));
      for (long q : qs) {
        long delta = off.at(q) - off.at(q0);
        for (const auto& [lead, row] : local.pivots) {
          SparseRow shifted;
          for (const auto& [c, v] : row) shifted.emplace(c + delta, v);
          elim.add(std::move(shifted));
        }
      }
    }
  }

  auto materialize = [&](const std::vector<CycNum>& sol) {
    CentroidMap cm;
    for (long q : qdom) {
      long dq = L.comp_dim(q), dqs = L.comp_dim(q + s);
      if (dq == 0 || dqs == 0) continue;
      Mat M(dqs, dq);
      for (long r = 0; r < dqs; ++r)
        for (long c = 0; c < dq; ++c) M.at(r, c) = sol[off.at(q) + r * dq + c];
      cm.emplace(q, std::move(M));
    }
    return cm;
  };

  auto normalize = [&](std::vector<CycNum>& sol) {
    for (long i = 0; i < total; ++i) {
      if (sol[i].is_zero()) continue;
      CycNum inv = sol[i].inverse();
      for (long j = 0; j < total; ++j)
        if (!sol[j].is_zero()) sol[j] = sol[j] * inv;
      return;
    }
  };

  auto violated = [&](const CentroidMap& cm, long p, long a, long q,
                      long b) -> bool {
    long dpq = L.comp_dim(p + q), dpqs = L.comp_dim(p + q + s);
    long dqs = L.comp_dim(q + s);
    if (dpqs == 0) return false;
    const CycVec& gam = L.comp_bracket(p, a, q, b);
    CycVec lhs(dpqs), rhs(dpqs);
    auto it = cm.find(p + q);
    if (it != cm.end() && dpq > 0) {
      for (long r = 0; r < dpqs; ++r)
        for (long c = 0; c < dpq; ++c)
          if (!gam[c].is_zero() && !it->second.at(r, c).is_zero())
            lhs[r] += it->second.at(r, c) * gam[c];
    }
    auto jt = cm.find(q);
    if (jt != cm.end()) {
      for (long rp = 0; rp < dqs; ++rp) {
        const CycNum& coef = jt->second.at(rp, b);
        if (coef.is_zero()) continue;
        const CycVec& del = L.comp_bracket(p, a, q + s, rp);
        for (long r = 0; r < dpqs; ++r)
          if (!del[r].is_zero()) rhs[r] += coef * del[r];
      }
    }
    return !vec_eq(lhs, rhs);
  };

  long rounds = 0;
  while (true) {
    require(++rounds <= total + 8, "VerifyFailed",
            "centroid solve did not stabilize");
    if (elim.rank() >= total) return {};
    auto sols = elim.null_vectors(total);
    std::vector<CentroidMap> cands;
    cands.reserve(sols.size());
    for (auto& sol : sols) {
      normalize(sol);
      cands.push_back(materialize(sol));
    }
    bool dirty = false;
    long added = 0;
    for (long q : qdom) {
      for (long qq : qdom) {
        long p = qq - q;
        if (p < -W || p > W) continue;
        long dp = L.comp_dim(p), dq = L.comp_dim(q);
        if (dp == 0 || dq == 0) continue;
        for (long a = 0; a < dp && added <= 256; ++a) {
          for (long b = 0; b < dq && added <= 256; ++b) {
            bool bad = false;
            for (const auto& cm : cands)
              if (violated(cm, p, a, q, b)) {
                bad = true;
                break;
              }
            if (!bad) continue;
            std::vector<SparseRow> rows;
            build_rows(p, a, q, b, rows);
            for (auto& row : rows) elim.add(std::move(row));
            dirty = true;
            added += (long)rows.size();
          }
        }
        if (added > 256) break;
      }
      if (added > 256) break;
    }
    if (!dirty) return cands;
  }
}

std::map<long, std::vector<CentroidMap>> loop_centroid(const LoopPtr& L,
                                                       long degree_window) {
  require(L != nullptr, "WrongType", "null loop algebra");
  require(L->base->type == KacType::Finite && !L->base->is_sum, "WrongType",
          "centroid solve needs a finite type base");
  require(degree_window >= 0, "WindowOverflow",
          "degree window must be nonnegative");
  std::map<long, std::vector<CentroidMap>> out;
  for (long s = -degree_window; s <= degree_window; ++s)
    out.emplace(s, centroid_shift(*L, s));
  return out;
}

LoopElt centroid_apply(const LoopAlgebra& L, long shift, const CentroidMap& cm,
                       const LoopElt& x) {
  LoopElt out;
  for (const auto& [d, v] : x) {
    if (vec_is_zero(v)) continue;
    auto co = L.comp_coords(d, v);
    require(co.has_value(), "NotMember",
            "element is not in the component at degree " + deg_str(d));
    auto it = cm.find(d);
    if (it == cm.end()) continue;
    CycVec img = it->second.apply(*co);
    if (vec_is_zero(img)) continue;
    require(L.in_window(d + shift), "WindowOverflow",
            "centroid image outside window");
    out = loop_elt_add(out, LoopElt{{d + shift, L.comp_embed(d + shift, img)}});
  }
  return out;
}

// ----- induced map on R and normalization -----

InducedAut induced_base_aut(const LoopMap& f) {
  long W = f.source->window;
  long sm = f.source->m, tm = f.target->m;

  auto try_sign = [&](int sgn) -> std::optional<CycNum> {
    std::optional<CycNum> a;
    for (long i = -W; i + sm <= W; ++i) {
      for (long k = 0; k < f.source->comp_dim(i); ++k) {
        LoopElt u1 = f.images[i + sm + W][k];
        LoopElt u2 = loop_elt_shift(f.images[i + W][k], (long)sgn * tm);
        loop_elt_trim(u1);
        loop_elt_trim(u2);
        if (!elt_in_window(*f.target, u2)) continue;
        if (u1.empty() && u2.empty()) continue;
        if (u1.empty() || u2.empty()) return std::nullopt;
        // u1 must be a constant multiple of u2
        const auto& [d0, v0] = *u2.begin();
        auto it = u1.find(d0);
        if (it == u1.end()) return std::nullopt;
        CycNum c;
        for (size_t t = 0; t < v0.size(); ++t)
          if (!v0[t].is_zero()) {
            c = it->second[t] / v0[t];
            break;
          }
        if (c.is_zero()) return std::nullopt;
        if (!loop_elt_eq(u1, loop_elt_scale(u2, c))) return std::nullopt;
        if (a.has_value() && *a != c) return std::nullopt;
        a = c;
      }
    }
    return a;
  };

  for (int sgn : {f.tsign, -f.tsign}) {
    auto a = try_sign(sgn);
    if (a.has_value()) return InducedAut{*a, sgn};
  }
  fail("NotSemilinear",
       "map does not act on the centroid ring by t -> a t^(+-1)");
}

std::optional<CycNum> mth_root_in_tower(const CycNum& v, long m) {
  require(m >= 1, "NotPeriod", "root exponent must be positive");
  if (v.is_zero()) return CycNum();
  if (m == 1) return v;
  CycNum vr = v.reduced();
  long L = vr.level();

  auto rational_root = [&](const Rat& c) -> std::optional<Rat> {
    if (c == 0) return Rat(0);
    bool neg = c < 0;
    if (neg && m % 2 == 0) return std::nullopt;
    mpz_class num = c.get_num(), den = c.get_den();
    if (neg) num = -num;
    mpz_class rn, rd;
    int en = mpz_root(rn.get_mpz_t(), num.get_mpz_t(), (unsigned long)m);
    int ed = mpz_root(rd.get_mpz_t(), den.get_mpz_t(), (unsigned long)m);
    if (!en || !ed) return std::nullopt;
    Rat r(rn, rd);
    r.canonicalize();
    if (neg) r = -r;
    return r;
  };

  // search v = c * u with c rational and u a root of unity in Q(zeta_L)
  for (long j = 0; j < 2 * L; ++j) {
    CycNum u = CycNum::zeta_pow(2 * L, j);
    CycNum c = vr * u.inverse();
    if (!c.is_rational()) continue;
    auto rc = rational_root(c.to_rational());
    if (!rc.has_value()) continue;
    CycNum b = CycNum(*rc) * CycNum::zeta_pow(2 * L * m, j);
    require(b.pow(m) == v, "VerifyFailed", "root extraction check failed");
    return b;
  }
  return std::nullopt;
}

LoopMap normalize_to_R_iso(const LoopMap& f) {
  LoopMap cur = f;
  InducedAut ind = induced_base_aut(cur);
  if (ind.tsign == -1) {
    LoopMap rev = inverse_iso(cur.target);
    cur = compose_loop_maps(rev, cur);
    ind = induced_base_aut(cur);
    require(ind.tsign == 1, "NotSemilinear",
            "degree reversal did not straighten the ring action");
  }
  if (ind.scalar == CycNum(1)) return cur;
  auto b = mth_root_in_tower(ind.scalar.inverse(), cur.target->m);
  if (!b.has_value())
    fail("NoRootAvailable",
         "the induced scalar has no m-th root in the cyclotomic tower; a "
         "field extension would be needed");
  LoopMap sc = scaling_iso(cur.target, *b);
  cur = compose_loop_maps(sc, cur);
  InducedAut fin = induced_base_aut(cur);
  require(fin.tsign == 1 && fin.scalar == CycNum(1), "NotSemilinear",
          "normalization did not produce an R-linear map");
  return cur;
}

}  // namespace loopiso
