#include "loopiso/gcm.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

namespace loopiso {

namespace {

bool is_connected(const IMat& a) {
  const long n = (long)a.size();
  std::vector<bool> seen(n, false);
  std::vector<long> stack = {0};
  seen[0] = true;
  while (!stack.empty()) {
    long v = stack.back();
    stack.pop_back();
    for (long w = 0; w < n; ++w) {
      if (!seen[w] && a[v][w] != 0) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace

GCM gcm_validate(const IMat& a) {
  const long n = (long)a.size();
  require(n >= 1, "InvalidGCM", "empty matrix");
  for (long i = 0; i < n; ++i)
    require((long)a[i].size() == n, "InvalidGCM", "matrix not square");
  for (long i = 0; i < n; ++i) {
    require(a[i][i] == 2, "InvalidGCM", "diagonal entry must be 2");
    for (long j = 0; j < n; ++j) {
      if (i == j) continue;
      require(a[i][j] <= 0, "InvalidGCM", "off-diagonal entry must be <= 0");
      require((a[i][j] == 0) == (a[j][i] == 0), "InvalidGCM",
              "zero pattern must be symmetric");
    }
  }
  require(is_connected(a), "InvalidGCM", "matrix must be indecomposable");

  // symmetrizer by spanning-tree propagation: eps[j]*a[i][j] == eps[i]*a[j][i]
  std::vector<Rat> e(n, Rat(0));
  e[0] = 1;
  std::vector<long> order = {0};
  std::vector<bool> placed(n, false);
  placed[0] = true;
  for (size_t k = 0; k < order.size(); ++k) {
    long i = order[k];
    for (long j = 0; j < n; ++j) {
      if (placed[j] || a[i][j] == 0) continue;
      // eps[j] = eps[i] * a[j][i] / a[i][j]
      e[j] = e[i] * rat(a[j][i]) / rat(a[i][j]);
      placed[j] = true;
      order.push_back(j);
    }
  }
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      require(e[j] * rat(a[i][j]) == e[i] * rat(a[j][i]), "InvalidGCM",
              "matrix is not symmetrizable");
  // scale to smallest positive integers
  mpz_class den_lcm = 1;
  for (const auto& x : e) {
    mpz_class d = x.get_den();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
    den_lcm = den_lcm / g * d;
  }
  std::vector<mpz_class> nums(n);
  mpz_class num_gcd = 0;
  for (long i = 0; i < n; ++i) {
    nums[i] = e[i].get_num() * (den_lcm / e[i].get_den());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), nums[i].get_mpz_t());
  }
  GCM g;
  g.n = n;
  g.a = a;
  g.eps.resize(n);
  for (long i = 0; i < n; ++i) {
    mpz_class v = nums[i] / num_gcd;
    require(v > 0 && v.fits_slong_p(), "InvalidGCM", "symmetrizer out of range");
    g.eps[i] = v.get_si();
  }
  return g;
}

std::vector<std::vector<Rat>> root_form(const GCM& g) {
  std::vector<std::vector<Rat>> b(g.n, std::vector<Rat>(g.n));
  for (long i = 0; i < g.n; ++i)
    for (long j = 0; j < g.n; ++j) b[i][j] = rat(g.a[i][j]) / rat(g.eps[i]);
  return b;
}

const char* kac_type_name(KacType t) {
  switch (t) {
    case KacType::Finite: return "finite";
    case KacType::Affine: return "affine";
    default: return "indefinite";
  }
}

namespace {

// leading principal minors of the symmetrized form, exact
std::vector<Rat> leading_minors(const GCM& g) {
  auto b = root_form(g);
  std::vector<Rat> minors;
  for (long k = 1; k <= g.n; ++k) {
    Mat m(k, k);
    for (long i = 0; i < k; ++i)
      for (long j = 0; j < k; ++j) m.at(i, j) = CycNum(b[i][j]);
    minors.push_back(det(m).to_rational());
  }
  return minors;
}

}  // namespace

ClassifyResult classify(const GCM& g) {
  auto minors = leading_minors(g);
  bool head_positive = true;
  for (long k = 0; k + 1 < g.n; ++k)
    if (minors[k] <= 0) { head_positive = false; break; }
  ClassifyResult res;
  auto b = root_form(g);
  Mat bm(g.n, g.n);
  for (long i = 0; i < g.n; ++i)
    for (long j = 0; j < g.n; ++j) bm.at(i, j) = CycNum(b[i][j]);
  res.corank = g.n - rank_of(bm);
  if (head_positive && minors[g.n - 1] > 0) {
    res.type = KacType::Finite;
  } else if (head_positive && minors[g.n - 1] == 0) {
    res.type = KacType::Affine;
  } else {
    res.type = KacType::Indefinite;
    res.label = "";
    return res;
  }
  const auto& cat = res.type == KacType::Finite ? finite_catalog() : affine_catalog();
  for (const auto& entry : cat) {
    if ((long)entry.matrix.size() != g.n) continue;
    if (find_iso_perm(g.a, entry.matrix)) {
      res.label = entry.label;
      break;
    }
  }
  return res;
}

// ----- root systems -----

long root_height(const std::vector<long>& r) {
  return std::accumulate(r.begin(), r.end(), 0L);
}

long pair_with_simple_coroot(const GCM& g, const std::vector<long>& alpha, long i) {
  long s = 0;
  for (long j = 0; j < g.n; ++j) s += alpha[j] * g.a[i][j];
  return s;
}

std::vector<std::vector<long>> positive_roots(const GCM& g) {
  std::set<std::vector<long>> known;
  std::vector<std::vector<long>> by_height;
  for (long i = 0; i < g.n; ++i) {
    std::vector<long> e(g.n, 0);
    e[i] = 1;
    known.insert(e);
    by_height.push_back(e);
  }
  const long height_cap = 10000;
  for (size_t idx = 0; idx < by_height.size(); ++idx) {
    std::vector<long> alpha = by_height[idx];
    require(root_height(alpha) < height_cap, "WrongType",
            "root generation did not terminate; matrix is not finite type");
    for (long i = 0; i < g.n; ++i) {
      // down-string length p: max k with alpha - k*alpha_i a root (or zero ok?)
      long p = 0;
      std::vector<long> down = alpha;
      while (true) {
        down[i] -= 1;
        bool nonneg = std::all_of(down.begin(), down.end(), [](long v) { return v >= 0; });
        if (!nonneg || root_height(down) == 0 || !known.count(down)) break;
        ++p;
      }
      // alpha - alpha_i = 0 means alpha = alpha_i; string through zero not a root
      long pairing = pair_with_simple_coroot(g, alpha, i);
      long q = p - pairing;
      if (q >= 1) {
        std::vector<long> up = alpha;
        up[i] += 1;
        if (!known.count(up)) {
          known.insert(up);
          by_height.push_back(up);
        }
      }
    }
    require(by_height.size() < 100000, "WrongType",
            "root generation did not terminate; matrix is not finite type");
  }
  std::vector<std::vector<long>> roots(known.begin(), known.end());
  std::sort(roots.begin(), roots.end(), [](const auto& x, const auto& y) {
    long hx = root_height(x), hy = root_height(y);
    if (hx != hy) return hx < hy;
    return x < y;
  });
  return roots;
}

Rat root_inner(const GCM& g, const std::vector<long>& x, const std::vector<long>& y) {
  auto b = root_form(g);
  Rat s(0);
  for (long i = 0; i < g.n; ++i) {
    if (x[i] == 0) continue;
    for (long j = 0; j < g.n; ++j) {
      if (y[j] == 0) continue;
      s += rat(x[i]) * rat(y[j]) * b[i][j];
    }
  }
  return s;
}

std::vector<long> coroot_coords(const GCM& g, const std::vector<long>& alpha) {
  Rat len = root_inner(g, alpha, alpha);
  require(len != 0, "WrongType", "isotropic root has no coroot");
  std::vector<long> c(g.n);
  for (long j = 0; j < g.n; ++j) {
    // alpha_vee = (2/(alpha,alpha)) * sum_j k_j alpha_j_vee / eps_j
    Rat v = rat(2 * alpha[j]) / (rat(g.eps[j]) * len);
    require(v.get_den() == 1, "InternalError", "coroot coordinates not integral");
    require(v.get_num().fits_slong_p(), "InternalError", "coroot overflow");
    c[j] = (long)v.get_num().get_si();
  }
  return c;
}

std::vector<long> highest_root(const GCM& g) {
  auto roots = positive_roots(g);
  return roots.back();
}

// ----- catalogs -----

namespace {

IMat simply_laced_from_edges(long n, const std::vector<std::pair<long, long>>& edges) {
  IMat a(n, std::vector<long>(n, 0));
  for (long i = 0; i < n; ++i) a[i][i] = 2;
  for (auto [u, v] : edges) {
    a[u][v] = -1;
    a[v][u] = -1;
  }
  return a;
}

IMat type_A(long n) {
  std::vector<std::pair<long, long>> e;
  for (long i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return simply_laced_from_edges(n, e);
}

IMat type_B(long n) {  // last node short: a[n-1][n-2] = -2
  IMat a = type_A(n);
  a[n - 1][n - 2] = -2;
  return a;
}

IMat type_C(long n) {  // transpose of B
  IMat a = type_A(n);
  a[n - 2][n - 1] = -2;
  return a;
}

IMat type_D(long n) {
  std::vector<std::pair<long, long>> e;
  for (long i = 0; i + 1 < n - 1; ++i) e.push_back({i, i + 1});
  e.pop_back();  // drop (n-3, n-2); reattach both tips to n-3
  e.push_back({n - 3, n - 2});
  e.push_back({n - 3, n - 1});
  return simply_laced_from_edges(n, e);
}

IMat type_E(long n) {
  // Bourbaki: path 1-3-4-5-...-n with node 2 attached to 4 (1-based)
  std::vector<std::pair<long, long>> e = {{0, 2}, {2, 3}, {1, 3}};
  for (long i = 4; i < n; ++i) e.push_back({i - 1, i});
  return simply_laced_from_edges(n, e);
}

IMat type_F4() {
  IMat a = type_A(4);
  a[2][1] = -2;  // nodes 1,2 long; 3,4 short
  return a;
}

IMat type_G2() {
  return {{2, -1}, {-3, 2}};
}

std::mutex g_catalog_mutex;
std::vector<CatalogEntry> g_finite_catalog;
std::vector<CatalogEntry> g_affine_catalog;

void build_finite_catalog() {
  auto& c = g_finite_catalog;
  for (long n = 1; n <= 10; ++n) c.push_back({"A" + std::to_string(n), type_A(n)});
  for (long n = 3; n <= 10; ++n) c.push_back({"B" + std::to_string(n), type_B(n)});
  for (long n = 2; n <= 10; ++n) c.push_back({"C" + std::to_string(n), type_C(n)});
  for (long n = 4; n <= 10; ++n) c.push_back({"D" + std::to_string(n), type_D(n)});
  for (long n = 6; n <= 8; ++n) c.push_back({"E" + std::to_string(n), type_E(n)});
  c.push_back({"F4", type_F4()});
  c.push_back({"G2", type_G2()});
}

// untwisted extension: node 0 is -theta
IMat extend_untwisted(const IMat& fin) {
  GCM g = gcm_validate(fin);
  auto theta = highest_root(g);
  auto theta_vee = coroot_coords(g, theta);
  const long n = g.n;
  IMat a(n + 1, std::vector<long>(n + 1, 0));
  a[0][0] = 2;
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) a[i + 1][j + 1] = fin[i][j];
  for (long j = 0; j < n; ++j) {
    // a[0][j+1] = alpha_j(alpha_0_vee) = -alpha_j(theta_vee)
    long s = 0;
    for (long i = 0; i < n; ++i) s += theta_vee[i] * fin[i][j];
    a[0][j + 1] = -s;
    // a[j+1][0] = alpha_0(alpha_j_vee) = -theta(alpha_j_vee)
    long t = 0;
    for (long i = 0; i < n; ++i) t += theta[i] * fin[j][i];
    a[j + 1][0] = -t;
  }
  return a;
}

IMat path_with_ends(long nodes, long a01, long a10, long alast, long alast_rev) {
  IMat a(nodes, std::vector<long>(nodes, 0));
  for (long i = 0; i < nodes; ++i) a[i][i] = 2;
  for (long i = 0; i + 1 < nodes; ++i) {
    a[i][i + 1] = -1;
    a[i + 1][i] = -1;
  }
  a[0][1] = a01;
  a[1][0] = a10;
  a[nodes - 2][nodes - 1] = alast;
  a[nodes - 1][nodes - 2] = alast_rev;
  return a;
}

void build_affine_catalog() {
  auto& c = g_affine_catalog;
  c.push_back({"A1^(1)", {{2, -2}, {-2, 2}}});
  for (long n = 2; n <= 10; ++n) {
    // cycle on n+1 nodes
    std::vector<std::pair<long, long>> e;
    for (long i = 0; i <= n; ++i) e.push_back({i, (i + 1) % (n + 1)});
    c.push_back({"A" + std::to_string(n) + "^(1)",
                 simply_laced_from_edges(n + 1, e)});
  }
  for (long n = 3; n <= 10; ++n)
    c.push_back({"B" + std::to_string(n) + "^(1)", extend_untwisted(type_B(n))});
  for (long n = 2; n <= 10; ++n)
    c.push_back({"C" + std::to_string(n) + "^(1)", extend_untwisted(type_C(n))});
  for (long n = 4; n <= 10; ++n)
    c.push_back({"D" + std::to_string(n) + "^(1)", extend_untwisted(type_D(n))});
  for (long n = 6; n <= 8; ++n)
    c.push_back({"E" + std::to_string(n) + "^(1)", extend_untwisted(type_E(n))});
  c.push_back({"F4^(1)", extend_untwisted(type_F4())});
  c.push_back({"G2^(1)", extend_untwisted(type_G2())});

  // twisted families
  c.push_back({"A2^(2)", {{2, -4}, {-1, 2}}});
  for (long l = 2; l <= 9; ++l)  // A_{2l}^(2): 0<=1-...-(l-1)<=l, arrows leftward
    c.push_back({"A" + std::to_string(2 * l) + "^(2)",
                 path_with_ends(l + 1, -2, -1, -2, -1)});
  for (long l = 3; l <= 9; ++l) {
    // A_{2l-1}^(2): nodes 0,1 fork onto 2, then path, double edge at far end
    long nodes = l + 1;
    IMat a(nodes, std::vector<long>(nodes, 0));
    for (long i = 0; i < nodes; ++i) a[i][i] = 2;
    a[0][2] = a[2][0] = -1;
    a[1][2] = a[2][1] = -1;
    for (long i = 2; i + 1 < nodes; ++i) {
      a[i][i + 1] = -1;
      a[i + 1][i] = -1;
    }
    a[nodes - 2][nodes - 1] = -2;
    a[nodes - 1][nodes - 2] = -1;
    c.push_back({"A" + std::to_string(2 * l - 1) + "^(2)", a});
  }
  for (long l = 2; l <= 9; ++l)  // D_{l+1}^(2): marks all 1
    c.push_back({"D" + std::to_string(l + 1) + "^(2)",
                 path_with_ends(l + 1, -2, -1, -1, -2)});
  {
    IMat a = type_A(5);
    a[2][3] = -2;  // E6^(2): 0-1-2=>3-4
    c.push_back({"E6^(2)", a});
  }
  {
    IMat a = type_A(3);
    a[1][2] = -3;  // D4^(3)
    c.push_back({"D4^(3)", a});
  }
}

std::once_flag g_catalog_once;

void ensure_catalogs() {
  std::call_once(g_catalog_once, [] {
    build_finite_catalog();
    build_affine_catalog();
  });
}

}  // namespace

const std::vector<CatalogEntry>& finite_catalog() {
  ensure_catalogs();
  return g_finite_catalog;
}

const std::vector<CatalogEntry>& affine_catalog() {
  ensure_catalogs();
  return g_affine_catalog;
}

std::optional<IMat> finite_matrix_for(const std::string& label) {
  for (const auto& e : finite_catalog())
    if (e.label == label) return e.matrix;
  return std::nullopt;
}

namespace {

bool extend_perm(const IMat& a, const IMat& b, std::vector<long>& p,
                 std::vector<bool>& used, long i) {
  const long n = (long)a.size();
  if (i == n) return true;
  for (long j = 0; j < n; ++j) {
    if (used[j]) continue;
    bool ok = true;
    for (long k = 0; k < i && ok; ++k) {
      if (b[j][p[k]] != a[i][k] || b[p[k]][j] != a[k][i]) ok = false;
    }
    if (!ok) continue;
    p[i] = j;
    used[j] = true;
    if (extend_perm(a, b, p, used, i + 1)) return true;
    used[j] = false;
  }
  return false;
}

}  // namespace

std::optional<std::vector<long>> find_iso_perm(const IMat& a, const IMat& b) {
  if (a.size() != b.size()) return std::nullopt;
  const long n = (long)a.size();
  // quick invariant: multiset of sorted row/col off-diagonal multisets
  auto signature = [n](const IMat& m) {
    std::vector<std::vector<long>> sig;
    for (long i = 0; i < n; ++i) {
      std::vector<long> s;
      for (long j = 0; j < n; ++j) {
        if (i == j) continue;
        s.push_back(m[i][j]);
        s.push_back(m[j][i]);
      }
      std::sort(s.begin(), s.end());
      sig.push_back(s);
    }
    std::sort(sig.begin(), sig.end());
    return sig;
  };
  if (signature(a) != signature(b)) return std::nullopt;
  std::vector<long> p(n, -1);
  std::vector<bool> used(n, false);
  if (extend_perm(a, b, p, used, 0)) return p;
  return std::nullopt;
}

// ----- realization -----

Realization realization(const GCM& g) {
  const long n = g.n;
  // rank of A over Q
  Mat am(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) am.at(i, j) = CycNum(rat(g.a[i][j]));
  const long r = rank_of(am);
  Realization re;
  re.n = n;
  re.corank = n - r;
  re.dim = n + re.corank;
  // greedy: pick columns j where appending the dual covector keeps the alpha
  // family independent; equivalently rows e_j independent from rowspace(A^T)
  {
    Mat probe(n, 0);
    std::vector<std::vector<long>> rows;  // accumulated covector rows on h'
    for (long i = 0; i < n; ++i) {
      std::vector<long> row(n);
      for (long k = 0; k < n; ++k) row[k] = g.a[k][i];  // alpha_i(e_k) = a[k][i]
      rows.push_back(row);
    }
    auto rank_with = [&](const std::vector<long>& extra_dual) {
      Mat m(n, n + (long)extra_dual.size());
      for (long i = 0; i < n; ++i) {
        for (long k = 0; k < n; ++k) m.at(i, k) = CycNum(rat(rows[i][k]));
        for (size_t t = 0; t < extra_dual.size(); ++t)
          m.at(i, n + (long)t) = CycNum(rat(i == extra_dual[t] ? 1 : 0));
      }
      return rank_of(m);
    };
    std::vector<long> chosen;
    for (long j = 0; j < n && (long)chosen.size() < re.corank; ++j) {
      std::vector<long> cand = chosen;
      cand.push_back(j);
      if (rank_with(cand) > rank_with(chosen)) chosen = cand;
    }
    require((long)chosen.size() == re.corank, "InternalError",
            "could not complete realization");
    re.dual_idx = chosen;
  }
  re.alpha.assign(n, std::vector<long>(re.dim, 0));
  for (long j = 0; j < n; ++j) {
    for (long i = 0; i < n; ++i) re.alpha[j][i] = g.a[i][j];
    for (long k = 0; k < re.corank; ++k)
      re.alpha[j][n + k] = (j == re.dual_idx[k]) ? 1 : 0;
  }
  // center: nullspace of alpha over Q
  Mat al(n, re.dim);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < re.dim; ++j) al.at(i, j) = CycNum(rat(re.alpha[i][j]));
  for (const auto& v : nullspace(al)) {
    std::vector<Rat> w(re.dim);
    for (long i = 0; i < re.dim; ++i) w[i] = v[i].to_rational();
    re.center.push_back(std::move(w));
  }
  return re;
}

}  // namespace loopiso
