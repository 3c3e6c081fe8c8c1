#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loopiso/linalg.hpp"

namespace loopiso {

// Validated symmetrizable generalized Cartan matrix, indecomposable.
struct GCM {
  long n = 0;
  IMat a;                 // n x n
  std::vector<long> eps;  // symmetrizer: eps[j]*a[i][j] == eps[i]*a[j][i],
                          // smallest positive integers
  bool operator==(const GCM& o) const { return a == o.a; }
};

// Throws Error("InvalidGCM", ...) on any axiom violation.
GCM gcm_validate(const IMat& a);

enum class KacType { Finite, Affine, Indefinite };

struct ClassifyResult {
  KacType type;
  std::string label;  // catalog label when matched, "" otherwise
  long corank;        // of the symmetrized form
};

ClassifyResult classify(const GCM& g);

const char* kac_type_name(KacType t);

// Symmetric bilinear form on simple roots: (alpha_i, alpha_j) = a[i][j]/eps[i].
std::vector<std::vector<Rat>> root_form(const GCM& g);

// ----- root systems (finite type) -----

// All positive roots as coordinate vectors over the simple roots, sorted by
// height then lexicographically. Requires finite type.
std::vector<std::vector<long>> positive_roots(const GCM& g);

long root_height(const std::vector<long>& r);

// Pairing alpha(beta_vee) = sum_j k_j * a[i][j] ... for alpha = sum k_j alpha_j
// against the i-th simple coroot.
long pair_with_simple_coroot(const GCM& g, const std::vector<long>& alpha, long i);

// Coroot coordinates of root alpha over the simple coroots (always integral
// for finite type).
std::vector<long> coroot_coords(const GCM& g, const std::vector<long>& alpha);

// (alpha, beta) under root_form, for roots in simple-root coordinates.
Rat root_inner(const GCM& g, const std::vector<long>& x, const std::vector<long>& y);

// Highest root (finite type).
std::vector<long> highest_root(const GCM& g);

// ----- catalogs and labels -----

struct CatalogEntry {
  std::string label;
  IMat matrix;
};

const std::vector<CatalogEntry>& finite_catalog();  // ranks 1..10
const std::vector<CatalogEntry>& affine_catalog();  // up to 11 nodes

// Permutation p with b[p[i]][p[j]] == a[i][j], if the matrices are isomorphic.
std::optional<std::vector<long>> find_iso_perm(const IMat& a, const IMat& b);

// Catalog matrix for a finite label like "A3", "D4", "G2".
std::optional<IMat> finite_matrix_for(const std::string& label);

// ----- realization -----

// h = Q^(n+corank): coroot i = basis vector e_i, plus corank extra basis
// vectors ("scaling elements") dual to the simple roots listed in dual_idx.
struct Realization {
  long n = 0;
  long corank = 0;
  long dim = 0;               // n + corank
  std::vector<long> dual_idx; // which alpha_j each extra vector is dual to
  IMat alpha;                 // n rows, dim cols: alpha[j] as a covector
  std::vector<std::vector<Rat>> center;  // basis of {h : alpha_i(h)=0 for all i}
};

Realization realization(const GCM& g);

}  // namespace loopiso
