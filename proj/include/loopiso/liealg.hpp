#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "loopiso/gcm.hpp"
#include "loopiso/linalg.hpp"

namespace loopiso {

// sparse vector in basis coordinates: (index, coefficient), index strictly increasing
using Sparse = std::vector<std::pair<long, CycNum>>;

CycVec sparse_to_dense(const Sparse& s, long dim);
Sparse dense_to_sparse(const CycVec& v);

// A concrete Lie algebra over the cyclotomic tower with a distinguished basis.
//
// Finite type: Chevalley basis (coroots h_1..h_n, then for each positive root
// in height/lex order the pair e_alpha, e_-alpha). Structure constants are
// integers with the extraspecial-pair sign convention for the total order
// (height, then lex).
//
// Affine type: loop model of the derived algebra truncated to z-degrees in
// [-window, window], plus the canonical central element c and the degree
// derivation d. Basis vectors at degree t are eigenvectors of the base
// diagram twist with eigenvalue zeta_r^t, stored in base coordinates.
class LieAlgebra {
public:
  GCM gcm;
  KacType type = KacType::Finite;
  std::string label;

  long dim = 0;
  std::vector<std::string> sym;  // stable basis symbols

  // finite-type layout
  std::vector<std::vector<long>> proots;
  std::map<std::vector<long>, long> pos_of;  // positive root -> position
  long cartan_index(long i) const { return i; }
  long root_index(const std::vector<long>& alpha) const;  // signed root
  std::vector<long> root_of_index(long idx) const;        // pre: root vector

  // generators as coordinate vectors (one per GCM node)
  std::vector<CycVec> gen_e, gen_f, gen_h;
  std::vector<long> gen_deg;  // z-degree of gen_e[i] (affine), zeros otherwise

  // simple roots as functionals on the model: value of alpha_i on each basis
  // vector that lies in h (other indices are zero-filled); for affine models
  // the h block is (degree-0 Cartan) + c + d.
  std::vector<CycVec> alpha_fun;

  // affine extras
  std::shared_ptr<LieAlgebra> base;  // finite base of the loop model
  long twist_order = 1;              // r
  long window = 0;                   // D
  long c_index = -1, d_index = -1;
  Mat nu;                 // base diagram twist (dim_base x dim_base), r>=1
  Mat eigen_cols;         // base-dim columns: all eigenvectors, by residue
  Mat eigen_cols_inv;
  std::vector<std::vector<long>> eigen_of_residue;  // residue -> column indices
  // model bookkeeping: for loop indices, (degree, eigencolumn)
  std::vector<long> z_deg;      // per basis index (0 for c; 0 for d)
  std::vector<long> eigcol;     // per basis index; -1 for c, d and finite
  std::map<std::pair<long, long>, long> loop_index;  // (deg, eigcol) -> index
  Mat norm_form_base;  // invariant form on base scaled so (theta,theta)=2

  // weights: finite-part weight of each basis vector over the base simple
  // roots (zero vector for Cartan/c/d), used for root-lattice gradings
  std::vector<std::vector<long>> weight;

  // bracket of basis elements; throws WindowOverflow at affine window edges
  Sparse bracket_basis(long i, long j) const;
  CycVec bracket(const CycVec& x, const CycVec& y) const;
  bool bracket_defined(long i, long j) const;  // in-window test

  // direct sum support (block algebras built by direct_sum)
  bool is_sum = false;

  // internal: structure constant table keyed by i*dim+j with i<j
  // (eager for finite models and sums, lazy cache for affine models)
  mutable std::map<long, Sparse> table;
};

using LiePtr = std::shared_ptr<LieAlgebra>;

LiePtr build_finite(const GCM& g);
LiePtr build_finite(const std::string& catalog_label);

// window: truncation depth D (z-degrees in [-D, D]); default 8
LiePtr build_affine(const GCM& g, long window = 8);

LiePtr direct_sum(const LiePtr& a, const LiePtr& b);

// Extends the node permutation perm (nu(e_i) = e_perm[i]) to the whole
// finite algebra; returns the matrix in basis coordinates.
Mat diagram_automorphism_matrix(const LieAlgebra& L, const std::vector<long>& perm);

// The order-2 involution e_i -> -f_i, f_i -> -e_i, h -> -h (finite type).
Mat chevalley_involution_matrix(const LieAlgebra& L);

// span of all in-window brackets, and the in-window graded centre
struct DerivedCenter {
  std::vector<CycVec> derived;
  std::vector<CycVec> center;
};
DerivedCenter derived_and_center(const LieAlgebra& L);

// k-linear maps chi with chi([x,y]) = [x, chi(y)] for all basis pairs.
// Finite models and direct sums only.
std::vector<Mat> centroid_of(const LieAlgebra& L);

// Invariant symmetric bilinear form with (alpha_i_vee, h) = eps_i alpha_i(h)
// and (h'', h'') = 0; returns the Gram matrix over the model basis.
Mat invariant_form(const LieAlgebra& L);

// Chevalley structure constant N_{alpha,beta} for the finite root system,
// 0 when alpha+beta is not a root. Roots in simple-root coordinates.
Rat chevalley_constant(const LieAlgebra& L, const std::vector<long>& a,
                       const std::vector<long>& b);

// Root-string length p = max{k : beta - k*alpha is a root}.
long string_down_length(const LieAlgebra& L, const std::vector<long>& alpha,
                        const std::vector<long>& beta);

}  // namespace loopiso
