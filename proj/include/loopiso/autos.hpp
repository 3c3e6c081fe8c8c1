#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "loopiso/liealg.hpp"

namespace loopiso {

// ----- automorphism words -----
//
// Automorphisms enter the engine only as words in four generator kinds.
// Keeping the word around (instead of just a matrix) is what makes the
// outer-class projection computable.

struct GenDiagram {
  std::vector<long> perm;  // 0-based node permutation, a GCM automorphism
};
struct GenOmega {};  // e_i -> -f_i, f_i -> -e_i, h -> -h
struct GenAdR {
  std::vector<long> exps;  // one exponent per node
  long modulus = 1;        // scales the alpha_j root space by zeta_modulus^exps[j]
};
struct GenElementary {
  std::vector<long> root;  // real root, signed simple-root coordinates
  CycNum coeff;
};

using AutGen = std::variant<GenDiagram, GenOmega, GenAdR, GenElementary>;

struct AutWord {
  std::vector<AutGen> gens;  // leftmost factor acts last
};

AutWord word_concat(const AutWord& a, const AutWord& b);
AutWord word_inverse(const AutWord& w);
AutWord word_power(const AutWord& w, long k);  // k may be negative
bool word_grading_compatible(const AutWord& w);  // no elementary factors

// ----- permutation utilities -----

std::vector<long> perm_identity(long n);
std::vector<long> perm_compose(const std::vector<long>& a,
                               const std::vector<long>& b);  // i -> a[b[i]]
std::vector<long> perm_inverse(const std::vector<long>& p);
long perm_order(const std::vector<long>& p);
bool is_gcm_automorphism(const GCM& g, const std::vector<long>& perm);

// All node permutations preserving the GCM (backtracking search).
std::vector<std::vector<long>> diagram_automorphism_group(const GCM& g);

// Diagram permutation realizing the outer class of the Chevalley involution
// in finite type (the negative of the longest Weyl element on simple roots).
std::vector<long> omega_outer_perm(const GCM& g);

// ----- outer automorphism group -----

struct OutElement {
  bool omega_flag = false;   // always false for finite type
  std::vector<long> perm;    // element of Aut(A)
  bool operator==(const OutElement& o) const {
    return omega_flag == o.omega_flag && perm == o.perm;
  }
};

class OutGroup {
public:
  GCM gcm;
  bool finite_type = false;
  std::vector<std::vector<long>> diagram_autos;
  std::vector<OutElement> elements;
  std::vector<long> omega_perm;  // folded involution class (finite type)

  OutElement identity() const;
  OutElement mul(const OutElement& a, const OutElement& b) const;
  OutElement inv(const OutElement& a) const;
  // some g in the group with g a g^-1 == b
  std::optional<OutElement> conjugator(const OutElement& a, const OutElement& b) const;
  bool contains(const OutElement& a) const;
  // folds omega into its diagram class on finite type
  OutElement normalize(bool omega_flag, const std::vector<long>& perm) const;
};

OutGroup out_group(const GCM& g);

// Projection of a word to its outer class: elementary and diagonal factors
// drop, diagram factors keep their permutation, omega contributes its class.
OutElement outer_class(const AutWord& w, const OutGroup& G);

// mu1 conjugate to mu2 or to mu2^-1 in G
bool conjugate_up_to_inverse(const OutElement& mu1, const OutElement& mu2,
                             const OutGroup& G);

// ----- symbolic form of grading-compatible automorphisms -----
//
// A word without elementary factors acts monomially: each e_i goes to a
// scalar multiple of some e_j or f_j, and h maps to h. That data determines
// the automorphism, so periods and equality are decidable without any
// window truncation (needed for affine models where node-moving diagram
// automorphisms shift loop degrees).

struct MonomialAut {
  long n = 0;            // number of nodes
  bool swap_ef = false;  // e_i -> scale * f_{perm[i]} when set
  std::vector<long> perm;
  CycVec escale, fscale;
  Mat hmat;  // action on the realization basis: coroots, then d for affine

  bool is_identity() const;
  bool operator==(const MonomialAut& o) const;
};

MonomialAut monomial_identity(const LieAlgebra& L);
MonomialAut monomial_compose(const MonomialAut& a, const MonomialAut& b);
// Errors NotGradingCompatible on elementary factors.
MonomialAut monomial_eval(const AutWord& w, const LieAlgebra& L);
// Least k <= max_m with the k-th power trivial; errors PeriodExceeded.
long monomial_period(const MonomialAut& a, long max_m);

// Induced map on the root lattice: column i is the image of alpha_i.
IMat root_lattice_matrix(const MonomialAut& a);

// ----- matrix evaluation -----

struct AutMatrix {
  Mat mat;
  long order_bound = 0;  // verified period when nonzero
};

// Exact matrix of the word on the model basis. Every generator matrix is
// verified to preserve brackets on all defined basis pairs.
// Errors: NonNilpotent (elementary on a non-real root), WindowOverflow
// (affine images escape the truncation), Unsupported (node-moving diagram
// factor on a twisted loop model).
AutMatrix eval_word(const AutWord& w, const LiePtr& L);

// Least m <= max_m with M^m = id; errors PeriodExceeded.
long period(const Mat& m, long max_m);

// Decomposition into zeta_m^i eigenspaces; entries are (i, basis).
// Requires M^m = id (checked: dimensions must sum to dim).
std::vector<std::pair<long, std::vector<CycVec>>> eigenspaces(const Mat& m,
                                                              long mod);

// d -> d + mu*c on an affine model, fixing everything else.
// Errors WrongType on finite models.
Mat derivation_shift(const LieAlgebra& L, const CycNum& mu);

// Bracket-preservation check on all defined basis pairs.
bool is_bracket_automorphism(const LieAlgebra& L, const Mat& m);

}  // namespace loopiso
