#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "loopiso/autos.hpp"
#include "loopiso/liealg.hpp"

namespace loopiso {

// Element of a twisted loop algebra: degree -> coordinate vector in the
// base algebra's basis. The vector at degree i must lie in the degree-i
// component; helpers keep entries trimmed of zero vectors.
using LoopElt = std::map<long, CycVec>;

// Twisted loop algebra, graded model over the degree window [-W, W].
// The degree-i component is the zeta_m^i-eigenspace of sigma; degrees that
// agree mod m share one stored eigenbasis, so multiplication by t = z^m is
// the identity on component coordinates.
struct LoopAlgebra {
  LiePtr base;
  AutWord sigma_word;
  Mat sigma_mat;
  long m = 1;
  long window = 0;

  // per residue 0..m-1: eigenbasis (base coordinates) and eigenvalue
  std::vector<std::vector<CycVec>> resid_basis;
  std::vector<CycNum> resid_eig;

  // coordinate solver per residue: row subset making the basis square,
  // plus the inverse of that square block
  std::vector<std::vector<long>> resid_rows;
  std::vector<Mat> resid_inv;

  // flattened indexing over the window, degree-major
  std::vector<long> flat_off;  // per degree index (deg + window)
  long flat_dim = 0;

  long residue(long deg) const { return ((deg % m) + m) % m; }
  bool in_window(long deg) const { return deg >= -window && deg <= window; }
  const std::vector<CycVec>& comp(long deg) const {
    return resid_basis[residue(deg)];
  }
  long comp_dim(long deg) const { return (long)comp(deg).size(); }
  long flat_index(long deg, long k) const {
    return flat_off[deg + window] + k;
  }

  // coordinates of v in the degree-deg component basis; nullopt if v is
  // not in that eigenspace
  std::optional<CycVec> comp_coords(long deg, const CycVec& v) const;
  CycVec comp_embed(long deg, const CycVec& coords) const;

  // bracket of component basis vectors in component coordinates of the
  // target residue; cached by residues
  const CycVec& comp_bracket(long dp, long a, long dq, long b) const;

  mutable std::map<std::array<long, 4>, CycVec> bk_cache;
};

using LoopPtr = std::shared_ptr<const LoopAlgebra>;

// window <= 0 picks the default 2m+4.
// Errors: NotPeriod (eval(w)^m != id or m < 1).
LoopPtr build_loop(const LiePtr& base, const AutWord& w, long m,
                   long window = -1);

// ----- element helpers -----

void loop_elt_trim(LoopElt& x);
LoopElt loop_elt_add(const LoopElt& x, const LoopElt& y);
LoopElt loop_elt_scale(const LoopElt& x, const CycNum& c);
LoopElt loop_elt_shift(const LoopElt& x, long delta);
bool loop_elt_eq(const LoopElt& x, const LoopElt& y);
LoopElt basis_elt(const LoopAlgebra& L, long deg, long k);

// All degrees in window and every vector inside its component.
bool loop_membership(const LoopAlgebra& L, const LoopElt& x);

// [x z^i, y z^j] = [x,y] z^(i+j). Errors: WindowOverflow when a nonzero
// component pair lands outside the window.
LoopElt loop_bracket(const LoopAlgebra& L, const LoopElt& x, const LoopElt& y);

// ----- maps between loop algebras -----

// Map determined by images of the graded basis; images[deg+W][k] is the
// image of basis vector k at degree deg. The induced map on the centroid
// ring is t -> scalar * t^tsign, declared on construction and verified.
struct LoopMap {
  LoopPtr source, target;
  std::vector<std::vector<LoopElt>> images;
  CycNum scalar;
  int tsign = 1;
};

// Verifies membership of images, the declared semilinearity, and bracket
// preservation on every in-window pair (pairs whose target brackets leave
// the window are skipped). Errors: VerifyFailed.
LoopMap make_loop_map(LoopPtr source, LoopPtr target,
                      std::vector<std::vector<LoopElt>> images, CycNum scalar,
                      int tsign);

// Errors: NotMember when x is not in the source.
LoopElt apply_loop_map(const LoopMap& f, const LoopElt& x);

// psi after phi; sources/targets must agree structurally.
LoopMap compose_loop_maps(const LoopMap& psi, const LoopMap& phi);

// L_d(g,sigma) -> L_m(g,sigma), x z^j -> x z^(ej), e = m/d; R-linear.
// src_window <= 0 picks 2d+4; the target window is stretched to cover the
// image. Errors: NotDivisor, NotPeriod.
LoopMap period_change_iso(const LiePtr& base, const AutWord& w, long d, long m,
                          long src_window = -1);

// x z^i -> x z^(-i) onto L(g, sigma^(-1)); t -> t^(-1).
LoopMap inverse_iso(const LoopPtr& L);

// x z^i -> tau(x) z^i onto L(g, tau sigma tau^(-1)); R-linear.
LoopMap conjugation_iso(const LoopPtr& L, const AutWord& tau);

// Self-map x z^i -> b^i x z^i; t -> b^m t.
LoopMap scaling_iso(const LoopPtr& L, const CycNum& b);

// ----- centroid -----

// One graded centroid element of shift s: source degree -> matrix from the
// degree-q component to the degree-(q+s) component, component coordinates.
using CentroidMap = std::map<long, Mat>;

// For each shift s in [-degree_window, degree_window], a basis of the
// space of graded maps with chi([x,y]) = [x, chi(y)] on all in-window
// pairs. Expected dimension: 1 when m | s, else 0.
// Errors: WrongType (base not finite type).
std::map<long, std::vector<CentroidMap>> loop_centroid(const LoopPtr& L,
                                                       long degree_window);

LoopElt centroid_apply(const LoopAlgebra& L, long shift, const CentroidMap& cm,
                       const LoopElt& x);

// ----- induced automorphism of R and normalization -----

struct InducedAut {
  CycNum scalar;
  int tsign = 1;  // t -> scalar * t^tsign
};

// Recovers the induced map on R by comparing the images of t*x and t^(+-1)
// applied to the image of x across the window. Errors: NotSemilinear.
InducedAut induced_base_aut(const LoopMap& f);

// Composes f with a degree reversal (if tsign is -1) and a scaling of z so
// the result is R-linear. Errors: NotSemilinear, NoRootAvailable.
LoopMap normalize_to_R_iso(const LoopMap& f);

// b with b^m = v inside the cyclotomic tower, when one exists among
// rational multiples of roots of unity.
std::optional<CycNum> mth_root_in_tower(const CycNum& v, long m);

}  // namespace loopiso
