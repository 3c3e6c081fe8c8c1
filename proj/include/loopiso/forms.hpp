#pragma once

#include <utility>
#include <vector>

#include "loopiso/autos.hpp"
#include "loopiso/liealg.hpp"

namespace loopiso {

// One automorphism of g(S) of the shape (base word) tensor (z-twist power).
// The twist exponent s stands for z -> zeta_m^s z, so the pair acts on
// x tensor z^j as zeta_m^(s*j) * (word x) tensor z^j.
struct FormAut {
  AutWord word;
  long twist = 0;
};

// Z/m-indexed family of FormAut values over a fixed base algebra. Values of
// this shape commute with the semilinear degree rotation, so the group acts
// trivially on them and the cocycle identity reduces to products.
struct Cocycle {
  LiePtr base;
  long m = 1;
  std::vector<FormAut> values;  // indexed by residue
};

// u_i = (w^-i, 0). Errors NotPeriod unless w has period dividing m on base.
Cocycle loop_cocycle(const LiePtr& base, const AutWord& w, long m);

// Exhaustive check of u_(i+j) = u_i * u_j over all residue pairs: twist
// exponents add mod m and word parts multiply, compared as matrices when the
// words evaluate on the model and symbolically otherwise.
bool check_cocycle(const Cocycle& u);

// Graded subspace of base tensor k[z,1/z], one basis per degree in
// [-window, window].
struct GradedForm {
  LiePtr base;
  long m = 1;
  long window = 0;
  std::vector<std::vector<CycVec>> comps;  // index deg + window

  long comp_dim(long deg) const;
};

// Fixed points of the u-twisted action on L tensor z-powers: x at degree j
// survives iff eval(u_1 word) x = zeta_m^(-j(1+s_1)) x. For u = loop_cocycle
// of w this matches build_loop(base, w, m) degree by degree.
GradedForm fixed_form(const Cocycle& u, const LiePtr& L, long window = -1);

// Does f turn u into v, i.e. v_i = f^-1 u_i f for every residue, compared
// degreewise on the whole of L tensor z-powers. False on shape mismatch.
bool cohomologous_witness_check(const Cocycle& u, const Cocycle& v,
                                const FormAut& f);

// Group action on the coefficient module M = Hom(h''(S), c(S)) of an affine
// base, truncated to degrees [-window, window]. The generator sends the
// degree-s line to itself scaled by (beta/lam) * zeta_m^((1+s_1) s), where
// lam and beta are the scalars of the u_1 word on the center line and on
// h/h' respectively.
struct TwistedAction {
  Cocycle u;
  long window = 0;
  CycNum lam, beta;
  Mat action;  // on the degree basis, index deg + window
};

// Errors TrivialModule unless the base of u is a single affine model.
TwistedAction twist_action(const Cocycle& u, long window = -1);

// dim Z^1 - dim B^1 for the cyclic group acting through t.action; zero means
// every cocycle with values in the module is a coboundary. Errors
// WindowNotStable when the action fails to close on the truncation.
long h1_vanishing_check(const TwistedAction& t);

}  // namespace loopiso
