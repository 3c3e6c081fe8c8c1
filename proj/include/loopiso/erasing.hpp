#pragma once

#include <vector>

#include "loopiso/autos.hpp"
#include "loopiso/liealg.hpp"
#include "loopiso/loop.hpp"

namespace loopiso {

// Integer data behind the degree-shift automorphism erasing a diagonal
// twist. The covectors live on the root lattice and satisfy
// b(tau_hat - id) + c = d a and c(tau_hat - id) = 0 exactly.
struct ErasingData {
  long d = 1;  // period of tau_hat
  long m = 1;
  std::vector<long> a, b, c;  // values on the simple roots
  IMat tau_hat;
};

// Coefficients of sum_{i=0}^{d-2} (d-i-1) x^i, ascending; empty when d = 1.
// The identity g(x)(x-1)^2 = x^d - dx + d-1 is re-checked on every call.
std::vector<long> gd_polynomial(long d);

// b = -a g(tau_hat), c = da - b(tau_hat - id), both verified. Errors
// NotFiniteOrder when tau_hat has no period up to 512.
ErasingData erasing_data(const IMat& tau_hat, const std::vector<long>& a,
                         long m);

// The map x_alpha tensor z^i -> zeta_dm^b(alpha) x_alpha tensor z^(i+c(alpha))
// on the whole of g tensor k[z,1/z], truncated and fully verified. The source
// window defaults to 2dm+4; the target window absorbs the degree shifts.
// rho is the diagonal twist scaling the alpha_j root space by zeta_m^a[j].
// Errors NotGradingCompatible, NotCommuting (a tau_hat != a mod m), NotPeriod.
LoopMap erasing_iso(const LiePtr& L, const AutWord& tau,
                    const std::vector<long>& a, long m, long window = -1);

// Exhaustive in-window check that phi (tau x rot^-1) = (tau rho x rot^-1) phi
// on basis elements, where rot(z) = zeta_dm z.
bool verify_conj(const LoopMap& phi, const AutWord& tau,
                 const std::vector<long>& a, long m);

}  // namespace loopiso
