#ifndef PEXIDER_FAMILIES_HPP
#define PEXIDER_FAMILIES_HPP

#include <optional>
#include <string>

#include "pexider/fn1d.hpp"
#include "pexider/geometry.hpp"

namespace pexider {

enum class Regime { Affine, PartiallyAffine, NowhereAffine };

std::string regime_name(Regime r);

/// A full candidate for F((x+y)/2) + f1(x) + f2(y) = G(g1(x) + g2(y)):
/// the six functions, the base interval, and the sumset G lives on.
struct SolutionTuple {
    OpenInterval I;
    Fn1D F, f1, f2, g1, g2;
    OpenInterval g_domain;  // = g1(I)+g2(I), the domain of G
    Fn1D G;
    Regime regime;
};

// ---------------------------------------------------------------------------
// Globally affine family: F = A x + alpha free affine, g1, g2 free monotone
// (same sense), G = B u + beta, f_k = -F/2 + B g_k + beta_k.
// Additive parts are represented by their (linear) slopes throughout.
// ---------------------------------------------------------------------------

struct AffineParams {
    OpenInterval I;
    double A = 0.0;      // slope of F
    double alpha = 0.0;  // intercept of F
    double B = 0.0;      // linear part shared by f_k and G
    double beta1 = 0.0;
    double beta2 = 0.0;
    Fn1D g1, g2;  // free, strictly monotone in the same sense on I
};

SolutionTuple build_affine(const AffineParams& p);

// ---------------------------------------------------------------------------
// Partially affine family.  K = I ∩ [k_lo, k_hi] is closed in I with positive
// length, K != I.  F is affine on K̄ = ½(K+I) and free (caller stubs) outside;
// g_k are affine with slopes D∓ on K∓ and free monotone on K; f_k and G are
// determined, subject to the constraint set
//     D^- D^+ != 0,   C^± + A/2 = B D^±,   γ_k^± + α/2 = B δ_k^± + β_k.
// ---------------------------------------------------------------------------

struct PartiallyAffineParams {
    PartiallyAffineParams(OpenInterval I_, double k_lo_, double k_hi_)
        : I(I_), k_lo(k_lo_), k_hi(k_hi_) {}

    OpenInterval I;
    double k_lo, k_hi;  // K = I ∩ [k_lo, k_hi]

    double A = 0.0, B = 0.0, alpha = 0.0;
    double beta1 = 0.0, beta2 = 0.0;
    double C_minus = 0.0, C_plus = 0.0;
    double D_minus = 1.0, D_plus = 1.0;
    double gamma1_minus = 0.0, gamma2_minus = 0.0;
    double gamma1_plus = 0.0, gamma2_plus = 0.0;
    double delta1_minus = 0.0, delta2_minus = 0.0;
    double delta1_plus = 0.0, delta2_plus = 0.0;

    // Optional nonaffine parts.  When omitted, canonical quadratic (one-sided)
    // or Hermite-cubic (two-sided) stubs meeting the affine parts C^1 at the
    // junctions are used.
    std::optional<Fn1D> F_stub_left;   // on ]inf I, inf K̄]
    std::optional<Fn1D> F_stub_right;  // on [sup K̄, sup I[
    std::optional<Fn1D> g1_stub;       // on K
    std::optional<Fn1D> g2_stub;       // on K

    bool has_minus_side() const { return k_lo - I.lo > kEndpointSlack; }
    bool has_plus_side() const { return I.hi - k_hi > kEndpointSlack; }
};

SolutionTuple build_partially_affine(const PartiallyAffineParams& p);

/// The hard-coded exactly-once-differentiable example tuple on ]0,4[
/// (G lives on ]0,10[).
SolutionTuple paper_example();

/// The constants that generate paper_example() through build_partially_affine.
PartiallyAffineParams paper_example_params();

// ---------------------------------------------------------------------------
// Auxiliary profile quintuple (φ, ψ1, ψ2, Ψ1, Ψ2) solving
//   φ((x+y)/2)(ψ1(x) + ψ1(y)) = Ψ1(x) + Ψ1(y)
//   φ((x+y)/2)(ψ2(x) - ψ2(y)) = Ψ2(x) - Ψ2(y)
// in one of the seven canonical cases; κ = sqrt(|γ|) and Ψ1 = φ·ψ1 always.
// ---------------------------------------------------------------------------

enum class AuxCase {
    TrigFraction,        // γ < 0, ψ1 nonvanishing
    LinearFraction,      // γ = 0, ψ1 nonvanishing
    HyperbolicFraction,  // γ > 0, ψ1 nonvanishing
    ConstantPair,        // ψ1 = 0, ψ2 = a, Ψ2 = b, φ arbitrary (supplied)
    TrigFractionZero,    // γ < 0, ψ1 = 0
    LinearFractionZero,  // γ = 0, ψ1 = 0
    HyperbolicFractionZero,
};

std::string aux_case_name(AuxCase c);

struct AuxProfiles {
    AuxCase kase;
    double a = 0, b = 0, c = 0, d = 0;
    double gamma = 0, lambda = 0, nu = 0;
    double kappa = 0;
    OpenInterval I;
    Fn1D phi, psi1, psi2, Psi1, Psi2;
};

/// Builds the case's quintuple; `phi_override` is required (and only used) by
/// ConstantPair.  Fraction denominators are vetted by dense sampling.
AuxProfiles aux_profiles(AuxCase kase, double a, double b, double c, double d, double gamma,
                         double lambda, double nu, const OpenInterval& I,
                         std::optional<Fn1D> phi_override = std::nullopt);

/// Integration constants: each reconstructed function is pinned to a value at x0.
struct Anchors {
    double x0;
    double F0 = 0, f10 = 0, f20 = 0, g10 = 0, g20 = 0;
};

/// Midpoint-anchored all-zero anchors.
Anchors default_anchors(const OpenInterval& I);

struct Reconstructed {
    Fn1D F, f1, f2, g1, g2;
};

/// Integrates F' = 2φ, g_k' = 2/(ψ2 - (-1)^k ψ1),
/// f_k' = -(Ψ2 - (-1)^k Ψ1)/(ψ2 - (-1)^k ψ1), each pinned at the anchors.
/// Raises RegimeError when a g_k' changes sign.
Reconstructed reconstruct_from_profiles(const AuxProfiles& p, const Anchors& anchors, double tol);

/// Recovers G on the sumset from the main equation: G(u) = (F+f1+f2)(t) with
/// g1(t)+g2(t) = u; memoized on a monotone-cubic grid refined until the
/// interpolation error estimate is below tol.
Fn1D solve_for_G(const Fn1D& F, const Fn1D& f1, const Fn1D& f2, const Fn1D& g1, const Fn1D& g2,
                 double tol);

/// reconstruct_from_profiles + solve_for_G packaged as a SolutionTuple.
SolutionTuple assemble_nowhere_affine(const AuxProfiles& p, const Anchors& anchors, double tol);

}  // namespace pexider

#endif
