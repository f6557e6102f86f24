#ifndef PEXIDER_VERIFY_HPP
#define PEXIDER_VERIFY_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pexider/families.hpp"

namespace pexider {

/// Lightweight evaluatable view used where any callable will do.
struct ScalarFn {
    OpenInterval domain;
    std::function<double(double)> f;

    ScalarFn(OpenInterval dom, std::function<double(double)> fn)
        : domain(dom), f(std::move(fn)) {}
    ScalarFn(const Fn1D& fn)  // NOLINT(google-explicit-constructor)
        : domain(fn.domain()), f([fn](double x) { return fn.eval_inner(x); }) {}
    double operator()(double x) const { return f(x); }
};

struct ResidualReport {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    std::pair<double, double> worst = {0.0, 0.0};
    long samples = 0;
    int n = 0;
    double margin = 0.0;
};

/// Max/mean of |F((x+y)/2)+f1(x)+f2(y) - G(g1(x)+g2(y))| on the n x n uniform
/// grid over the margin-shrunk square I x I.  With `stratified_seed` the grid
/// points are jittered within their cells (deterministic per seed), for use
/// when the worst-case location is suspected to dodge the uniform grid.
ResidualReport residual_main(const SolutionTuple& s, int n, double margin);
ResidualReport residual_main(const SolutionTuple& s, int n, double margin,
                             unsigned long long stratified_seed);

/// Max/mean of |φ((x+y)/2)(ψ1(x)-ψ2(y))| on the grid over I1 x I2.
ResidualReport residual_aux(const ScalarFn& phi, const ScalarFn& psi1, const ScalarFn& psi2,
                            const OpenInterval& I1, const OpenInterval& I2, int n, double margin);

/// Residuals of the two derivative-system equations on the grid over I x I.
std::pair<ResidualReport, ResidualReport> residual_system(const AuxProfiles& p, int n,
                                                          double margin);

struct ConstCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// Evaluates the constraint identities between the partially-affine constants;
/// identities tied to an absent side of K are skipped.  Report-only.
std::vector<ConstCheck> check_const(const PartiallyAffineParams& p);

struct AffineWindow {
    OpenInterval window;
    double slope = 0.0;
    double intercept = 0.0;
};

struct AffinityReport {
    std::vector<AffineWindow> intervals;  // disjoint, maximal, sorted
    double tol = 0.0;
    int n = 0;
    Regime verdict = Regime::NowhereAffine;
};

/// Samples F' on n points and segments it into maximal runs whose derivative
/// range stays within tol·(1+|median|); GloballyAffine when one run covers all
/// samples, NowhereAffine when no run exceeds 3 consecutive samples.
AffinityReport classify_affine_intervals(const Fn1D& F, double tol, int n);

// ---------------------------------------------------------------------------
// Canonical solutions of φ((x+y)/2)(ψ1(x) - ψ2(y)) = 0 on I1 x I2, one
// constructor per characterization case; residual_aux on the result is
// exactly zero.
// ---------------------------------------------------------------------------

struct AuxTripleSpec {
    int kase = 1;  // 1, 2, or 3
    OpenInterval I1{0, 1}, I2{0, 1};

    // case 1: either φ ≡ 0 (free ψ's) or ψ1 = ψ2 = D (free φ)
    bool phi_vanishes = true;
    double D = 0.0;
    std::optional<Fn1D> free_phi, free_psi1, free_psi2;

    // case 2: U_i = ]inf I_i, a_i[, V_i = ]b_i, sup I_i[, ψ = D on U1 x U2 and
    // E on V1 x V2, φ = 0 on ½(K1+I2) ∪ ½(I1+K2) with K_i = [a_i,b_i] ∩ I_i
    double a1 = 0, b1 = 0, a2 = 0, b2 = 0;
    double E = 0.0;

    // case 3: ψ_j ≡ D on I_j, ψ_i = D on the windows, φ = 0 on
    // ½((I_i \ ∪windows) + I_j)
    int j = 1;
    std::vector<OpenInterval> windows;

    // free values
    double filler_offset = 2.0;  // ψ value on unpinned regions = D + filler_offset
    double phi_value = 1.0;      // φ off its mandated zero set
};

struct AuxTriple {
    Fn1D phi, psi1, psi2;
    OpenInterval I1, I2;
};

AuxTriple aux_triple(const AuxTripleSpec& spec);

}  // namespace pexider

#endif
