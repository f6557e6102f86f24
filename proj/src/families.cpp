#include "pexider/families.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pexider/errors.hpp"
#include "pexider/verify.hpp"

namespace pexider {

namespace {

constexpr int kDenseSamples = 4096;  // denominator / nonvanishing vetting
constexpr double kJunctionTol = 1e-9;

void check_junction(const Fn1D& stub, double xj, double want_v, double want_d,
                    const std::string& what) {
    const double v = stub.eval_inner(xj);
    const double d = stub.deriv_inner(xj);
    if (std::fabs(v - want_v) > kJunctionTol * (1.0 + std::fabs(want_v)))
        throw ContinuityError(what + ": value " + std::to_string(v) + " != " +
                              std::to_string(want_v) + " at x=" + std::to_string(xj));
    if (std::fabs(d - want_d) > kJunctionTol * (1.0 + std::fabs(want_d)))
        throw ContinuityError(what + ": slope " + std::to_string(d) + " != " +
                              std::to_string(want_d) + " at x=" + std::to_string(xj));
}

void require_stub_domain(const Fn1D& stub, double lo, double hi, const std::string& what) {
    const double fuzz = 1e-9 * (1.0 + hi - lo);
    if (std::fabs(stub.domain().lo - lo) > fuzz || std::fabs(stub.domain().hi - hi) > fuzz)
        throw DomainError(what + " must live on ]" + std::to_string(lo) + "," +
                          std::to_string(hi) + "[, got " + stub.domain().str());
}

// Appends the stub's pieces with the outer endpoints snapped to [lo, hi].
void append_clipped(std::vector<Fn1D::Piece>& out, const Fn1D& stub, double lo, double hi) {
    auto ps = stub.pieces();
    ps.front().lo = lo;
    ps.back().hi = hi;
    for (auto& p : ps) out.push_back(std::move(p));
}

// A x + alpha + kf (x - xj)^2 as an explicit quadratic.
Fn1D poke_quadratic(double lo, double hi, double A, double alpha, double xj, double kf) {
    return Fn1D::quadratic(OpenInterval(lo, hi), kf, A - 2.0 * kf * xj,
                           alpha + kf * xj * xj);
}

// value + slope (x - xj) + kf (x - xj)^2.
Fn1D anchored_quadratic(double lo, double hi, double xj, double value, double slope, double kf) {
    return Fn1D::quadratic(OpenInterval(lo, hi), kf, slope - 2.0 * kf * xj,
                           value - slope * xj + kf * xj * xj);
}

// Coefficients of p(s x + t) from the coefficients of p.
std::vector<double> poly_compose_affine(const std::vector<double>& c, double s, double t) {
    std::vector<double> r{0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        // r = r*(s x + t) + coeff
        std::vector<double> next(r.size() + 1, 0.0);
        for (std::size_t i = 0; i < r.size(); ++i) {
            next[i] += r[i] * t;
            next[i + 1] += r[i] * s;
        }
        next[0] += *it;
        if (next.size() > 1 && next.back() == 0.0) next.pop_back();
        r = std::move(next);
    }
    return r;
}

// C^1 cubic through (a, v0) with slope d0 and (b, v1) with slope d1.
Fn1D hermite_cubic_fn(double a, double b, double v0, double v1, double d0, double d1) {
    const double h = b - a;
    const std::vector<double> in_t = {
        v0,
        h * d0,
        -3.0 * v0 + 3.0 * v1 - 2.0 * h * d0 - h * d1,
        2.0 * v0 - 2.0 * v1 + h * d0 + h * d1,
    };
    return Fn1D::closed_form(OpenInterval(a, b),
                             Expr::poly(poly_compose_affine(in_t, 1.0 / h, -a / h)));
}

void dense_nonvanishing(const ScalarFn& f, const OpenInterval& I, const std::string& what) {
    const double m = kImageMarginRel * I.length();
    double prev = 0.0;
    for (int i = 0; i < kDenseSamples; ++i) {
        const double t = static_cast<double>(i) / (kDenseSamples - 1);
        const double x = (I.lo + m) * (1.0 - t) + (I.hi - m) * t;
        const double v = f(x);
        if (!std::isfinite(v) || std::fabs(v) < 1e-12 || (i > 0 && (v > 0.0) != (prev > 0.0)))
            throw DomainError(what + " vanishes near x=" + std::to_string(x));
        prev = v;
    }
}

}  // namespace

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::Affine:
            return "globally-affine";
        case Regime::PartiallyAffine:
            return "partially-affine";
        case Regime::NowhereAffine:
            return "nowhere-affine";
    }
    return "?";
}

std::string aux_case_name(AuxCase c) {
    switch (c) {
        case AuxCase::TrigFraction:
            return "trig";
        case AuxCase::LinearFraction:
            return "linear";
        case AuxCase::HyperbolicFraction:
            return "hyperbolic";
        case AuxCase::ConstantPair:
            return "constant";
        case AuxCase::TrigFractionZero:
            return "trig-zero";
        case AuxCase::LinearFractionZero:
            return "linear-zero";
        case AuxCase::HyperbolicFractionZero:
            return "hyperbolic-zero";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// globally affine family
// ---------------------------------------------------------------------------

SolutionTuple build_affine(const AffineParams& p) {
    if (monotone_direction(p.g1) != monotone_direction(p.g2))
        throw MonotonicityError("g1 and g2 must be strictly monotone in the same sense");
    require_stub_domain(p.g1, p.I.lo, p.I.hi, "g1");
    require_stub_domain(p.g2, p.I.lo, p.I.hi, "g2");

    Fn1D F = Fn1D::affine(p.I, p.A, p.alpha);
    auto fk = [&](const Fn1D& g, double beta_k) {
        // f_k = -F/2 + B g_k + beta_k
        ExprPtr e = Expr::poly({beta_k - 0.5 * p.alpha, -0.5 * p.A}) + p.B * ex::fn(g.shared());
        return Fn1D::closed_form(p.I, std::move(e));
    };
    Fn1D f1 = fk(p.g1, p.beta1);
    Fn1D f2 = fk(p.g2, p.beta2);
    OpenInterval sumset = sumset_image(p.g1, p.g2, p.I, p.I);
    Fn1D G = Fn1D::affine(sumset, p.B, p.beta1 + p.beta2);
    return {p.I, std::move(F), std::move(f1), std::move(f2), p.g1, p.g2, sumset, std::move(G),
            Regime::Affine};
}

// ---------------------------------------------------------------------------
// partially affine family
// ---------------------------------------------------------------------------

SolutionTuple build_partially_affine(const PartiallyAffineParams& p) {
    const OpenInterval& I = p.I;
    if (!(p.k_lo < p.k_hi) || p.k_hi - p.k_lo <= kEndpointSlack)
        throw SpecError("K must have positive length");
    if (p.k_lo < I.lo - kEndpointSlack || p.k_hi > I.hi + kEndpointSlack)
        throw SpecError("K = [" + std::to_string(p.k_lo) + "," + std::to_string(p.k_hi) +
                        "] must lie inside I = " + I.str());
    const bool hasm = p.has_minus_side();
    const bool hasp = p.has_plus_side();
    if (!hasm && !hasp)
        throw SpecError("K equals I; this solution belongs to the globally affine family");

    for (const auto& c : check_const(p))
        if (!c.pass)
            throw ConstraintError(c.name, "lhs=" + std::to_string(c.lhs) +
                                              " rhs=" + std::to_string(c.rhs));

    const double k_lo = hasm ? p.k_lo : I.lo;
    const double k_hi = hasp ? p.k_hi : I.hi;
    const double len_k = k_hi - k_lo;
    const double m_minus = 0.5 * (I.lo + k_lo);  // inf of ½(K+I)
    const double m_plus = 0.5 * (I.hi + k_hi);   // sup of ½(K+I)
    const double beta = p.beta1 + p.beta2;
    const double gamma_minus = p.gamma1_minus + p.gamma2_minus;
    const double gamma_plus = p.gamma1_plus + p.gamma2_plus;
    const double delta_minus = p.delta1_minus + p.delta2_minus;
    const double delta_plus = p.delta1_plus + p.delta2_plus;

    // --- F: affine on ½(K+I), caller stubs (default: quadratic pokes) outside
    const double kf = (p.A != 0.0) ? 0.5 * std::fabs(p.A) : 1.0;
    std::vector<Fn1D::Piece> Fp;
    if (hasm) {
        Fn1D stub = p.F_stub_left ? *p.F_stub_left
                                  : poke_quadratic(I.lo, m_minus, p.A, p.alpha, m_minus, kf);
        require_stub_domain(stub, I.lo, m_minus, "F left stub");
        check_junction(stub, m_minus, p.A * m_minus + p.alpha, p.A, "F left stub");
        append_clipped(Fp, stub, I.lo, m_minus);
    }
    Fp.push_back({hasm ? m_minus : I.lo, hasp ? m_plus : I.hi, Fn1D::AffineBody{p.A, p.alpha}});
    if (hasp) {
        Fn1D stub = p.F_stub_right ? *p.F_stub_right
                                   : poke_quadratic(m_plus, I.hi, p.A, p.alpha, m_plus, kf);
        require_stub_domain(stub, m_plus, I.hi, "F right stub");
        check_junction(stub, m_plus, p.A * m_plus + p.alpha, p.A, "F right stub");
        append_clipped(Fp, stub, m_plus, I.hi);
    }
    Fn1D F(I, std::move(Fp));

    // --- g_k: affine with slope D∓ on the sides, monotone stub on K
    auto build_g = [&](int k) {
        const double dk_minus = (k == 1) ? p.delta1_minus : p.delta2_minus;
        const double dk_plus = (k == 1) ? p.delta1_plus : p.delta2_plus;
        const std::optional<Fn1D>& custom = (k == 1) ? p.g1_stub : p.g2_stub;
        Fn1D stub = [&]() {
            if (custom) return *custom;
            if (hasm && hasp)
                return hermite_cubic_fn(k_lo, k_hi, p.D_minus * k_lo + dk_minus,
                                        p.D_plus * k_hi + dk_plus, p.D_minus, p.D_plus);
            if (hasm)
                return anchored_quadratic(k_lo, k_hi, k_lo, p.D_minus * k_lo + dk_minus,
                                          p.D_minus, p.D_minus / (2.0 * len_k));
            return anchored_quadratic(k_lo, k_hi, k_hi, p.D_plus * k_hi + dk_plus, p.D_plus,
                                      -p.D_plus / (2.0 * len_k));
        }();
        require_stub_domain(stub, k_lo, k_hi, "g stub");
        if (hasm)
            check_junction(stub, k_lo, p.D_minus * k_lo + dk_minus, p.D_minus, "g stub (lower)");
        if (hasp)
            check_junction(stub, k_hi, p.D_plus * k_hi + dk_plus, p.D_plus, "g stub (upper)");

        std::vector<Fn1D::Piece> gp;
        if (hasm) gp.push_back({I.lo, k_lo, Fn1D::AffineBody{p.D_minus, dk_minus}});
        append_clipped(gp, stub, k_lo, k_hi);
        if (hasp) gp.push_back({k_hi, I.hi, Fn1D::AffineBody{p.D_plus, dk_plus}});
        return Fn1D(I, std::move(gp));
    };
    Fn1D g1 = build_g(1);
    Fn1D g2 = build_g(2);
    if (monotone_direction(g1) != monotone_direction(g2))
        throw MonotonicityError("assembled g1, g2 are not monotone in the same sense");

    // --- f_k: affine C∓ x + γ_k∓ on the sides, -F/2 + B g_k + beta_k between
    auto build_f = [&](int k, const Fn1D& g) {
        const double gk_minus = (k == 1) ? p.gamma1_minus : p.gamma2_minus;
        const double gk_plus = (k == 1) ? p.gamma1_plus : p.gamma2_plus;
        const double beta_k = (k == 1) ? p.beta1 : p.beta2;
        // restrict g to K for the middle composition
        std::vector<Fn1D::Piece> mid_pieces;
        for (const auto& gp : g.pieces())
            if (gp.lo >= k_lo - kEndpointSlack && gp.hi <= k_hi + kEndpointSlack)
                mid_pieces.push_back(gp);
        Fn1D g_on_k(OpenInterval(k_lo, k_hi), std::move(mid_pieces));
        ExprPtr mid = Expr::poly({beta_k - 0.5 * p.alpha, -0.5 * p.A}) +
                      p.B * ex::fn(g_on_k.shared());

        std::vector<Fn1D::Piece> fp;
        if (hasm) fp.push_back({I.lo, k_lo, Fn1D::AffineBody{p.C_minus, gk_minus}});
        fp.push_back({k_lo, k_hi, Fn1D::ClosedBody{std::move(mid)}});
        if (hasp) fp.push_back({k_hi, I.hi, Fn1D::AffineBody{p.C_plus, gk_plus}});
        Fn1D f(I, std::move(fp));
        assert_piecewise_continuous(f, kJunctionTol);
        return f;
    };
    Fn1D f1 = build_f(1, g1);
    Fn1D f2 = build_f(2, g2);

    // --- G: the side formulas carry F; everything else is B u + beta.
    OpenInterval sumset = sumset_image(g1, g2, I, I);
    auto F_shared = F.shared();
    const double u_lo_end = 2.0 * p.D_minus * I.lo + delta_minus;
    const double u_hi_end = 2.0 * p.D_plus * I.hi + delta_plus;
    const double u_mm = 2.0 * p.D_minus * m_minus + delta_minus;
    const double u_mp = 2.0 * p.D_plus * m_plus + delta_plus;

    std::vector<Fn1D::Piece> Gp;
    ExprPtr minus_expr, plus_expr;
    double mid_lo = sumset.lo, mid_hi = sumset.hi;
    if (hasm) {
        minus_expr = ex::fn(F_shared, Expr::poly({-delta_minus / (2.0 * p.D_minus),
                                                  1.0 / (2.0 * p.D_minus)})) +
                     Expr::poly({gamma_minus - p.C_minus / p.D_minus * delta_minus,
                                 p.C_minus / p.D_minus});
        const double a = std::min(u_lo_end, u_mm), b = std::max(u_lo_end, u_mm);
        Gp.push_back({a, b, Fn1D::ClosedBody{minus_expr}});
        if (u_lo_end < u_mm)
            mid_lo = u_mm;
        else
            mid_hi = u_mm;
    }
    if (hasp) {
        plus_expr = ex::fn(F_shared, Expr::poly({-delta_plus / (2.0 * p.D_plus),
                                                 1.0 / (2.0 * p.D_plus)})) +
                    Expr::poly({gamma_plus - p.C_plus / p.D_plus * delta_plus,
                                p.C_plus / p.D_plus});
        const double a = std::min(u_hi_end, u_mp), b = std::max(u_hi_end, u_mp);
        Gp.push_back({a, b, Fn1D::ClosedBody{plus_expr}});
        if (u_hi_end > u_mp)
            mid_hi = u_mp;
        else
            mid_lo = u_mp;
    }
    Gp.push_back({mid_lo, mid_hi, Fn1D::AffineBody{p.B, beta}});
    std::sort(Gp.begin(), Gp.end(),
              [](const Fn1D::Piece& a, const Fn1D::Piece& b) { return a.lo < b.lo; });

    // coverage: the pieces must tile the computed sumset (report gaps, never fill)
    const double cover_slack = 1e-7 * (1.0 + sumset.length());
    if (std::fabs(Gp.front().lo - sumset.lo) > cover_slack ||
        std::fabs(Gp.back().hi - sumset.hi) > cover_slack)
        throw NumericError("G pieces do not cover the sumset " + sumset.str());
    Gp.front().lo = sumset.lo;
    Gp.back().hi = sumset.hi;
    for (std::size_t i = 0; i + 1 < Gp.size(); ++i) {
        if (std::fabs(Gp[i].hi - Gp[i + 1].lo) > cover_slack)
            throw NumericError("G coverage gap at u=" + std::to_string(Gp[i].hi));
        const double ub = 0.5 * (Gp[i].hi + Gp[i + 1].lo);
        Gp[i].hi = ub;
        Gp[i + 1].lo = ub;
    }
    Fn1D G(sumset, std::move(Gp));
    assert_piecewise_continuous(G, kJunctionTol);

    // overlap consistency: on the stretch where a side formula and B u + beta
    // are both mandated they must agree
    auto check_overlap = [&](const ExprPtr& e, double ua, double ub, const char* side) {
        for (int i = 0; i <= 8; ++i) {
            const double u = ua + (ub - ua) * static_cast<double>(i) / 8.0;
            const double lhs = e->eval(u).v;
            const double rhs = p.B * u + beta;
            if (std::fabs(lhs - rhs) > 1e-9 * (1.0 + std::fabs(rhs)))
                throw NumericError(std::string("G overlap inconsistency (") + side +
                                   ") at u=" + std::to_string(u));
        }
    };
    if (hasm) check_overlap(minus_expr, u_mm, 2.0 * p.D_minus * k_lo + delta_minus, "minus");
    if (hasp) check_overlap(plus_expr, 2.0 * p.D_plus * k_hi + delta_plus, u_mp, "plus");

    return {I,  std::move(F), std::move(f1), std::move(f2), std::move(g1), std::move(g2),
            sumset, std::move(G), Regime::PartiallyAffine};
}

// ---------------------------------------------------------------------------
// the worked exactly-once-differentiable tuple
// ---------------------------------------------------------------------------

SolutionTuple paper_example() {
    OpenInterval I(0.0, 4.0);
    OpenInterval U(0.0, 10.0);
    Fn1D F(I, {{0.0, 1.0, Fn1D::QuadraticBody{2.0, 0.0, 2.0}},
               {1.0, 4.0, Fn1D::AffineBody{4.0, 0.0}}});
    Fn1D f(I, {{0.0, 2.0, Fn1D::AffineBody{1.0, 0.0}},
               {2.0, 4.0, Fn1D::QuadraticBody{0.75, -2.0, 3.0}}});
    Fn1D g(I, {{0.0, 2.0, Fn1D::AffineBody{1.0, 0.0}},
               {2.0, 4.0, Fn1D::QuadraticBody{0.25, 0.0, 1.0}}});
    Fn1D G(U, {{0.0, 2.0, Fn1D::QuadraticBody{0.5, 1.0, 2.0}},
               {2.0, 10.0, Fn1D::AffineBody{3.0, 0.0}}});
    return {I, std::move(F), f, f, g, g, U, std::move(G), Regime::PartiallyAffine};
}

PartiallyAffineParams paper_example_params() {
    PartiallyAffineParams p{OpenInterval(0.0, 4.0), 2.0, 4.0};
    p.A = 4.0;
    p.B = 3.0;
    p.C_minus = 1.0;
    p.D_minus = 1.0;
    // the plus side is absent; its constants are unconstrained placeholders
    p.C_plus = 0.0;
    p.D_plus = 1.0;
    return p;
}

// ---------------------------------------------------------------------------
// auxiliary profiles (the seven cases)
// ---------------------------------------------------------------------------

AuxProfiles aux_profiles(AuxCase kase, double a, double b, double c, double d, double gamma,
                         double lambda, double nu, const OpenInterval& I,
                         std::optional<Fn1D> phi_override) {
    const bool fraction = kase != AuxCase::ConstantPair;
    const bool psi1_zero = kase == AuxCase::ConstantPair || kase == AuxCase::TrigFractionZero ||
                           kase == AuxCase::LinearFractionZero ||
                           kase == AuxCase::HyperbolicFractionZero;

    switch (kase) {
        case AuxCase::TrigFraction:
        case AuxCase::TrigFractionZero:
            if (!(gamma < 0.0)) throw SpecError("trig cases need gamma < 0");
            break;
        case AuxCase::LinearFraction:
        case AuxCase::LinearFractionZero:
            if (gamma != 0.0) throw SpecError("linear cases need gamma = 0");
            break;
        case AuxCase::HyperbolicFraction:
        case AuxCase::HyperbolicFractionZero:
            if (!(gamma > 0.0)) throw SpecError("hyperbolic cases need gamma > 0");
            break;
        case AuxCase::ConstantPair:
            if (a == 0.0) throw SpecError("constant case needs a != 0");
            if (!phi_override) throw SpecError("constant case needs a caller-supplied phi");
            break;
    }
    const double kappa = std::sqrt(std::fabs(gamma));

    AuxProfiles out{kase, a,  b,  c,  d,  gamma, lambda, nu, kappa, I,
                    Fn1D::constant(I, 0.0), Fn1D::constant(I, 0.0), Fn1D::constant(I, 0.0),
                    Fn1D::constant(I, 0.0), Fn1D::constant(I, 0.0)};

    if (kase == AuxCase::ConstantPair) {
        require_stub_domain(*phi_override, I.lo, I.hi, "phi override");
        out.phi = *phi_override;
        out.psi2 = Fn1D::constant(I, a);
        out.Psi2 = Fn1D::constant(I, b);
        return out;  // psi1 = Psi1 = 0; psi2 ± psi1 = a != 0
    }

    if (fraction && std::fabs(a * d - b * c) <= 1e-14 * (std::fabs(a * d) + std::fabs(b * c) + 1.0))
        throw SpecError("degenerate fraction: a*d - b*c = 0");

    ExprPtr den, num, psi2e, Psi2e;
    const ExprPtr kx = Expr::poly({0.0, kappa});
    switch (kase) {
        case AuxCase::TrigFraction:
        case AuxCase::TrigFractionZero:
            den = a * ex::sin(kx) + b * ex::cos(kx);
            num = c * ex::sin(kx) + d * ex::cos(kx);
            psi2e = -a * ex::cos(kx) + b * ex::sin(kx) + lambda;
            Psi2e = -c * ex::cos(kx) + d * ex::sin(kx) + nu;
            break;
        case AuxCase::LinearFraction:
        case AuxCase::LinearFractionZero:
            den = Expr::poly({b, a});
            num = Expr::poly({d, c});
            psi2e = Expr::poly({lambda, b, 0.5 * a});
            Psi2e = Expr::poly({nu, d, 0.5 * c});
            break;
        case AuxCase::HyperbolicFraction:
        case AuxCase::HyperbolicFractionZero:
            den = a * ex::sinh(kx) + b * ex::cosh(kx);
            num = c * ex::sinh(kx) + d * ex::cosh(kx);
            psi2e = a * ex::cosh(kx) + b * ex::sinh(kx) + lambda;
            Psi2e = c * ex::cosh(kx) + d * ex::sinh(kx) + nu;
            break;
        default:
            break;
    }

    dense_nonvanishing(ScalarFn(I, [&](double x) { return den->eval(x).v; }), I,
                       "fraction denominator");
    out.phi = Fn1D::closed_form(I, num / den);
    out.psi2 = Fn1D::closed_form(I, psi2e);
    out.Psi2 = Fn1D::closed_form(I, Psi2e);
    if (!psi1_zero) {
        out.psi1 = Fn1D::closed_form(I, den);
        out.Psi1 = Fn1D::closed_form(I, (num / den) * den);  // = phi * psi1, kept as a product
    }

    // psi2 ± psi1 must stay away from zero so the g_k' exist
    for (int sign : {+1, -1}) {
        dense_nonvanishing(
            ScalarFn(I,
                     [&, sign](double x) {
                         return out.psi2.eval_inner(x) + sign * out.psi1.eval_inner(x);
                     }),
            I, sign > 0 ? "psi2 + psi1" : "psi2 - psi1");
    }
    return out;
}

// ---------------------------------------------------------------------------
// reconstruction
// ---------------------------------------------------------------------------

Anchors default_anchors(const OpenInterval& I) { return Anchors{I.mid(), 0, 0, 0, 0, 0}; }

Reconstructed reconstruct_from_profiles(const AuxProfiles& p, const Anchors& an, double tol) {
    const OpenInterval& I = p.I;
    if (!I.contains(an.x0, -kEndpointSlack))
        throw DomainError("anchor x0 must be interior to I");

    auto phi = p.phi.shared();
    auto psi1 = p.psi1.shared();
    auto psi2 = p.psi2.shared();
    auto Psi1 = p.Psi1.shared();
    auto Psi2 = p.Psi2.shared();

    const ExprPtr sum_plus = ex::fn(psi2) + ex::fn(psi1);    // 2/g1'
    const ExprPtr sum_minus = ex::fn(psi2) - ex::fn(psi1);   // 2/g2'
    dense_nonvanishing(ScalarFn(I, [&](double x) { return sum_plus->eval(x).v; }), I,
                       "psi2 + psi1");
    dense_nonvanishing(ScalarFn(I, [&](double x) { return sum_minus->eval(x).v; }), I,
                       "psi2 - psi1");

    Fn1D dF = Fn1D::closed_form(I, 2.0 * ex::fn(phi));
    Fn1D dg1 = Fn1D::closed_form(I, 2.0 / sum_plus);
    Fn1D dg2 = Fn1D::closed_form(I, 2.0 / sum_minus);
    Fn1D df1 = Fn1D::closed_form(I, -(ex::fn(Psi2) + ex::fn(Psi1)) / sum_plus);
    Fn1D df2 = Fn1D::closed_form(I, -(ex::fn(Psi2) - ex::fn(Psi1)) / sum_minus);

    Reconstructed r{antiderivative(dF, an.x0, an.F0, tol),
                    antiderivative(df1, an.x0, an.f10, tol),
                    antiderivative(df2, an.x0, an.f20, tol),
                    antiderivative(dg1, an.x0, an.g10, tol),
                    antiderivative(dg2, an.x0, an.g20, tol)};
    try {
        monotone_direction(r.g1);
        monotone_direction(r.g2);
    } catch (const MonotonicityError& e) {
        throw RegimeError(std::string("reconstructed g' changes sign: ") + e.what());
    }
    return r;
}

Fn1D solve_for_G(const Fn1D& F, const Fn1D& f1, const Fn1D& f2, const Fn1D& g1, const Fn1D& g2,
                 double tol) {
    if (monotone_direction(g1) != monotone_direction(g2))
        throw MonotonicityError("g1 and g2 must be strictly monotone in the same sense");
    const OpenInterval I = g1.domain();
    const OpenInterval sumset = sumset_image(g1, g2, I, I);
    const double m = kImageMarginRel * sumset.length();
    const double inner_tol = std::max(1e-13, 0.01 * tol);
    const double target = std::max(tol, 1e-12);

    const auto value_at = [&](double u) {
        const double t = diagonal_solve(g1, g2, u, inner_tol);
        return F.eval_inner(t) + f1.eval_inner(t) + f2.eval_inner(t);
    };

    int n = 513;
    constexpr int kMaxNodes = 16385;
    for (;;) {
        std::vector<double> us(static_cast<std::size_t>(n)), vs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / (n - 1);
            us[static_cast<std::size_t>(i)] = (sumset.lo + m) * (1.0 - t) + (sumset.hi - m) * t;
            vs[static_cast<std::size_t>(i)] = value_at(us[static_cast<std::size_t>(i)]);
        }
        Fn1D G = Fn1D::tabulated(sumset, us, vs);
        double err = 0.0;
        const int probes = 64;
        for (int k = 0; k < probes; ++k) {
            const std::size_t i = static_cast<std::size_t>(
                (static_cast<long>(k) * (n - 1)) / probes);
            const double mid = 0.5 * (us[i] + us[i + 1]);
            err = std::max(err, std::fabs(G.eval_inner(mid) - value_at(mid)));
        }
        if (err <= target) return G;
        if (2 * (n - 1) + 1 > kMaxNodes)
            throw NumericError("G memo grid refinement stalled (error " + std::to_string(err) +
                               " above tolerance " + std::to_string(target) + ")");
        n = 2 * (n - 1) + 1;
    }
}

SolutionTuple assemble_nowhere_affine(const AuxProfiles& p, const Anchors& anchors, double tol) {
    Reconstructed r = reconstruct_from_profiles(p, anchors, tol);
    Fn1D G = solve_for_G(r.F, r.f1, r.f2, r.g1, r.g2, std::max(tol, 1e-9));
    OpenInterval sumset = G.domain();
    return {p.I, std::move(r.F), std::move(r.f1), std::move(r.f2), std::move(r.g1),
            std::move(r.g2), sumset, std::move(G), Regime::NowhereAffine};
}

}  // namespace pexider
