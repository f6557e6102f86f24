#ifndef PEXIDER_FN1D_HPP
#define PEXIDER_FN1D_HPP

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "pexider/expr.hpp"
#include "pexider/interval.hpp"

namespace pexider {

/// One evaluatable scalar function on an open interval, piecewise by
/// construction.  Values are immutable after construction (the antiderivative
/// checkpoint grid is precomputed), so instances are freely shareable.
///
/// Derivatives are contractual, never finite differences: affine/quadratic
/// pieces differentiate their coefficients, closed forms go through
/// forward-mode duals, an antiderivative returns its stored integrand, and a
/// tabulated piece returns the derivative of its interpolant.
class Fn1D {
  public:
    struct AffineBody {
        double slope = 0.0;
        double intercept = 0.0;
    };
    struct QuadraticBody {
        double c2 = 0.0, c1 = 0.0, c0 = 0.0;  // c2 x^2 + c1 x + c0
    };
    struct ClosedBody {
        ExprPtr expr;
    };
    struct AntiderivBody {
        std::shared_ptr<const Fn1D> integrand;
        double x0 = 0.0;  // anchor abscissa
        double y0 = 0.0;  // value at the anchor
        double tol = 1e-10;
        // checkpoint grid: cumulative integrals from the anchor, built once
        std::vector<double> cx, cy;
    };
    struct TabulatedBody {
        std::vector<double> x, y, d;  // nodes, values, interpolant slopes
    };
    using Body = std::variant<AffineBody, QuadraticBody, ClosedBody, AntiderivBody, TabulatedBody>;

    struct Piece {
        double lo, hi;
        Body body;
    };

    Fn1D(OpenInterval domain, std::vector<Piece> pieces);

    static Fn1D constant(OpenInterval dom, double c) { return affine(dom, 0.0, c); }
    static Fn1D identity(OpenInterval dom) { return affine(dom, 1.0, 0.0); }
    static Fn1D affine(OpenInterval dom, double slope, double intercept);
    static Fn1D quadratic(OpenInterval dom, double c2, double c1, double c0);
    static Fn1D closed_form(OpenInterval dom, ExprPtr expr);
    /// Monotone-cubic interpolant through (xs, ys); xs strictly increasing
    /// spanning dom.
    static Fn1D tabulated(OpenInterval dom, std::vector<double> xs, std::vector<double> ys);

    const OpenInterval& domain() const { return domain_; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    double default_margin() const { return kDefaultMarginRel * domain_.length(); }

    /// Piecewise value; rejects points outside the margin-shrunk domain.
    double eval(double x) const { return eval(x, default_margin()); }
    double eval(double x, double margin) const;

    /// Exact derivative under the same margin policy.
    double deriv(double x) const { return deriv(x, default_margin()); }
    double deriv(double x, double margin) const;

    /// Internal evaluation with endpoint clamping (used for endpoint limits,
    /// composition and grid work where interiority was already arranged).
    double eval_inner(double x) const;
    double deriv_inner(double x) const;

    std::shared_ptr<const Fn1D> shared() const { return std::make_shared<Fn1D>(*this); }

    static double piece_value(const Piece& p, double x);
    static double piece_deriv(const Piece& p, double x);

  private:
    const Piece& piece_at(double x) const;
    double clamp_into_domain(double x) const;

    OpenInterval domain_;
    std::vector<Piece> pieces_;
};

/// A function whose derivative is `integrand` (exactly, by contract) and whose
/// value at x0 is y0; each evaluation carries quadrature error at most `tol`.
Fn1D antiderivative(const Fn1D& integrand, double x0, double y0, double tol);

/// +1 strictly increasing, -1 strictly decreasing; throws MonotonicityError
/// when the sampled derivative vanishes or changes sign.
int monotone_direction(const Fn1D& f);

/// The open image interval of J under continuous strictly monotone f,
/// computed from plain evaluations at the endpoint margins.
OpenInterval image_interval(const Fn1D& f, const OpenInterval& J);

/// x with |f(x) - y| <= tol, by bisection (bracket guaranteed by
/// monotonicity).  Throws RangeError when y lies outside the image.
double monotone_inverse(const Fn1D& f, double y, double tol);

/// Preimage interval f^{-1}(V ∩ image(f)); absent when the overlap is empty.
std::optional<OpenInterval> preimage_interval(const Fn1D& f, const OpenInterval& V);

/// t with |g1(t)+g2(t) - u| <= tol for same-sense monotone g1, g2.  The
/// diagonal t -> g1(t)+g2(t) spans the sumset, so the bracket is guaranteed;
/// u outside the sumset raises RangeError.
double diagonal_solve(const Fn1D& g1, const Fn1D& g2, double u, double tol);

/// Max relative value jump across internal piece boundaries.
double max_boundary_jump(const Fn1D& f);

/// Throws ContinuityError when a boundary jump exceeds `rel_tol` relative.
void assert_piecewise_continuous(const Fn1D& f, double rel_tol = 1e-12);

/// Fritsch–Carlson monotone-cubic slopes for the given nodes and values.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pexider

#endif
