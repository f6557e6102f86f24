#include "pexider/fn1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pexider/errors.hpp"
#include "pexider/quadrature.hpp"

namespace pexider {

namespace {

constexpr int kClosedFormSamples = 1024;  // denominator/finiteness vetting
constexpr int kMonotoneSamples = 257;
constexpr int kCheckpointCount = 129;
constexpr int kBisectMaxIter = 200;

double boundary_fuzz(const OpenInterval& dom) { return 1e-9 * (1.0 + dom.length()); }

std::string point_str(double x) { return std::to_string(x); }

// Hermite cubic on the cell [x0, x1].
double hermite_value(double x, double x0, double x1, double y0, double y1, double d0, double d1) {
    const double h = x1 - x0;
    const double delta = (y1 - y0) / h;
    const double c2 = (3.0 * delta - 2.0 * d0 - d1) / h;
    const double c3 = (d0 + d1 - 2.0 * delta) / (h * h);
    const double s = x - x0;
    return y0 + s * (d0 + s * (c2 + s * c3));
}

double hermite_deriv(double x, double x0, double x1, double y0, double y1, double d0, double d1) {
    const double h = x1 - x0;
    const double delta = (y1 - y0) / h;
    const double c2 = (3.0 * delta - 2.0 * d0 - d1) / h;
    const double c3 = (d0 + d1 - 2.0 * delta) / (h * h);
    const double s = x - x0;
    return d0 + s * (2.0 * c2 + 3.0 * c3 * s);
}

// Cell index for the tabulated body: the cell [x[i], x[i+1]] with the edge
// cells extended outward.
std::size_t cell_index(const std::vector<double>& xs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    if (i >= xs.size() - 1) i = xs.size() - 2;
    return i;
}

}  // namespace

// ---------------------------------------------------------------------------
// construction & validation
// ---------------------------------------------------------------------------

Fn1D::Fn1D(OpenInterval domain, std::vector<Piece> pieces)
    : domain_(domain), pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw DomainError("function needs at least one piece");
    const double fuzz = boundary_fuzz(domain_);
    double prev_hi = domain_.lo;
    for (const auto& p : pieces_) {
        if (!(p.lo < p.hi)) throw DomainError("piece with nonpositive length");
        if (std::fabs(p.lo - prev_hi) > fuzz)
            throw DomainError("pieces leave a gap/overlap near x=" + point_str(p.lo));
        prev_hi = p.hi;
    }
    if (std::fabs(pieces_.front().lo - domain_.lo) > fuzz ||
        std::fabs(pieces_.back().hi - domain_.hi) > fuzz)
        throw DomainError("pieces do not span the domain");

    // Closed forms are vetted by dense sampling: the whole piece must evaluate
    // finite, quotient denominators must not vanish (value, or a sign change
    // between samples), and log arguments must stay positive.
    for (const auto& p : pieces_) {
        if (!std::holds_alternative<ClosedBody>(p.body)) continue;
        const ExprPtr& e = std::get<ClosedBody>(p.body).expr;
        std::vector<std::pair<const Expr*, bool>> guards;
        e->collect_guards(guards);
        std::vector<double> prev(guards.size(), 0.0);
        const double m = kImageMarginRel * (p.hi - p.lo);
        for (int i = 0; i < kClosedFormSamples; ++i) {
            const double t = static_cast<double>(i) / (kClosedFormSamples - 1);
            const double x = (p.lo + m) * (1.0 - t) + (p.hi - m) * t;
            const Dual v = e->eval(x);
            if (!std::isfinite(v.v) || !std::isfinite(v.d))
                throw DomainError("closed-form piece is singular near x=" + point_str(x));
            for (std::size_t k = 0; k < guards.size(); ++k) {
                const double gv = guards[k].first->eval(x).v;
                if (guards[k].second) {  // log argument
                    if (!(gv > 0.0))
                        throw DomainError("log argument nonpositive near x=" + point_str(x));
                    continue;
                }
                if (std::fabs(gv) < 1e-300 || (i > 0 && (gv > 0.0) != (prev[k] > 0.0)))
                    throw DomainError("quotient denominator vanishes near x=" + point_str(x));
                prev[k] = gv;
            }
        }
    }
}

Fn1D Fn1D::affine(OpenInterval dom, double slope, double intercept) {
    return Fn1D(dom, {Piece{dom.lo, dom.hi, AffineBody{slope, intercept}}});
}

Fn1D Fn1D::quadratic(OpenInterval dom, double c2, double c1, double c0) {
    return Fn1D(dom, {Piece{dom.lo, dom.hi, QuadraticBody{c2, c1, c0}}});
}

Fn1D Fn1D::closed_form(OpenInterval dom, ExprPtr expr) {
    return Fn1D(dom, {Piece{dom.lo, dom.hi, ClosedBody{std::move(expr)}}});
}

Fn1D Fn1D::tabulated(OpenInterval dom, std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw DomainError("tabulated function needs matching xs/ys with >= 2 nodes");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i - 1] < xs[i])) throw DomainError("tabulated nodes must strictly increase");
    std::vector<double> ds = pchip_slopes(xs, ys);
    TabulatedBody body{std::move(xs), std::move(ys), std::move(ds)};
    return Fn1D(dom, {Piece{dom.lo, dom.hi, std::move(body)}});
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

const Fn1D::Piece& Fn1D::piece_at(double x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Piece& p) { return v < p.lo; });
    if (it == pieces_.begin()) return pieces_.front();
    return *(it - 1);
}

double Fn1D::clamp_into_domain(double x) const {
    const double fuzz = boundary_fuzz(domain_);
    if (x < domain_.lo - fuzz || x > domain_.hi + fuzz)
        throw DomainError("x=" + point_str(x) + " outside domain " + domain_.str());
    return std::clamp(x, domain_.lo, domain_.hi);
}

double Fn1D::piece_value(const Piece& p, double x) {
    struct Visitor {
        double x;
        const Piece& p;
        double operator()(const AffineBody& b) const { return b.slope * x + b.intercept; }
        double operator()(const QuadraticBody& b) const { return (b.c2 * x + b.c1) * x + b.c0; }
        double operator()(const ClosedBody& b) const { return b.expr->eval(x).v; }
        double operator()(const AntiderivBody& b) const {
            // nearest checkpoint, then a short adaptive stretch
            auto it = std::lower_bound(b.cx.begin(), b.cx.end(), x);
            std::size_t j = (it == b.cx.begin()) ? 0 : static_cast<std::size_t>(it - b.cx.begin()) - 1;
            if (j + 1 < b.cx.size() && std::fabs(b.cx[j + 1] - x) < std::fabs(x - b.cx[j])) ++j;
            const auto f = [&](double t) { return b.integrand->eval_inner(t); };
            return b.cy[j] + adaptive_integrate(f, b.cx[j], x, 0.5 * b.tol);
        }
        double operator()(const TabulatedBody& b) const {
            const std::size_t i = cell_index(b.x, x);
            return hermite_value(x, b.x[i], b.x[i + 1], b.y[i], b.y[i + 1], b.d[i], b.d[i + 1]);
        }
    };
    const double xc = std::clamp(x, p.lo, p.hi);
    return std::visit(Visitor{xc, p}, p.body);
}

double Fn1D::piece_deriv(const Piece& p, double x) {
    struct Visitor {
        double x;
        double operator()(const AffineBody& b) const { return b.slope; }
        double operator()(const QuadraticBody& b) const { return 2.0 * b.c2 * x + b.c1; }
        double operator()(const ClosedBody& b) const { return b.expr->eval(x).d; }
        double operator()(const AntiderivBody& b) const { return b.integrand->eval_inner(x); }
        double operator()(const TabulatedBody& b) const {
            const std::size_t i = cell_index(b.x, x);
            return hermite_deriv(x, b.x[i], b.x[i + 1], b.y[i], b.y[i + 1], b.d[i], b.d[i + 1]);
        }
    };
    const double xc = std::clamp(x, p.lo, p.hi);
    return std::visit(Visitor{xc}, p.body);
}

double Fn1D::eval(double x, double margin) const {
    if (!(x >= domain_.lo + margin && x <= domain_.hi - margin))
        throw DomainError("x=" + point_str(x) + " outside the margin-shrunk domain " +
                          domain_.str() + " (margin " + point_str(margin) + ")");
    return piece_value(piece_at(x), x);
}

double Fn1D::deriv(double x, double margin) const {
    if (!(x >= domain_.lo + margin && x <= domain_.hi - margin))
        throw DomainError("x=" + point_str(x) + " outside the margin-shrunk domain " +
                          domain_.str() + " (margin " + point_str(margin) + ")");
    return piece_deriv(piece_at(x), x);
}

double Fn1D::eval_inner(double x) const {
    const double xc = clamp_into_domain(x);
    return piece_value(piece_at(xc), xc);
}

double Fn1D::deriv_inner(double x) const {
    const double xc = clamp_into_domain(x);
    return piece_deriv(piece_at(xc), xc);
}

// ---------------------------------------------------------------------------
// calculus
// ---------------------------------------------------------------------------

Fn1D antiderivative(const Fn1D& integrand, double x0, double y0, double tol) {
    const OpenInterval dom = integrand.domain();
    if (!(tol > 0.0)) throw NumericError("quadrature tolerance must be positive");
    if (!dom.contains(x0)) throw DomainError("anchor x0=" + std::to_string(x0) +
                                             " outside integrand domain " + dom.str());

    auto shared_integrand = integrand.shared();
    const auto f = [&](double t) { return shared_integrand->eval_inner(t); };

    Fn1D::AntiderivBody body;
    body.integrand = shared_integrand;
    body.x0 = x0;
    body.y0 = y0;
    body.tol = tol;
    body.cx.resize(kCheckpointCount);
    body.cy.resize(kCheckpointCount);
    for (int i = 0; i < kCheckpointCount; ++i) {
        const double t = static_cast<double>(i) / (kCheckpointCount - 1);
        body.cx[i] = dom.lo * (1.0 - t) + dom.hi * t;
    }
    // anchor to the nearest checkpoint, then accumulate outward
    const double seg_tol = tol / (2.0 * kCheckpointCount);
    std::size_t j0 = cell_index(body.cx, x0);
    if (j0 + 1 < body.cx.size() && std::fabs(body.cx[j0 + 1] - x0) < std::fabs(x0 - body.cx[j0]))
        ++j0;
    body.cy[j0] = y0 + adaptive_integrate(f, x0, body.cx[j0], seg_tol);
    for (std::size_t j = j0; j + 1 < body.cx.size(); ++j)
        body.cy[j + 1] = body.cy[j] + adaptive_integrate(f, body.cx[j], body.cx[j + 1], seg_tol);
    for (std::size_t j = j0; j > 0; --j)
        body.cy[j - 1] = body.cy[j] + adaptive_integrate(f, body.cx[j], body.cx[j - 1], seg_tol);

    return Fn1D(dom, {Fn1D::Piece{dom.lo, dom.hi, std::move(body)}});
}

int monotone_direction(const Fn1D& f) {
    const OpenInterval dom = f.domain();
    const double m = kImageMarginRel * dom.length();
    bool pos = false, neg = false;
    for (int i = 0; i < kMonotoneSamples; ++i) {
        const double t = static_cast<double>(i) / (kMonotoneSamples - 1);
        const double x = (dom.lo + m) * (1.0 - t) + (dom.hi - m) * t;
        const double d = f.deriv_inner(x);
        if (d > 0.0)
            pos = true;
        else if (d < 0.0)
            neg = true;
        else
            throw MonotonicityError("derivative vanishes at x=" + std::to_string(x));
        if (pos && neg)
            throw MonotonicityError("derivative changes sign near x=" + std::to_string(x));
    }
    return pos ? 1 : -1;
}

OpenInterval image_interval(const Fn1D& f, const OpenInterval& J) {
    if (!f.domain().contains_interval(J, boundary_fuzz(f.domain())))
        throw DomainError("interval " + J.str() + " not inside domain " + f.domain().str());
    const double m = kImageMarginRel * J.length();
    const double va = f.eval_inner(J.lo + m);
    const double vb = f.eval_inner(J.hi - m);
    if (va == vb) throw MonotonicityError("endpoint values coincide; function not strictly monotone");
    return va < vb ? OpenInterval(va, vb) : OpenInterval(vb, va);
}

namespace {

// Bisection core on h(x) = f(x) - y with an already-validated bracket.
double bisect_root(const std::function<double(double)>& f, double y, double a, double b) {
    double fa = f(a) - y;
    double fb = f(b) - y;
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        // clamp y into the bracket values (range checks happened upstream)
        return std::fabs(fa) < std::fabs(fb) ? a : b;
    }
    for (int it = 0; it < kBisectMaxIter; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        const double fm = f(mid) - y;
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() *
                         (1.0 + std::max(std::fabs(a), std::fabs(b))))
            break;
    }
    return 0.5 * (a + b);
}

}  // namespace

double monotone_inverse(const Fn1D& f, double y, double tol) {
    monotone_direction(f);  // strictness assertion (diagnostic on failure)
    const OpenInterval dom = f.domain();
    const double m = kImageMarginRel * dom.length();
    const double a = dom.lo + m, b = dom.hi - m;
    const double fa = f.eval_inner(a), fb = f.eval_inner(b);
    const double ylo = std::min(fa, fb), yhi = std::max(fa, fb);
    if (y < ylo - tol || y > yhi + tol)
        throw RangeError("y=" + std::to_string(y) + " outside image ]" + std::to_string(ylo) +
                         "," + std::to_string(yhi) + "[");
    const double yc = std::clamp(y, ylo, yhi);
    const double x = bisect_root([&](double t) { return f.eval_inner(t); }, yc, a, b);
    const double resid = std::fabs(f.eval_inner(x) - yc);
    if (resid > std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(y))))
        throw NumericError("inverse bracketing failed to reach tolerance at y=" + std::to_string(y) +
                           " (residual " + std::to_string(resid) + ")");
    return x;
}

std::optional<OpenInterval> preimage_interval(const Fn1D& f, const OpenInterval& V) {
    const OpenInterval dom = f.domain();
    const double m = kImageMarginRel * dom.length();
    const double a = dom.lo + m, b = dom.hi - m;
    const double fa = f.eval_inner(a), fb = f.eval_inner(b);
    const double ylo = std::min(fa, fb), yhi = std::max(fa, fb);
    auto overlap = intersect(V, OpenInterval(ylo, yhi));
    if (!overlap) return std::nullopt;
    const auto ev = [&](double t) { return f.eval_inner(t); };
    const double x1 = bisect_root(ev, overlap->lo, a, b);
    const double x2 = bisect_root(ev, overlap->hi, a, b);
    return make_if_nonempty(std::min(x1, x2), std::max(x1, x2));
}

double diagonal_solve(const Fn1D& g1, const Fn1D& g2, double u, double tol) {
    if (!g1.domain().same_as(g2.domain(), boundary_fuzz(g1.domain())))
        throw DomainError("diagonal solve needs a common domain");
    if (monotone_direction(g1) != monotone_direction(g2))
        throw MonotonicityError("g1 and g2 must be strictly monotone in the same sense");
    const OpenInterval dom = g1.domain();
    const double m = kImageMarginRel * dom.length();
    const double a = dom.lo + m, b = dom.hi - m;
    const auto s = [&](double t) { return g1.eval_inner(t) + g2.eval_inner(t); };
    const double sa = s(a), sb = s(b);
    const double ulo = std::min(sa, sb), uhi = std::max(sa, sb);
    if (u < ulo - tol || u > uhi + tol)
        throw RangeError("u=" + std::to_string(u) + " outside sumset ]" + std::to_string(ulo) +
                         "," + std::to_string(uhi) + "[");
    const double uc = std::clamp(u, ulo, uhi);
    const double t = bisect_root(s, uc, a, b);
    const double resid = std::fabs(s(t) - uc);
    if (resid > std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(u))))
        throw NumericError("diagonal solve failed to reach tolerance at u=" + std::to_string(u));
    return t;
}

// ---------------------------------------------------------------------------
// piece-boundary continuity
// ---------------------------------------------------------------------------

double max_boundary_jump(const Fn1D& f) {
    const auto& ps = f.pieces();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
        const double xb = ps[i].hi;
        const double left = Fn1D::piece_value(ps[i], xb);
        const double right = Fn1D::piece_value(ps[i + 1], ps[i + 1].lo);
        const double rel = std::fabs(left - right) / (1.0 + std::max(std::fabs(left), std::fabs(right)));
        worst = std::max(worst, rel);
    }
    return worst;
}

void assert_piecewise_continuous(const Fn1D& f, double rel_tol) {
    const double jump = max_boundary_jump(f);
    if (jump > rel_tol)
        throw ContinuityError("piece boundary jump " + std::to_string(jump) +
                              " exceeds tolerance " + std::to_string(rel_tol));
}

// ---------------------------------------------------------------------------
// monotone-cubic slopes
// ---------------------------------------------------------------------------

std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
        return d;
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // one-sided three-point ends with the usual shape-preserving clamps
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double de = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (de * d0 <= 0.0)
            de = 0.0;
        else if (d0 * d1 < 0.0 && std::fabs(de) > 3.0 * std::fabs(d0))
            de = 3.0 * d0;
        return de;
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

}  // namespace pexider
