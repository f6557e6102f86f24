#include "pexider/shapes.hpp"

namespace pexider::shapes {

Fn1D identity(const OpenInterval& I) { return Fn1D::identity(I); }

Fn1D affine(const OpenInterval& I, double slope, double intercept) {
    return Fn1D::affine(I, slope, intercept);
}

Fn1D poly(const OpenInterval& I, std::vector<double> coeffs) {
    return Fn1D::closed_form(I, Expr::poly(std::move(coeffs)));
}

Fn1D exponential(const OpenInterval& I, double scale, double amplitude, double offset) {
    return Fn1D::closed_form(I, amplitude * ex::exp(Expr::poly({0.0, scale})) + offset);
}

Fn1D log_shifted(const OpenInterval& I, double shift, double scale) {
    return Fn1D::closed_form(I, scale * ex::log(Expr::poly({shift, 1.0})));
}

Fn1D random_monotone(std::mt19937_64& rng, const OpenInterval& I, int direction) {
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Fn1D base = [&]() {
        switch (pick(rng)) {
            case 0: {  // increasing cubic: c1 x + c3 x^3 + c0, c1 > 0, c3 >= 0
                const double c1 = 0.3 + 1.2 * u(rng);
                const double c3 = 0.5 * u(rng);
                const double c0 = -1.0 + 2.0 * u(rng);
                return poly(I, {c0, c1, 0.0, c3});
            }
            case 1: {  // amplitude e^{s x} + offset
                const double s = 0.2 + 0.6 * u(rng);
                const double a = 0.5 + u(rng);
                const double c = -1.0 + 2.0 * u(rng);
                return exponential(I, s, a, c);
            }
            default: {  // scale log(x + shift), shifted to stay positive
                const double shift = 0.3 + 1.7 * u(rng) - I.lo;
                const double a = 0.5 + 1.5 * u(rng);
                return log_shifted(I, shift, a);
            }
        }
    }();
    if (direction > 0) return base;
    // mirror into a strictly decreasing shape
    return Fn1D::closed_form(I, -ex::fn(base.shared()));
}

OpenInterval random_interval(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double lo = -3.0 + 3.0 * u(rng);
    const double len = 1.0 + 2.0 * u(rng);
    return {lo, lo + len};
}

OpenInterval random_subinterval(std::mt19937_64& rng, const OpenInterval& I, bool allow_full) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (allow_full && u(rng) < 0.15) return I;
    for (;;) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 0.1) continue;
        return {I.lo + a * I.length(), I.lo + b * I.length()};
    }
}

}  // namespace pexider::shapes
