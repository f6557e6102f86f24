#include "pexider/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "pexider/errors.hpp"

namespace pexider {

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        xs[static_cast<std::size_t>(i)] = a * (1.0 - t) + b * t;
    }
    return xs;
}

// one jittered point per cell of [a,b]
std::vector<double> stratified(double a, double b, int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::vector<double> xs(static_cast<std::size_t>(n));
    const double cell = (b - a) / n;
    for (int i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(i)] = a + (static_cast<double>(i) + u(rng)) * cell;
    return xs;
}

struct Accumulator {
    double max_abs = 0.0;
    double sum = 0.0;  // Kahan
    double comp = 0.0;
    long count = 0;
    std::pair<double, double> worst{0, 0};

    void add(double r, double x, double y) {
        const double a = std::fabs(r);
        if (a > max_abs || count == 0) {
            max_abs = a;
            worst = {x, y};
        }
        const double t = sum + (a - comp);
        comp = (t - sum) - (a - comp);
        sum = t;
        ++count;
    }

    ResidualReport report(int n, double margin) const {
        ResidualReport rep;
        rep.max_abs = max_abs;
        rep.mean_abs = count > 0 ? sum / static_cast<double>(count) : 0.0;
        rep.worst = worst;
        rep.samples = count;
        rep.n = n;
        rep.margin = margin;
        return rep;
    }
};

}  // namespace

namespace {

ResidualReport residual_main_on(const SolutionTuple& s, const std::vector<double>& xs, int n,
                                double margin);

}  // namespace

ResidualReport residual_main(const SolutionTuple& s, int n, double margin) {
    if (n < 2) throw SpecError("residual grid needs n >= 2");
    const OpenInterval box = s.I.shrunk(margin);
    return residual_main_on(s, linspace(box.lo, box.hi, n), n, margin);
}

ResidualReport residual_main(const SolutionTuple& s, int n, double margin,
                             unsigned long long stratified_seed) {
    if (n < 2) throw SpecError("residual grid needs n >= 2");
    const OpenInterval box = s.I.shrunk(margin);
    std::mt19937_64 rng(stratified_seed);
    return residual_main_on(s, stratified(box.lo, box.hi, n, rng), n, margin);
}

namespace {

ResidualReport residual_main_on(const SolutionTuple& s, const std::vector<double>& xs, int n,
                                double margin) {
    Accumulator acc;
    std::vector<double> f1v(xs.size()), f2v(xs.size()), g1v(xs.size()), g2v(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        f1v[i] = s.f1.eval_inner(xs[i]);
        f2v[i] = s.f2.eval_inner(xs[i]);
        g1v[i] = s.g1.eval_inner(xs[i]);
        g2v[i] = s.g2.eval_inner(xs[i]);
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double lhs = s.F.eval_inner(0.5 * (xs[i] + xs[j])) + f1v[i] + f2v[j];
            const double rhs = s.G.eval_inner(g1v[i] + g2v[j]);
            acc.add(lhs - rhs, xs[i], xs[j]);
        }
    }
    return acc.report(n, margin);
}

}  // namespace

ResidualReport residual_aux(const ScalarFn& phi, const ScalarFn& psi1, const ScalarFn& psi2,
                            const OpenInterval& I1, const OpenInterval& I2, int n, double margin) {
    if (n < 2) throw SpecError("residual grid needs n >= 2");
    const OpenInterval S(0.5 * (I1.lo + I2.lo), 0.5 * (I1.hi + I2.hi));
    if (!phi.domain.contains_interval(S, 1e-9 * (1.0 + S.length())))
        throw DomainError("phi domain " + phi.domain.str() + " does not cover the midpoint set " +
                          S.str());
    const auto xs = linspace(I1.lo + margin, I1.hi - margin, n);
    const auto ys = linspace(I2.lo + margin, I2.hi - margin, n);
    std::vector<double> p1(xs.size()), p2(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) p1[i] = psi1(xs[i]);
    for (std::size_t j = 0; j < ys.size(); ++j) p2[j] = psi2(ys[j]);
    Accumulator acc;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
            acc.add(phi(0.5 * (xs[i] + ys[j])) * (p1[i] - p2[j]), xs[i], ys[j]);
    return acc.report(n, margin);
}

std::pair<ResidualReport, ResidualReport> residual_system(const AuxProfiles& p, int n,
                                                          double margin) {
    if (n < 2) throw SpecError("residual grid needs n >= 2");
    const OpenInterval box = p.I.shrunk(margin);
    const auto xs = linspace(box.lo, box.hi, n);
    std::vector<double> s1(xs.size()), s2(xs.size()), S1(xs.size()), S2(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s1[i] = p.psi1.eval_inner(xs[i]);
        s2[i] = p.psi2.eval_inner(xs[i]);
        S1[i] = p.Psi1.eval_inner(xs[i]);
        S2[i] = p.Psi2.eval_inner(xs[i]);
    }
    Accumulator acc1, acc2;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double ph = p.phi.eval_inner(0.5 * (xs[i] + xs[j]));
            acc1.add(ph * (s1[i] + s1[j]) - S1[i] - S1[j], xs[i], xs[j]);
            acc2.add(ph * (s2[i] - s2[j]) - S2[i] + S2[j], xs[i], xs[j]);
        }
    }
    return {acc1.report(n, margin), acc2.report(n, margin)};
}

std::vector<ConstCheck> check_const(const PartiallyAffineParams& p) {
    std::vector<ConstCheck> out;
    const bool hm = p.has_minus_side();
    const bool hp = p.has_plus_side();
    auto add_eq = [&](const std::string& name, double lhs, double rhs) {
        const bool pass =
            std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::max(std::fabs(lhs), std::fabs(rhs)));
        out.push_back({name, lhs, rhs, pass});
    };
    if (hm && hp)
        out.push_back({"D^- * D^+ != 0", p.D_minus * p.D_plus, 0.0,
                       std::fabs(p.D_minus * p.D_plus) > 1e-12});
    else if (hm)
        out.push_back({"D^- != 0", p.D_minus, 0.0, std::fabs(p.D_minus) > 1e-12});
    else if (hp)
        out.push_back({"D^+ != 0", p.D_plus, 0.0, std::fabs(p.D_plus) > 1e-12});
    if (hm) {
        add_eq("C^- + A/2 = B*D^-", p.C_minus + 0.5 * p.A, p.B * p.D_minus);
        add_eq("gamma_1^- + alpha/2 = B*delta_1^- + beta_1", p.gamma1_minus + 0.5 * p.alpha,
               p.B * p.delta1_minus + p.beta1);
        add_eq("gamma_2^- + alpha/2 = B*delta_2^- + beta_2", p.gamma2_minus + 0.5 * p.alpha,
               p.B * p.delta2_minus + p.beta2);
    }
    if (hp) {
        add_eq("C^+ + A/2 = B*D^+", p.C_plus + 0.5 * p.A, p.B * p.D_plus);
        add_eq("gamma_1^+ + alpha/2 = B*delta_1^+ + beta_1", p.gamma1_plus + 0.5 * p.alpha,
               p.B * p.delta1_plus + p.beta1);
        add_eq("gamma_2^+ + alpha/2 = B*delta_2^+ + beta_2", p.gamma2_plus + 0.5 * p.alpha,
               p.B * p.delta2_plus + p.beta2);
    }
    return out;
}

// ---------------------------------------------------------------------------
// affinity classification
// ---------------------------------------------------------------------------

namespace {

// range <= tol*(1+|median|) over d[i..j]
bool run_ok(std::vector<double> window, double tol) {
    std::sort(window.begin(), window.end());
    const double range = window.back() - window.front();
    const std::size_t n = window.size();
    const double median =
        (n % 2 == 1) ? window[n / 2] : 0.5 * (window[n / 2 - 1] + window[n / 2]);
    return range <= tol * (1.0 + std::fabs(median));
}

}  // namespace

AffinityReport classify_affine_intervals(const Fn1D& F, double tol, int n) {
    if (n < 16) throw SpecError("classification needs n >= 16");
    const OpenInterval dom = F.domain();
    const OpenInterval box = dom.shrunk(F.default_margin());
    const auto xs = linspace(box.lo, box.hi, n);
    std::vector<double> d(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) d[i] = F.deriv_inner(xs[i]);

    // greedy maximal runs under the range/median rule, kept sorted as we grow
    std::vector<std::pair<std::size_t, std::size_t>> runs;  // [first, last]
    std::size_t i = 0;
    while (i < d.size()) {
        std::vector<double> win{d[i]};
        double lo = d[i], hi = d[i];
        std::size_t j = i;
        while (j + 1 < d.size()) {
            const double v = d[j + 1];
            const double nlo = std::min(lo, v), nhi = std::max(hi, v);
            win.insert(std::upper_bound(win.begin(), win.end(), v), v);
            const std::size_t m = win.size();
            const double median =
                (m % 2 == 1) ? win[m / 2] : 0.5 * (win[m / 2 - 1] + win[m / 2]);
            if (nhi - nlo <= tol * (1.0 + std::fabs(median))) {
                lo = nlo;
                hi = nhi;
                ++j;
            } else {
                win.erase(std::lower_bound(win.begin(), win.end(), v));
                break;
            }
        }
        runs.emplace_back(i, j);
        i = j + 1;
    }

    // merge neighbours whose union still satisfies the rule
    bool merged = true;
    while (merged && runs.size() > 1) {
        merged = false;
        for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
            if (runs[k].second + 1 != runs[k + 1].first) continue;
            std::vector<double> window(d.begin() + static_cast<long>(runs[k].first),
                                       d.begin() + static_cast<long>(runs[k + 1].second) + 1);
            if (run_ok(std::move(window), tol)) {
                runs[k].second = runs[k + 1].second;
                runs.erase(runs.begin() + static_cast<long>(k) + 1);
                merged = true;
                break;
            }
        }
    }

    AffinityReport rep;
    rep.tol = tol;
    rep.n = n;
    std::size_t longest = 0;
    for (const auto& r : runs) longest = std::max(longest, r.second - r.first + 1);

    for (const auto& r : runs) {
        const std::size_t len = r.second - r.first + 1;
        if (len <= 3) continue;
        // least-squares affine fit of F on the run
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = r.first; k <= r.second; ++k) {
            const double y = F.eval_inner(xs[k]);
            sx += xs[k];
            sy += y;
            sxx += xs[k] * xs[k];
            sxy += xs[k] * y;
        }
        const double nn = static_cast<double>(len);
        const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / nn;
        rep.intervals.push_back({OpenInterval(xs[r.first], xs[r.second]), slope, intercept});
    }

    if (runs.size() == 1 && longest == d.size())
        rep.verdict = Regime::Affine;
    else if (longest <= 3)
        rep.verdict = Regime::NowhereAffine;
    else
        rep.verdict = Regime::PartiallyAffine;
    return rep;
}

// ---------------------------------------------------------------------------
// canonical kernel-equation triples
// ---------------------------------------------------------------------------

namespace {

// piecewise constants: values[k] on [breaks[k-1], breaks[k]] with the outer
// boundaries at the interval ends
Fn1D step_fn(const OpenInterval& I, const std::vector<double>& breaks,
             const std::vector<double>& values) {
    std::vector<Fn1D::Piece> ps;
    double cursor = I.lo;
    for (std::size_t k = 0; k < breaks.size(); ++k) {
        if (breaks[k] - cursor > 0.0) {
            ps.push_back({cursor, breaks[k], Fn1D::AffineBody{0.0, values[k]}});
            cursor = breaks[k];
        }
    }
    if (I.hi - cursor > 0.0) ps.push_back({cursor, I.hi, Fn1D::AffineBody{0.0, values.back()}});
    if (ps.empty()) ps.push_back({I.lo, I.hi, Fn1D::AffineBody{0.0, values.back()}});
    ps.front().lo = I.lo;
    ps.back().hi = I.hi;
    return Fn1D(I, std::move(ps));
}

// zero on the closed intervals `zeros` (merged upstream), `value` elsewhere.
// Zero pieces own both endpoints: their right bound is nudged one ulp so a
// grid point landing exactly on a zero-set endpoint still reads 0.
Fn1D flag_fn(const OpenInterval& S, std::vector<std::pair<double, double>> zeros, double value) {
    std::vector<Fn1D::Piece> ps;
    double cursor = S.lo;
    for (auto [zlo, zhi] : zeros) {
        zlo = std::max(zlo, S.lo);
        zhi = std::min(zhi, S.hi);
        if (zhi < cursor) continue;
        zlo = std::max(zlo, cursor);
        if (zlo - cursor > 0.0) ps.push_back({cursor, zlo, Fn1D::AffineBody{0.0, value}});
        double owned_hi = std::nextafter(zhi, std::numeric_limits<double>::infinity());
        owned_hi = std::min(owned_hi, S.hi);
        if (owned_hi - zlo > 0.0) {
            ps.push_back({zlo, owned_hi, Fn1D::AffineBody{0.0, 0.0}});
            cursor = owned_hi;
        }
    }
    if (S.hi - cursor > 0.0) ps.push_back({cursor, S.hi, Fn1D::AffineBody{0.0, value}});
    if (ps.empty()) ps.push_back({S.lo, S.hi, Fn1D::AffineBody{0.0, value}});
    ps.front().lo = S.lo;
    ps.back().hi = S.hi;
    return Fn1D(S, std::move(ps));
}

std::vector<std::pair<double, double>> merge_closed(
    std::vector<std::pair<double, double>> zs) {
    std::sort(zs.begin(), zs.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& z : zs) {
        if (!out.empty() && z.first <= out.back().second) {
            out.back().second = std::max(out.back().second, z.second);
        } else {
            out.push_back(z);
        }
    }
    return out;
}

}  // namespace

AuxTriple aux_triple(const AuxTripleSpec& s) {
    const OpenInterval S(0.5 * (s.I1.lo + s.I2.lo), 0.5 * (s.I1.hi + s.I2.hi));
    const double filler = s.D + s.filler_offset;

    if (s.kase == 1) {
        if (s.phi_vanishes) {
            Fn1D phi = Fn1D::constant(S, 0.0);
            Fn1D psi1 = s.free_psi1 ? *s.free_psi1
                                    : Fn1D::closed_form(s.I1, ex::sin(Expr::var()));
            Fn1D psi2 = s.free_psi2 ? *s.free_psi2
                                    : Fn1D::closed_form(s.I2, ex::cos(Expr::var()));
            return {std::move(phi), std::move(psi1), std::move(psi2), s.I1, s.I2};
        }
        Fn1D phi = s.free_phi ? *s.free_phi : Fn1D::closed_form(S, Expr::poly({0.0, 1.0}));
        return {std::move(phi), Fn1D::constant(s.I1, s.D), Fn1D::constant(s.I2, s.D), s.I1,
                s.I2};
    }

    if (s.kase == 2) {
        auto check_side = [](double a, double b, const OpenInterval& I, const char* which) {
            if (!(I.lo <= a + kEndpointSlack && a <= b + kEndpointSlack &&
                  b <= I.hi + kEndpointSlack))
                throw SpecError(std::string("case 2 needs inf ") + which + " <= a <= b <= sup " +
                                which);
            if (!(a < I.hi - kEndpointSlack))
                throw SpecError(std::string("case 2: U_") + which + " must differ from I");
            if (!(b > I.lo + kEndpointSlack))
                throw SpecError(std::string("case 2: V_") + which + " must differ from I");
        };
        check_side(s.a1, s.b1, s.I1, "1");
        check_side(s.a2, s.b2, s.I2, "2");
        const bool U_both = s.a1 > s.I1.lo + kEndpointSlack && s.a2 > s.I2.lo + kEndpointSlack;
        const bool V_both = s.b1 < s.I1.hi - kEndpointSlack && s.b2 < s.I2.hi - kEndpointSlack;
        if (!U_both && !V_both)
            throw SpecError("case 2 needs U_1, U_2 both nonempty or V_1, V_2 both nonempty");

        Fn1D psi1 = step_fn(s.I1, {s.a1, s.b1}, {s.D, filler, s.E});
        Fn1D psi2 = step_fn(s.I2, {s.a2, s.b2}, {s.D, filler, s.E});
        const double z_lo = std::min(0.5 * (s.a1 + s.I2.lo), 0.5 * (s.I1.lo + s.a2));
        const double z_hi = std::max(0.5 * (s.b1 + s.I2.hi), 0.5 * (s.I1.hi + s.b2));
        Fn1D phi = flag_fn(S, {{z_lo, z_hi}}, s.phi_value);
        return {std::move(phi), std::move(psi1), std::move(psi2), s.I1, s.I2};
    }

    if (s.kase == 3) {
        if (s.j != 1 && s.j != 2) throw SpecError("case 3 index j must be 1 or 2");
        const OpenInterval& Ij = (s.j == 1) ? s.I1 : s.I2;
        const OpenInterval& Ii = (s.j == 1) ? s.I2 : s.I1;
        auto ws = s.windows;
        std::sort(ws.begin(), ws.end(),
                  [](const OpenInterval& a, const OpenInterval& b) { return a.lo < b.lo; });
        for (std::size_t k = 0; k < ws.size(); ++k) {
            if (!Ii.contains_interval(ws[k], kEndpointSlack))
                throw SpecError("case 3 window " + ws[k].str() + " escapes " + Ii.str());
            if (k > 0 && ws[k].lo < ws[k - 1].hi - kEndpointSlack)
                throw SpecError("case 3 windows must be disjoint");
        }
        if (ws.size() == 1 && ws[0].same_as(Ii))
            throw SpecError("case 3 windows must not cover all of I");

        // complement components of the window union, closed in I_i; the open
        // ends of I_i cannot carry singleton components, interior gaps can
        std::vector<std::pair<double, double>> comps;
        double cursor = Ii.lo;
        bool at_open_end = true;
        for (const auto& w : ws) {
            if (at_open_end ? w.lo > cursor : w.lo >= cursor) comps.emplace_back(cursor, w.lo);
            cursor = w.hi;
            at_open_end = false;
        }
        if (cursor < Ii.hi) comps.emplace_back(cursor, Ii.hi);

        // psi on I_i: D on the windows, filler on the complement
        std::vector<double> breaks, values;
        cursor = Ii.lo;
        for (const auto& w : ws) {
            breaks.push_back(w.lo);
            values.push_back(filler);
            breaks.push_back(w.hi);
            values.push_back(s.D);
        }
        values.push_back(filler);
        Fn1D psi_i = step_fn(Ii, breaks, values);
        Fn1D psi_j = Fn1D::constant(Ij, s.D);

        std::vector<std::pair<double, double>> zeros;
        zeros.reserve(comps.size());
        for (const auto& cpt : comps)
            zeros.emplace_back(0.5 * (cpt.first + Ij.lo), 0.5 * (cpt.second + Ij.hi));
        Fn1D phi = flag_fn(S, merge_closed(std::move(zeros)), s.phi_value);

        if (s.j == 1)
            return {std::move(phi), std::move(psi_j), std::move(psi_i), s.I1, s.I2};
        return {std::move(phi), std::move(psi_i), std::move(psi_j), s.I1, s.I2};
    }

    throw SpecError("aux triple case must be 1, 2 or 3");
}

}  // namespace pexider
