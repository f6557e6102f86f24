#include "pexider/geometry.hpp"

#include <cmath>

#include "pexider/errors.hpp"

namespace pexider {

namespace {

void require_subset(const OpenInterval& H, const OpenInterval& I) {
    if (!I.contains_interval(H, kEndpointSlack))
        throw DomainError("H=" + H.str() + " is not a subset of I=" + I.str());
}

void require_same_sense(const Fn1D& g1, const Fn1D& g2) {
    if (monotone_direction(g1) != monotone_direction(g2))
        throw MonotonicityError("g1 and g2 must be strictly monotone in the same sense");
}

}  // namespace

OpenInterval sumset_image(const Fn1D& g1, const Fn1D& g2, const OpenInterval& J1,
                          const OpenInterval& J2) {
    monotone_direction(g1);  // diagnostic error on sign change
    monotone_direction(g2);
    return image_interval(g1, J1) + image_interval(g2, J2);
}

std::pair<std::optional<OpenInterval>, std::optional<OpenInterval>> side_sets(
    const OpenInterval& H, const OpenInterval& I) {
    require_subset(H, I);
    return {make_if_nonempty(I.lo, std::min(H.lo, I.hi)),
            make_if_nonempty(std::max(H.hi, I.lo), I.hi)};
}

OpenInterval reflection_set(const OpenInterval& H, const OpenInterval& I) {
    require_subset(H, I);
    const OpenInterval reflected(2.0 * H.lo - H.hi, 2.0 * H.hi - H.lo);
    auto clipped = intersect(reflected, I);
    if (!clipped) throw NumericError("reflection of " + H.str() + " misses " + I.str());
    return *clipped;
}

std::optional<OpenInterval> restricted_preimage(const OpenInterval& H, double x, int k,
                                                const Fn1D& g1, const Fn1D& g2,
                                                const OpenInterval& I) {
    if (k != 1 && k != 2) throw SpecError("k must be 1 or 2");
    require_subset(H, I);
    if (!I.contains(x, kEndpointSlack))
        throw DomainError("x=" + std::to_string(x) + " outside I=" + I.str());
    require_same_sense(g1, g2);

    const Fn1D& gk = (k == 1) ? g1 : g2;
    const Fn1D& go = (k == 1) ? g2 : g1;
    const OpenInterval S = image_interval(g1, H) + image_interval(g2, H);
    const OpenInterval shifted = shift(S, -gk.eval_inner(x));
    auto pre = preimage_interval(go, shifted);
    if (!pre) return std::nullopt;
    return intersect(*pre, H);
}

OpenInterval extension_set(const OpenInterval& H, const Fn1D& g1, const Fn1D& g2,
                           const OpenInterval& I) {
    require_subset(H, I);
    require_same_sense(g1, g2);

    // x qualifies iff g_k(x) lands in S - g_{3-k}(H) for both k, which is an
    // interval condition thanks to monotonicity.
    const OpenInterval im1 = image_interval(g1, H);
    const OpenInterval im2 = image_interval(g2, H);
    const OpenInterval S = im1 + im2;
    auto A1 = preimage_interval(g1, OpenInterval(S.lo - im2.hi, S.hi - im2.lo));
    auto A2 = preimage_interval(g2, OpenInterval(S.lo - im1.hi, S.hi - im1.lo));
    if (!A1 || !A2) throw NumericError("extension preimage collapsed; g images inconsistent");
    auto ext = intersect(*A1, *A2);
    if (!ext) throw NumericError("extension set collapsed; g images inconsistent");
    // The result always contains H; a miss means the inverses drifted.
    if (!ext->contains_interval(H, 1e-7 * (1.0 + I.length())))
        throw NumericError("extension set " + ext->str() + " fails to contain H=" + H.str());
    return *ext;
}

IntervalSetReport interval_report(const OpenInterval& H, const Fn1D& g1, const Fn1D& g2,
                                  const OpenInterval& I) {
    IntervalSetReport r;
    r.ext = extension_set(H, g1, g2, I);
    r.ref = reflection_set(H, I);
    if (r.ext && r.ref) {
        auto star = intersect(*r.ext, *r.ref);
        if (star) r.star = *star;
    }
    auto sides = side_sets(H, I);
    r.side_minus = sides.first;
    r.side_plus = sides.second;
    return r;
}

}  // namespace pexider
