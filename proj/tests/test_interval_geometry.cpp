#include <doctest.h>

#include <random>

#include "pexider/errors.hpp"
#include "pexider/geometry.hpp"
#include "pexider/shapes.hpp"
#include "test_helpers.hpp"

using namespace pexider;

namespace {

Fn1D paper_g(const OpenInterval& I) {
    return Fn1D(I, {{I.lo, 2.0, Fn1D::AffineBody{1.0, 0.0}},
                    {2.0, I.hi, Fn1D::QuadraticBody{0.25, 0.0, 1.0}}});
}

}  // namespace

TEST_CASE("open interval basics") {
    OpenInterval iv(1.0, 2.5);
    CHECK(iv.length() == doctest::Approx(1.5));
    CHECK(iv.mid() == doctest::Approx(1.75));
    CHECK(iv.contains(1.1));
    CHECK(!iv.contains(2.5));
    CHECK_THROWS_AS(OpenInterval(2.0, 2.0), DomainError);
    CHECK_THROWS_AS(OpenInterval(3.0, 1.0), DomainError);
    CHECK(!make_if_nonempty(1.0, 1.0 + 1e-13).has_value());
    CHECK(make_if_nonempty(1.0, 1.1).has_value());
}

TEST_CASE("sumset images") {
    OpenInterval I(0.0, 4.0);
    OpenInterval J(1.0, 2.0);
    Fn1D id = Fn1D::identity(I);

    SUBCASE("identity pair") {
        OpenInterval s = sumset_image(id, id, J, J);
        CHECK(s.lo == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(s.hi == doctest::Approx(4.0).epsilon(1e-9));
    }
    SUBCASE("identity with a quadratic branch") {
        Fn1D q = Fn1D::quadratic(OpenInterval(2.0, 4.0), 0.25, 0.0, 1.0);
        OpenInterval J2(2.0, 4.0);
        OpenInterval s = sumset_image(Fn1D::identity(I), q, J2, J2);
        CHECK(s.lo == doctest::Approx(4.0).epsilon(1e-9));
        CHECK(s.hi == doctest::Approx(9.0).epsilon(1e-9));
    }
    SUBCASE("worked-example pair spans the G domain") {
        Fn1D g = paper_g(I);
        OpenInterval s = sumset_image(g, g, I, I);
        CHECK(std::fabs(s.lo - 0.0) < 1e-9);
        CHECK(std::fabs(s.hi - 10.0) < 1e-9);
    }
    SUBCASE("non-monotone input is a diagnostic error") {
        Fn1D bump = Fn1D::quadratic(I, 1.0, -4.0, 0.0);  // vertex at x=2
        CHECK_THROWS_AS(sumset_image(bump, id, I, I), MonotonicityError);
    }
}

TEST_CASE("side sets") {
    OpenInterval I(0.0, 4.0);
    SUBCASE("both sides") {
        auto [lo, hi] = side_sets(OpenInterval(1.0, 2.0), I);
        REQUIRE(lo.has_value());
        REQUIRE(hi.has_value());
        CHECK(lo->same_as(OpenInterval(0.0, 1.0)));
        CHECK(hi->same_as(OpenInterval(2.0, 4.0)));
    }
    SUBCASE("H = I leaves nothing") {
        auto [lo, hi] = side_sets(I, I);
        CHECK(!lo.has_value());
        CHECK(!hi.has_value());
    }
    SUBCASE("flush against the lower end") {
        auto [lo, hi] = side_sets(OpenInterval(0.0, 2.0), I);
        CHECK(!lo.has_value());
        REQUIRE(hi.has_value());
        CHECK(hi->same_as(OpenInterval(2.0, 4.0)));
    }
    SUBCASE("H must sit inside I") {
        CHECK_THROWS_AS(side_sets(OpenInterval(-1.0, 2.0), I), DomainError);
    }
}

TEST_CASE("reflection set") {
    OpenInterval I(0.0, 4.0);
    CHECK(reflection_set(OpenInterval(1.0, 2.0), I).same_as(OpenInterval(0.0, 3.0)));
    CHECK(reflection_set(I, I).same_as(I));
    CHECK(reflection_set(OpenInterval(3.0, 4.0), I).same_as(OpenInterval(2.0, 4.0)));
}

TEST_CASE("restricted preimages") {
    OpenInterval I(0.0, 4.0);
    OpenInterval H(1.0, 2.0);
    Fn1D id = Fn1D::identity(I);

    SUBCASE("hand-computed interval") {
        auto r = restricted_preimage(H, 0.5, 1, id, id, I);
        REQUIRE(r.has_value());
        CHECK(r->lo == doctest::Approx(1.5).epsilon(1e-9));
        CHECK(r->hi == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("x inside H reproduces H for both k") {
        for (int k : {1, 2}) {
            auto r = restricted_preimage(H, 1.3, k, id, id, I);
            REQUIRE(r.has_value());
            CHECK(r->same_as(H, 1e-9));
        }
    }
    SUBCASE("far x gives the empty set") {
        CHECK(!restricted_preimage(H, 3.5, 1, id, id, I).has_value());
    }
    SUBCASE("opposite monotone senses are rejected") {
        Fn1D down = Fn1D::affine(I, -1.0, 0.0);
        CHECK_THROWS_AS(restricted_preimage(H, 0.5, 1, id, down, I), MonotonicityError);
    }
}

TEST_CASE("extension set") {
    OpenInterval I(0.0, 4.0);
    OpenInterval H(1.0, 2.0);
    Fn1D id = Fn1D::identity(I);

    SUBCASE("identity pair") {
        OpenInterval e = extension_set(H, id, id, I);
        CHECK(e.lo == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(e.hi == doctest::Approx(3.0).epsilon(1e-9));
    }
    SUBCASE("H = I is a fixed point") {
        CHECK(extension_set(I, id, id, I).same_as(I, 1e-9));
    }
    SUBCASE("proper subintervals extend strictly") {
        Fn1D g = paper_g(I);
        OpenInterval e = extension_set(H, g, g, I);
        CHECK(e.lo < H.lo - 1e-9);
        CHECK(e.hi > H.hi + 1e-9);
    }
}

TEST_CASE("interval report bundles the constructions") {
    OpenInterval I(0.0, 4.0);
    Fn1D g = paper_g(I);
    IntervalSetReport r = interval_report(OpenInterval(1.0, 4.0), g, g, I);
    REQUIRE(r.ext.has_value());
    REQUIRE(r.ref.has_value());
    REQUIRE(r.star.has_value());
    CHECK(r.ext->same_as(I, 1e-9));
    CHECK(r.ref->same_as(I, 1e-9));
    CHECK(r.star->same_as(I, 1e-9));
    REQUIRE(r.side_minus.has_value());
    CHECK(!r.side_plus.has_value());
    CHECK(r.side_minus->same_as(OpenInterval(0.0, 1.0), 1e-9));
}

TEST_CASE("preimage-family properties over random monotone pairs") {
    std::mt19937_64 rng(20240811);
    const double slack = 1e-9;
    for (int iter = 0; iter < 25; ++iter) {
        const OpenInterval I = shapes::random_interval(rng);
        const int dir = (iter % 2 == 0) ? 1 : -1;
        const Fn1D g1 = shapes::random_monotone(rng, I, dir);
        const Fn1D g2 = shapes::random_monotone(rng, I, dir);
        const OpenInterval H = shapes::random_subinterval(rng, I);
        CAPTURE(iter);
        CAPTURE(I.lo);
        CAPTURE(I.hi);
        CAPTURE(H.lo);
        CAPTURE(H.hi);

        const OpenInterval ext = extension_set(H, g1, g2, I);
        const OpenInterval ref = reflection_set(H, I);
        CHECK(ext.contains_interval(H, slack));
        CHECK(ref.contains_interval(H, slack));
        if (!H.same_as(I, slack)) {
            const bool lo_hits = H.lo - I.lo <= slack;
            const bool hi_hits = I.hi - H.hi <= slack;
            if (!lo_hits) {
                CHECK(ext.lo < H.lo - slack);
                CHECK(ref.lo < H.lo - slack);
            }
            if (!hi_hits) {
                CHECK(ext.hi > H.hi + slack);
                CHECK(ref.hi > H.hi + slack);
            }
        }

        // approaching inf H from inside keeps the preimage equal to H
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            const double x = H.lo + eps * H.length();
            for (int k : {1, 2}) {
                auto r = restricted_preimage(H, x, k, g1, g2, I);
                REQUIRE(r.has_value());
                CHECK(r->same_as(H, 1e-7));
            }
        }

        // just below inf H the preimage is nonempty, nested, pinned at sup H
        if (H.lo - I.lo > 0.05 * I.length()) {
            const double a = H.lo;
            const double x = a - 0.02 * I.length();
            for (int k : {1, 2}) {
                auto r = restricted_preimage(H, x, k, g1, g2, I);
                if (!r) continue;  // extension may be narrower than 2% here
                CHECK(r->lo > a - slack);
                CHECK(std::fabs(r->hi - H.hi) < 1e-7);
                // monotone in the base point on [x, a]
                auto prev = r;
                for (double u : {x + (a - x) / 3.0, x + 2.0 * (a - x) / 3.0, a}) {
                    auto ru = restricted_preimage(H, u, k, g1, g2, I);
                    REQUIRE(ru.has_value());
                    CHECK(ru->lo <= prev->lo + 1e-7);
                    CHECK(ru->hi >= prev->hi - 1e-7);
                    prev = ru;
                }
            }
        }

        // mirrored decreasing pair gives the same sets
        const Fn1D n1 = Fn1D::closed_form(I, -ex::fn(g1.shared()));
        const Fn1D n2 = Fn1D::closed_form(I, -ex::fn(g2.shared()));
        CHECK(extension_set(H, n1, n2, I).same_as(ext, 1e-7));
        const double xm = 0.5 * (I.lo + H.lo);
        for (int k : {1, 2}) {
            auto r1 = restricted_preimage(H, xm, k, g1, g2, I);
            auto r2 = restricted_preimage(H, xm, k, n1, n2, I);
            CHECK(r1.has_value() == r2.has_value());
            if (r1 && r2) CHECK(r1->same_as(*r2, 1e-7));
        }
    }
}

TEST_CASE("side sums stay inside H + I") {
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 50; ++iter) {
        const OpenInterval I = shapes::random_interval(rng);
        const OpenInterval H = shapes::random_subinterval(rng, I);
        auto [lo, hi] = side_sets(H, I);
        if (!lo || !hi) continue;
        const OpenInterval sides = *lo + *hi;
        const OpenInterval big = H + I;
        CHECK(sides.lo >= big.lo - 1e-9);
        CHECK(sides.hi <= big.hi + 1e-9);
    }
}
