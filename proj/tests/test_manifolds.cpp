#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "covercs/manifolds.hpp"

using namespace covercs;

namespace {

ManifoldSpec torus(int d) { return {ManifoldKind::FlatTorus, d}; }
const ManifoldSpec kMobius{ManifoldKind::MobiusStrip, 2};
const ManifoldSpec kKlein{ManifoldKind::KleinBottle, 2};
const ManifoldSpec kEuclid2{ManifoldKind::Euclidean, 2};

// deterministic uniform in [lo, hi)
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    }
    Vec point(int d, double lo, double hi) {
        Vec p(d);
        for (double& c : p) c = uniform(lo, hi);
        return p;
    }
};

DeckElement random_element(const ManifoldSpec& m, Rng& rng) {
    DeckElement g;
    g.translation.resize(m.dimension, 0);
    switch (m.kind) {
        case ManifoldKind::Euclidean: break;
        case ManifoldKind::FlatTorus:
            for (auto& t : g.translation)
                t = static_cast<std::int64_t>(std::floor(rng.uniform(-3.0, 4.0)));
            break;
        case ManifoldKind::MobiusStrip: {
            const auto n = static_cast<std::int64_t>(std::floor(rng.uniform(-4.0, 5.0)));
            g.translation = {n, 0};
            g.flip = static_cast<int>(((n % 2) + 2) % 2);
            break;
        }
        case ManifoldKind::KleinBottle: {
            const auto n = static_cast<std::int64_t>(std::floor(rng.uniform(-4.0, 5.0)));
            const auto mm = static_cast<std::int64_t>(std::floor(rng.uniform(-4.0, 5.0)));
            g.translation = {n, mm};
            g.flip = static_cast<int>(((n % 2) + 2) % 2);
            break;
        }
    }
    return g;
}

}  // namespace

TEST_CASE("manifold spec validation") {
    CHECK_NOTHROW(torus(1).validate());
    CHECK_NOTHROW(torus(4).validate());
    CHECK_NOTHROW(kMobius.validate());
    const ManifoldSpec bad_mobius{ManifoldKind::MobiusStrip, 3};
    const ManifoldSpec bad_klein{ManifoldKind::KleinBottle, 1};
    CHECK_THROWS_AS(bad_mobius.validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad_klein.validate(), std::invalid_argument);
    CHECK_THROWS_AS(torus(0).validate(), std::invalid_argument);
}

TEST_CASE("apply_deck basics") {
    SUBCASE("pure translation on the torus") {
        const Vec y = apply_deck(torus(2), DeckElement{0, {1, -1}}, Vec{0.2, 0.3});
        CHECK(y[0] == doctest::Approx(1.2).epsilon(1e-15));
        CHECK(y[1] == doctest::Approx(-0.7).epsilon(1e-15));
    }
    SUBCASE("Mobius flip plus shift") {
        const Vec y = apply_deck(kMobius, DeckElement{1, {1, 0}}, Vec{0.25, 0.4});
        CHECK(y[0] == doctest::Approx(1.25));
        CHECK(y[1] == doctest::Approx(-0.4));
    }
    SUBCASE("Klein flip then translate") {
        const Vec y = apply_deck(kKlein, DeckElement{1, {-1, 2}}, Vec{0.5, 0.5});
        CHECK(y[0] == doctest::Approx(-0.5));
        CHECK(y[1] == doctest::Approx(1.5));
    }
    SUBCASE("invalid elements rejected") {
        CHECK_THROWS_AS(apply_deck(torus(2), DeckElement{1, {0, 0}}, Vec{0.0, 0.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(apply_deck(kMobius, DeckElement{0, {1, 0}}, Vec{0.0, 0.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(apply_deck(kMobius, DeckElement{1, {1, 2}}, Vec{0.0, 0.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("pushforward") {
    CHECK(pushforward(torus(2), DeckElement{0, {3, -2}}, Vec{1.5, 2.5}) == Vec{1.5, 2.5});
    CHECK(pushforward(kMobius, DeckElement{1, {1, 0}}, Vec{1.0, 2.0}) == Vec{1.0, -2.0});

    // J^2 = Id
    const DeckElement g{1, {3, 0}};
    const Vec v{0.7, -1.3};
    CHECK(pushforward(kMobius, g, pushforward(kMobius, g, v)) == v);
}

TEST_CASE("deck group closure and inverses") {
    Rng rng(42);
    for (const ManifoldSpec& m : {torus(2), kMobius, kKlein}) {
        for (int trial = 0; trial < 200; ++trial) {
            const DeckElement g = random_element(m, rng);
            const DeckElement h = random_element(m, rng);
            const Vec x = rng.point(2, -2.0, 2.0);
            const Vec lhs = apply_deck(m, g, apply_deck(m, h, x));
            const Vec rhs = apply_deck(m, compose(m, g, h), x);
            for (int j = 0; j < 2; ++j) CHECK(lhs[j] == doctest::Approx(rhs[j]).epsilon(1e-14));

            const DeckElement gi = inverse(m, g);
            const Vec back = apply_deck(m, gi, apply_deck(m, g, x));
            for (int j = 0; j < 2; ++j) CHECK(back[j] == doctest::Approx(x[j]).epsilon(1e-14));
        }
    }
}

TEST_CASE("deck elements are isometries") {
    Rng rng(7);
    for (const ManifoldSpec& m : {torus(2), kMobius, kKlein}) {
        for (int trial = 0; trial < 200; ++trial) {
            const DeckElement g = random_element(m, rng);
            const Vec x = rng.point(2, -3.0, 3.0);
            const Vec y = rng.point(2, -3.0, 3.0);
            const double before = dist(x, y);
            const double after = dist(apply_deck(m, g, x), apply_deck(m, g, y));
            CHECK(after == doctest::Approx(before).epsilon(1e-14));
        }
    }
}

TEST_CASE("images_within examples") {
    SUBCASE("T^1 radius 1.5") {
        const auto images = images_within(torus(1), Vec{0.0}, Vec{0.3}, 1.5);
        REQUIRE(images.size() == 3);
        // sorted by distance: 0.3, -0.7, 1.3
        CHECK(images[0].point[0] == doctest::Approx(0.3));
        CHECK(images[1].point[0] == doctest::Approx(-0.7));
        CHECK(images[2].point[0] == doctest::Approx(1.3));
        CHECK(images[0].element.translation[0] == 0);
        CHECK(images[1].element.translation[0] == -1);
        CHECK(images[2].element.translation[0] == 1);
    }
    SUBCASE("T^1 empty when radius below the minimum") {
        CHECK(images_within(torus(1), Vec{0.0}, Vec{0.5}, 0.4).empty());
    }
    SUBCASE("Klein image through the flipped class") {
        const auto images = images_within(kKlein, Vec{0.25, 0.25}, Vec{0.75, 0.75}, 0.6);
        bool found = false;
        for (const auto& im : images) {
            if (im.element.flip == 1 && im.element.translation == std::vector<std::int64_t>{-1, 1}) {
                found = true;
                CHECK(im.distance == doctest::Approx(0.5));
                CHECK(im.point[0] == doctest::Approx(-0.25));
                CHECK(im.point[1] == doctest::Approx(0.25));
            }
        }
        CHECK(found);
    }
}

TEST_CASE("images_within properties") {
    Rng rng(99);
    for (const ManifoldSpec& m : {torus(2), kMobius, kKlein}) {
        for (int trial = 0; trial < 30; ++trial) {
            const Vec src = rng.point(2, -1.0, 1.0);
            const Vec tgt = rng.point(2, -1.0, 1.0);
            const double r_small = rng.uniform(0.3, 1.2);
            const double r_big = r_small + rng.uniform(0.1, 1.0);
            const auto small = images_within(m, src, tgt, r_small);
            const auto big = images_within(m, src, tgt, r_big);
            CHECK(big.size() >= small.size());
            for (const auto& im : small) {
                CHECK(im.distance <= r_small);
                CHECK(dist(im.point, src) == doctest::Approx(im.distance));
                // every small-radius image appears in the big-radius list
                bool present = false;
                for (const auto& im2 : big)
                    if (im2.element == im.element) present = true;
                CHECK(present);
            }
            // sorted by distance
            for (std::size_t i = 1; i < big.size(); ++i)
                CHECK(big[i - 1].distance <= big[i].distance);
        }
    }
}

TEST_CASE("images_within is complete against exhaustive enumeration") {
    // enumerate a generous index window by hand and compare sets exactly
    Rng rng(555);
    for (const ManifoldSpec& m : {torus(2), kMobius, kKlein}) {
        for (int trial = 0; trial < 40; ++trial) {
            const Vec src = rng.point(2, -2.0, 2.0);
            const Vec tgt = rng.point(2, -2.0, 2.0);
            const double radius = rng.uniform(0.2, 3.0);

            std::vector<DeckElement> expected;
            const int w = 9;
            if (m.kind == ManifoldKind::FlatTorus) {
                for (std::int64_t a = -w; a <= w; ++a)
                    for (std::int64_t b = -w; b <= w; ++b) {
                        const DeckElement g{0, {a, b}};
                        if (dist(apply_deck(m, g, tgt), src) <= radius) expected.push_back(g);
                    }
            } else if (m.kind == ManifoldKind::MobiusStrip) {
                for (std::int64_t n = -w; n <= w; ++n) {
                    const DeckElement g{static_cast<int>(((n % 2) + 2) % 2), {n, 0}};
                    if (dist(apply_deck(m, g, tgt), src) <= radius) expected.push_back(g);
                }
            } else {
                for (std::int64_t n = -w; n <= w; ++n)
                    for (std::int64_t b = -w; b <= w; ++b) {
                        const DeckElement g{static_cast<int>(((n % 2) + 2) % 2), {n, b}};
                        if (dist(apply_deck(m, g, tgt), src) <= radius) expected.push_back(g);
                    }
            }

            const auto got = images_within(m, src, tgt, radius);
            REQUIRE(got.size() == expected.size());
            for (const DeckElement& g : expected) {
                bool present = false;
                for (const auto& im : got) present |= (im.element == g);
                CHECK(present);
            }
        }
    }
}

TEST_CASE("min_image_distance examples") {
    SUBCASE("T^2 corner pair") {
        const MinImage mi = min_image_distance(torus(2), Vec{0.2, 0.3}, Vec{0.9, 0.9});
        CHECK(mi.distance == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(mi.element.translation == std::vector<std::int64_t>{-1, -1});
    }
    SUBCASE("T^2 extremal half-diagonal") {
        const MinImage mi = min_image_distance(torus(2), Vec{0.0, 0.0}, Vec{0.5, 0.5});
        CHECK(mi.distance == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    }
    SUBCASE("Mobius even class beats odd class") {
        const MinImage mi = min_image_distance(kMobius, Vec{0.1, 0.4}, Vec{0.9, 0.4});
        CHECK(mi.distance == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(mi.element.flip == 0);
        const MinImage odd = class_min_distance(kMobius, Vec{0.1, 0.4}, Vec{0.9, 0.4}, 1);
        CHECK(odd.distance == doctest::Approx(std::sqrt(0.68)).epsilon(1e-9));
    }
}

TEST_CASE("min image distance bounds") {
    Rng rng(1234);
    SUBCASE("torus bound sqrt(d)/2") {
        for (int d = 1; d <= 4; ++d) {
            const ManifoldSpec m = torus(d);
            for (int trial = 0; trial < 2000; ++trial) {
                const Vec x = rng.point(d, 0.0, 1.0);
                const Vec y = rng.point(d, 0.0, 1.0);
                CHECK(min_image_distance(m, x, y).distance <= std::sqrt(d) / 2.0 + 1e-12);
            }
        }
    }
    SUBCASE("Klein bound sqrt(5)/2, per class") {
        for (int trial = 0; trial < 2000; ++trial) {
            const Vec x = rng.point(2, 0.0, 1.0);
            const Vec y = rng.point(2, 0.0, 1.0);
            for (int parity = 0; parity < 2; ++parity)
                CHECK(class_min_distance(kKlein, x, y, parity).distance <=
                      std::sqrt(5.0) / 2.0 + 1e-12);
        }
    }
    SUBCASE("Mobius per-class bound sqrt(1+4L^2)") {
        const double L = 1.0;
        for (int trial = 0; trial < 2000; ++trial) {
            Vec x{rng.uniform(0.0, 1.0), rng.uniform(-L, L)};
            Vec y{rng.uniform(0.0, 1.0), rng.uniform(-L, L)};
            const double bound = std::sqrt(1.0 + 4.0 * L * L);
            CHECK(class_min_distance(kMobius, x, y, 0).distance < bound);
            CHECK(class_min_distance(kMobius, x, y, 1).distance < bound);
        }
    }
    SUBCASE("min_image_distance agrees with enumeration") {
        for (const ManifoldSpec& m : {torus(2), kMobius, kKlein}) {
            for (int trial = 0; trial < 200; ++trial) {
                const Vec x = rng.point(2, -1.5, 1.5);
                const Vec y = rng.point(2, -1.5, 1.5);
                const MinImage mi = min_image_distance(m, x, y);
                const auto images = images_within(m, x, y, mi.distance + 1e-9);
                REQUIRE(!images.empty());
                CHECK(images.front().distance == doctest::Approx(mi.distance).epsilon(1e-13));
                CHECK(dist(apply_deck(m, mi.element, y), x) ==
                      doctest::Approx(mi.distance).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("project_to_fundamental_domain") {
    SUBCASE("torus floor subtraction") {
        const auto [x, v] =
            project_to_fundamental_domain(torus(2), Vec{1.3, -0.2}, Vec{1.0, 1.0});
        CHECK(x[0] == doctest::Approx(0.3));
        CHECK(x[1] == doctest::Approx(0.8));
        CHECK(v == Vec{1.0, 1.0});
    }
    SUBCASE("Mobius odd sheet") {
        const auto [x, v] =
            project_to_fundamental_domain(kMobius, Vec{1.3, 0.7}, Vec{1.0, 2.0});
        CHECK(x[0] == doctest::Approx(0.3));
        CHECK(x[1] == doctest::Approx(-0.7));
        CHECK(v[0] == doctest::Approx(1.0));
        CHECK(v[1] == doctest::Approx(-2.0));
    }
    SUBCASE("Klein odd sheet wraps the second coordinate") {
        const auto [x, v] =
            project_to_fundamental_domain(kKlein, Vec{1.3, 1.7}, Vec{1.0, 2.0});
        CHECK(x[0] == doctest::Approx(0.3));
        CHECK(x[1] == doctest::Approx(0.3));
        CHECK(v[1] == doctest::Approx(-2.0));
    }
    SUBCASE("projection is idempotent (after arbitrary deck lifts)") {
        Rng rng(5);
        for (const ManifoldSpec& m : {torus(2), kMobius, kKlein}) {
            for (int trial = 0; trial < 200; ++trial) {
                const Vec x = rng.point(2, -4.0, 4.0);
                const Vec v = rng.point(2, -2.0, 2.0);
                const auto [px, pv] = project_to_fundamental_domain(m, x, v);
                // lift by a random deck element, re-project
                const DeckElement g = random_element(m, rng);
                const Vec lifted = apply_deck(m, g, px);
                const Vec lifted_v = pushforward(m, g, pv);
                const auto [qx, qv] = project_to_fundamental_domain(m, lifted, lifted_v);
                for (int j = 0; j < 2; ++j) {
                    CHECK(qx[j] == doctest::Approx(px[j]).epsilon(1e-12));
                    CHECK(qv[j] == doctest::Approx(pv[j]).epsilon(1e-12));
                }
                // fundamental-domain membership
                CHECK(px[0] >= 0.0);
                CHECK(px[0] < 1.0);
                if (m.kind == ManifoldKind::FlatTorus || m.kind == ManifoldKind::KleinBottle) {
                    CHECK(px[1] >= 0.0);
                    CHECK(px[1] < 1.0);
                }
            }
        }
    }
    SUBCASE("Euclidean projection is the identity") {
        const auto [x, v] =
            project_to_fundamental_domain(kEuclid2, Vec{5.5, -3.25}, Vec{1.0, 2.0});
        CHECK(x == Vec{5.5, -3.25});
        CHECK(v == Vec{1.0, 2.0});
    }
}
