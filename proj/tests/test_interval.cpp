#include <doctest.h>

#include "dibs/interval.hpp"
#include "dibs/random.hpp"

using namespace dibs;

TEST_CASE("iou basic values") {
    CHECK(iou(Boundary(0, 10), Boundary(0, 10)) == doctest::Approx(1.0));
    CHECK(iou(Boundary(0, 10), Boundary(5, 15)) == doctest::Approx(5.0 / 15.0));
    CHECK(iou(Boundary(0, 2), Boundary(8, 10)) == doctest::Approx(0.0));
    // degenerate boundaries score zero against anything, including themselves
    CHECK(iou(Boundary(3, 3), Boundary(0, 10)) == 0.0);
    CHECK(iou(Boundary(3, 3), Boundary(3, 3)) == 0.0);
}

TEST_CASE("giou basic values") {
    CHECK(giou(Boundary(0, 10), Boundary(5, 15)) == doctest::Approx(5.0 / 15.0));
    CHECK(giou(Boundary(0, 2), Boundary(8, 10)) == doctest::Approx(-0.6));
    CHECK(giou(Boundary(0, 10), Boundary(0, 10)) == doctest::Approx(1.0));
    CHECK(giou(Boundary(4, 4), Boundary(4, 4)) == 0.0);
}

TEST_CASE("iou symmetry and giou dominance on random intervals") {
    Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        const double a1 = rng.uniform(0, 50), a2 = rng.uniform(0, 50);
        const double b1 = rng.uniform(0, 50), b2 = rng.uniform(0, 50);
        const Boundary a(std::min(a1, a2), std::max(a1, a2));
        const Boundary b(std::min(b1, b2), std::max(b1, b2));
        CHECK(iou(a, b) == doctest::Approx(iou(b, a)));
        CHECK(giou(a, b) <= iou(a, b) + 1e-12);
        CHECK(iou(a, b) >= 0.0);
        CHECK(iou(a, b) <= 1.0);
        CHECK(giou(a, b) >= -1.0);
        CHECK(giou(a, b) <= 1.0);
        // equality iff the hull adds nothing over the union
        const double hull = std::max(a.end, b.end) - std::min(a.start, b.start);
        const double uni = a.duration() + b.duration() -
                           std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
        if (hull == uni) {
            CHECK(giou(a, b) == doctest::Approx(iou(a, b)));
        }
    }
}

TEST_CASE("uniform_init divides exactly") {
    const BoundarySet s = uniform_init(Timeline(12), 3);
    REQUIRE(s.size() == 3);
    CHECK(s.boundaries[0].start == 0.0);
    CHECK(s.boundaries[0].end == 4.0);
    CHECK(s.boundaries[1].start == 4.0);
    CHECK(s.boundaries[2].end == 12.0);

    const BoundarySet one = uniform_init(Timeline(10), 1);
    CHECK(one.boundaries[0].start == 0.0);
    CHECK(one.boundaries[0].end == 10.0);

    const BoundarySet frac = uniform_init(Timeline(10), 4);
    CHECK(frac.boundaries[1].start == doctest::Approx(2.5));
    CHECK(frac.boundaries[2].start == doctest::Approx(5.0));
    CHECK(frac.boundaries[3].start == doctest::Approx(7.5));
    CHECK(frac.boundaries[3].end == doctest::Approx(10.0));

    CHECK_THROWS_AS(uniform_init(Timeline(10), 0), std::invalid_argument);
}

TEST_CASE("uniform_init segments are ordered, disjoint, and cover the video") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + static_cast<int>(rng.uniform_index(300));
        const int n = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m)));
        const BoundarySet s = uniform_init(Timeline(m), n);
        REQUIRE(s.size() == static_cast<std::size_t>(n));
        CHECK(s.boundaries.front().start == 0.0);
        CHECK(s.boundaries.back().end == doctest::Approx(m).epsilon(1e-9));
        for (std::size_t i = 1; i < s.size(); ++i) {
            CHECK(s.boundaries[i].start == doctest::Approx(s.boundaries[i - 1].end).epsilon(1e-9));
        }
    }
}

TEST_CASE("boundary construction rejects inverted intervals") {
    CHECK_THROWS_AS(Boundary(5, 4), std::invalid_argument);
    CHECK_THROWS_AS(Boundary(-1, 4), std::invalid_argument);
    CHECK(Boundary(4, 4).degenerate());
    const Boundary b = Boundary::from_center_duration(5.0, 4.0);
    CHECK(b.start == doctest::Approx(3.0));
    CHECK(b.end == doctest::Approx(7.0));
}

TEST_CASE("clip_overlaps clips at midpoints") {
    BoundarySet s;
    s.boundaries = {Boundary(0, 6), Boundary(4, 10)};
    const BoundarySet c = clip_overlaps(s);
    CHECK(c.boundaries[0].end == doctest::Approx(5.0));
    CHECK(c.boundaries[1].start == doctest::Approx(5.0));
}
