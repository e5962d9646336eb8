#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mext/errors.hpp"
#include "mext/extend_unconstrained.hpp"
#include "mext/fixtures.hpp"

using namespace mext;

namespace {

std::array<double, 3> kLo{0.0, 0.0, 0.0};
std::array<double, 3> kHi{1.0, 1.0, 1.0};

GridPtr standard_grid(Variant variant = Variant::Safe, double eps = 0.125, int n = 8) {
    MicroCell cell = make_microcell_disk(2, {0.0, 0.0, 0.0}, 0.3);
    return build_grid(cell, kLo, kHi, eps, 1.0, std::sqrt(2.0), eps / n, variant);
}

VectorField solid_field(GridPtr g, int comps, std::uint64_t seed) {
    VectorField f = make_field(g, comps);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::int64_t i = 0; i < g->cellCount(); ++i) {
        if (g->mask[static_cast<std::size_t>(i)] != CellLabel::Solid) continue;
        Vec v(comps);
        for (int c = 0; c < comps; ++c) v[c] = u(rng);
        f.setValue(i, v);
    }
    return f;
}

} // namespace

TEST_CASE("constants extend to constants") {
    GridPtr g = standard_grid();
    VectorField f = make_field(g, 2);
    Vec c{0.3, -1.1};
    for (std::int64_t i = 0; i < g->cellCount(); ++i)
        if (g->mask[static_cast<std::size_t>(i)] == CellLabel::Solid) f.setValue(i, c);

    ExtensionDiagnostics diag;
    VectorField out = extend_unconstrained(f, 2.0, &diag);
    for (std::int64_t i = 0; i < g->cellCount(); ++i) {
        REQUIRE(out.isDefined(i));
        CHECK(std::fabs(out.value(i)[0] - c[0]) <= 1e-15);
        CHECK(std::fabs(out.value(i)[1] - c[1]) <= 1e-15);
    }
    CHECK(diag.gradOut <= 1e-13);
    CHECK(std::isnan(diag.cGrad)); // 0/0 row reported as NA
    // for constants the norm ratio is the volume ratio: 1 + holes/solid
    CHECK(diag.cFunc == doctest::Approx(std::sqrt(1.0 + measure_ratio(*g))).epsilon(1e-2));
}

TEST_CASE("solid cells are copied bit-exactly") {
    GridPtr g = standard_grid();
    VectorField f = solid_field(g, 2, 17);
    VectorField out = extend_unconstrained(f);
    for (std::int64_t i = 0; i < g->cellCount(); ++i) {
        if (g->mask[static_cast<std::size_t>(i)] != CellLabel::Solid) continue;
        CHECK(out.value(i)[0] == f.value(i)[0]);
        CHECK(out.value(i)[1] == f.value(i)[1]);
    }
}

TEST_CASE("hole values stay in the near-boundary value range") {
    // reflection blends collar data, so every filled value must lie in the
    // hull of solid values within collar reach (plus the snap slack of one
    // cell diagonal)
    GridPtr g = standard_grid();
    VectorField f = make_field(g, 1);
    double a = 3.0;
    for (std::int64_t i = 0; i < g->cellCount(); ++i)
        if (g->mask[static_cast<std::size_t>(i)] == CellLabel::Solid)
            f.setValue(i, Vec{a * g->center(i)[0]});

    VectorField out = extend_unconstrained(f);
    const double eps = g->epsilon;
    const double reach = kCollarFraction * eps + std::sqrt(2.0) * g->spacing;
    for (const HoleInstance& hole : g->holes) {
        double lo = 1e300, hi = -1e300;
        for (std::int64_t i = 0; i < g->cellCount(); ++i) {
            if (g->mask[static_cast<std::size_t>(i)] != CellLabel::Solid) continue;
            auto x = g->center(i);
            std::array<double, 3> y{x[0] / eps - hole.z[0], x[1] / eps - hole.z[1], 0.0};
            double d = eps * signed_distance_to_hole(g->cell, y);
            if (d > 0.0 && d <= reach) {
                lo = std::min(lo, f.value(i)[0]);
                hi = std::max(hi, f.value(i)[0]);
            }
        }
        REQUIRE(lo <= hi);
        for (std::int64_t idx : hole.cells) {
            CHECK(out.value(idx)[0] >= lo - 1e-12);
            CHECK(out.value(idx)[0] <= hi + 1e-12);
        }
    }
}

TEST_CASE("unit-sphere inputs keep the extension inside the unit ball") {
    GridPtr g = standard_grid();
    ManifoldSpec spec = make_manifold(ManifoldKind::Sphere, 2);
    VectorField f = random_unit_field(g, spec, 23);
    ExtensionDiagnostics diag;
    VectorField out = extend_unconstrained(f, 2.0, &diag);
    CHECK(diag.convexHullViolation <= 1e-12);
    for (std::int64_t i = 0; i < g->cellCount(); ++i)
        CHECK(norm(out.value(i)) <= 1.0 + 1e-12);
}

TEST_CASE("the extension is linear in the input") {
    GridPtr g = standard_grid();
    VectorField f = solid_field(g, 2, 5);
    VectorField h = solid_field(g, 2, 6);
    double alpha = 1.7, beta = -0.4;

    VectorField combo = make_field(g, 2);
    for (std::int64_t i = 0; i < g->cellCount(); ++i)
        if (f.isDefined(i)) combo.setValue(i, alpha * f.value(i) + beta * h.value(i));

    VectorField lhs = extend_unconstrained(combo);
    VectorField ef = extend_unconstrained(f);
    VectorField eh = extend_unconstrained(h);
    double worst = 0.0;
    for (std::int64_t i = 0; i < g->cellCount(); ++i)
        worst = std::max(worst, norm(lhs.value(i) - (alpha * ef.value(i) + beta * eh.value(i))));
    CHECK(worst <= 1e-12);
}

TEST_CASE("undefined solid cells are rejected") {
    GridPtr g = standard_grid();
    VectorField f = make_field(g, 1); // nothing defined
    CHECK_THROWS_AS(extend_unconstrained(f), UndefinedInput);
}

TEST_CASE("general variant") {
    GridPtr g = standard_grid(Variant::General);
    VectorField f = solid_field(g, 2, 9);

    SUBCASE("constant inputs fill the retracted region with the constant") {
        VectorField cf = make_field(g, 1);
        for (std::int64_t i = 0; i < g->cellCount(); ++i)
            if (g->mask[static_cast<std::size_t>(i)] == CellLabel::Solid)
                cf.setValue(i, Vec{2.5});
        double margin = 0.2;
        VectorField out = extend_unconstrained_general(cf, margin);
        for (std::int64_t i = 0; i < g->cellCount(); ++i) {
            if (g->boundaryDistance(g->center(i)) <= margin) continue;
            REQUIRE(out.isDefined(i));
            CHECK(std::fabs(out.value(i)[0] - 2.5) <= 1e-15);
        }
    }
    SUBCASE("margin excluding boundary-cut holes reproduces the safe variant") {
        GridPtr safe = standard_grid(Variant::Safe);
        VectorField fs = make_field(safe, 2);
        for (std::int64_t i = 0; i < g->cellCount(); ++i)
            if (safe->mask[static_cast<std::size_t>(i)] == CellLabel::Solid)
                fs.setValue(i, f.isDefined(i) ? f.value(i) : Vec{0.0, 0.0});

        // hole cells the two variants share, away from the boundary band
        double margin = g->epsilon;
        VectorField outG = extend_unconstrained_general(f, margin);
        VectorField outS = extend_unconstrained(fs);
        for (std::int64_t i = 0; i < g->cellCount(); ++i) {
            if (safe->mask[static_cast<std::size_t>(i)] != CellLabel::Hole) continue;
            if (g->boundaryDistance(g->center(i)) <= margin) continue;
            if (g->mask[static_cast<std::size_t>(i)] != CellLabel::Hole) continue;
            REQUIRE(outG.isDefined(i));
            CHECK(outG.value(i)[0] == doctest::Approx(outS.value(i)[0]).epsilon(1e-13));
            CHECK(outG.value(i)[1] == doctest::Approx(outS.value(i)[1]).epsilon(1e-13));
        }
    }
    SUBCASE("margin 0 runs and reports unfilled holes through diagnostics") {
        ExtensionDiagnostics diag;
        VectorField out = extend_unconstrained_general(f, 0.0, 2.0, &diag);
        std::int64_t undefinedHoleCells = 0;
        for (std::int64_t i = 0; i < g->cellCount(); ++i)
            if (g->mask[static_cast<std::size_t>(i)] == CellLabel::Hole && !out.isDefined(i))
                ++undefinedHoleCells;
        CHECK(diag.unfilledCells == undefinedHoleCells);
    }
}

TEST_CASE("nearest solid cell matches brute force with lexicographic ties") {
    GridPtr g = standard_grid(Variant::Safe, 0.5, 8);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::array<double, 3> pt{u(rng), u(rng), 0.0};
        std::int64_t best = -1;
        double bestD = 1e300;
        for (std::int64_t i = 0; i < g->cellCount(); ++i) {
            if (g->mask[static_cast<std::size_t>(i)] != CellLabel::Solid) continue;
            auto c = g->center(i);
            double d = std::hypot(pt[0] - c[0], pt[1] - c[1]);
            if (d < bestD - 1e-15) {
                bestD = d;
                best = i;
            }
        }
        CHECK(nearest_solid_cell(*g, pt) == best);
    }
}
