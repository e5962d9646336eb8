#include <doctest.h>

#include <cmath>

#include "mext/errors.hpp"
#include "mext/micromag.hpp"
#include "mext/norms.hpp"

using namespace mext;

namespace {

const std::array<double, 3> kLo{0.0, 0.0, 0.0};
const std::array<double, 3> kHi{1.0, 1.0, 1.0};

// 16^d grid with a single centered hole (lambda 0.1 keeps it admissible at
// epsilon 1/2)
GridPtr grid16(int dim) {
    MicroCell cell = make_microcell_disk(dim, {0.0, 0.0, 0.0}, 0.3);
    return build_grid(cell, kLo, kHi, 0.5, 0.1, std::sqrt(static_cast<double>(dim)), 0.5 / 8,
                      Variant::Safe);
}

VectorField solid_constant(GridPtr g, const Vec& q) {
    VectorField f = make_field(g, q.size());
    for (std::int64_t i = 0; i < g->cellCount(); ++i)
        if (g->mask[static_cast<std::size_t>(i)] == CellLabel::Solid) f.setValue(i, q);
    return f;
}

} // namespace

TEST_CASE("energy closed forms") {
    GridPtr g = grid16(2);
    EnergyConfig cfg;

    SUBCASE("alignment with the easy axis costs nothing") {
        cfg.anisotropyWeight = 7.0;
        VectorField m = solid_constant(g, Vec{0.0, 1.0}); // the default axis
        CHECK(micromag_energy(m, cfg) == 0.0);
    }
    SUBCASE("a constant perpendicular to the axis pays kappa per unit volume") {
        cfg.anisotropyWeight = 1.0;
        VectorField m = solid_constant(g, Vec{1.0, 0.0});
        double solidVol =
            static_cast<double>(g->countLabel(CellLabel::Solid)) * g->cellVolume();
        // exchange vanishes, anisotropy contributes exactly vol per cell
        CHECK(micromag_energy(m, cfg) == solidVol);
    }
    SUBCASE("energy dominates the exchange seminorm") {
        cfg.anisotropyWeight = 10.0;
        ManifoldSpec circle = make_manifold(ManifoldKind::Sphere, 2);
        VectorField m = random_unit_field(g, circle, 3);
        double s = w1p_seminorm(m, 2.0, NormRegion::Solid);
        double e = micromag_energy(m, cfg);
        CHECK(e >= s * s * (1.0 - 1e-12));
        CHECK(e > s * s); // the anisotropy of a random field is positive
    }
    SUBCASE("non-unit values are rejected by the checked entry point") {
        VectorField m = solid_constant(g, Vec{2.0, 0.0});
        CHECK_THROWS_AS(micromag_energy(m, cfg), ConstraintViolation);
        CHECK_NOTHROW(micromag_energy_raw(m, cfg));
    }
    SUBCASE("config and field contract checks") {
        VectorField m = solid_constant(g, Vec{0.0, 1.0});
        EnergyConfig bad = cfg;
        bad.exchange = 0.0;
        CHECK_THROWS_AS(micromag_energy(m, bad), ContractError);
        bad = cfg;
        bad.anisotropyWeight = -1.0;
        CHECK_THROWS_AS(micromag_energy(m, bad), ContractError);
        bad = cfg;
        bad.anisotropyAxis = Vec{0.0, 0.0};
        CHECK_THROWS_AS(micromag_energy(m, bad), ContractError);
        bad = cfg;
        bad.anisotropyAxis = Vec{1.0, 0.0, 0.0}; // wrong arity
        CHECK_THROWS_AS(micromag_energy(m, bad), ContractError);
        VectorField empty = make_field(g, 2);
        CHECK_THROWS_AS(micromag_energy(empty, cfg), EmptyRegion);
    }
}

TEST_CASE("analytic gradient matches finite differences") {
    GridPtr g = grid16(2);
    EnergyConfig cfg;
    cfg.exchange = 1.3;
    cfg.anisotropyWeight = 2.5;
    ManifoldSpec circle = make_manifold(ManifoldKind::Sphere, 2);
    VectorField m = random_unit_field(g, circle, 5);
    VectorField grad = micromag_gradient(m, cfg);

    const double t = 1e-6;
    int probes = 0;
    for (std::int64_t idx = 0; idx < g->cellCount() && probes < 100; ++idx) {
        if (!m.isDefined(idx)) continue;
        for (int comp = 0; comp < 2 && probes < 100; ++comp, ++probes) {
            VectorField plus = m;
            VectorField minus = m;
            Vec vp = m.value(idx), vm = m.value(idx);
            vp[comp] += t;
            vm[comp] -= t;
            plus.setValue(idx, vp);
            minus.setValue(idx, vm);
            double fd = (micromag_energy_raw(plus, cfg) - micromag_energy_raw(minus, cfg)) /
                        (2.0 * t);
            double an = grad.value(idx)[comp];
            CHECK(std::fabs(fd - an) <= 1e-5 * std::max(1.0, std::fabs(an)));
        }
    }
    CHECK(probes == 100);
}

TEST_CASE("descent reaches the known minimizers") {
    SUBCASE("exchange only, free boundary: constants win") {
        GridPtr g = grid16(3);
        EnergyConfig cfg;
        MinimizeResult r = minimize_energy(g, cfg, 42);
        CHECK(r.converged);
        CHECK(r.monotone);
        CHECK(r.finalEnergy <= 1e-6); // measured 8.3e-11 at the default tolerance
        CHECK(r.warnings.empty());
    }
    SUBCASE("strong anisotropy aligns every cell with an easy direction") {
        GridPtr g = grid16(3);
        EnergyConfig cfg;
        cfg.anisotropyWeight = 10.0;
        MinimizeResult r = minimize_energy(g, cfg, 42);
        CHECK(r.converged);
        CHECK(r.finalEnergy <= 1e-6); // measured 7.4e-11
        Vec e{0.0, 0.0, 1.0};
        std::int64_t solid = 0, aligned = 0;
        for (std::int64_t i = 0; i < g->cellCount(); ++i) {
            if (!r.field.isDefined(i)) continue;
            ++solid;
            if (std::fabs(dot(r.field.value(i), e)) >= std::cos(1e-3)) ++aligned;
        }
        // measured: every solid cell within 1e-3 radians of +-e
        CHECK(static_cast<double>(aligned) >= 0.99 * static_cast<double>(solid));
    }
    SUBCASE("uniform collar pins the answer to the axis") {
        GridPtr g = grid16(2);
        EnergyConfig cfg;
        cfg.gradTolerance = 1e-6;
        MinimizeResult r = minimize_energy(g, cfg, 42, CollarPinning::Uniform);
        CHECK(r.converged);
        CHECK(r.finalEnergy <= 1e-8); // measured 7.7e-16
        Vec e{0.0, 1.0};
        for (std::int64_t i = 0; i < g->cellCount(); ++i) {
            if (!r.field.isDefined(i)) continue;
            CHECK(norm(r.field.value(i) - e) <= 1e-3);
        }
    }
    SUBCASE("wall pinning keeps the two faces fixed and pays for the wall") {
        GridPtr g = grid16(2);
        EnergyConfig cfg;
        MinimizeResult r = minimize_energy(g, cfg, 42, CollarPinning::Wall);
        CHECK(r.converged);
        CHECK(r.finalEnergy > 0.0);
        for (std::int64_t i = 0; i < g->cellCount(); ++i) {
            if (!r.field.isDefined(i)) continue;
            auto c = g->unpack(i);
            if (c[0] == 0) {
                CHECK(r.field.value(i)[0] == 0.0);
                CHECK(r.field.value(i)[1] == 1.0);
            } else if (c[0] == g->dims[0] - 1) {
                CHECK(r.field.value(i)[0] == 0.0);
                CHECK(r.field.value(i)[1] == -1.0);
            }
        }
    }
    SUBCASE("a tiny iteration budget reports honestly") {
        GridPtr g = grid16(2);
        EnergyConfig cfg;
        cfg.anisotropyWeight = 10.0;
        cfg.maxIters = 3;
        MinimizeResult r = minimize_energy(g, cfg, 42);
        CHECK(!r.converged);
        CHECK(!r.warnings.empty());
        CHECK(r.iterations == 3);
        CHECK(std::isfinite(r.finalEnergy));
        for (std::int64_t i = 0; i < g->cellCount(); ++i)
            if (r.field.isDefined(i))
                CHECK(std::fabs(norm(r.field.value(i)) - 1.0) <= 1e-12);
    }
    SUBCASE("general-variant grids are rejected") {
        MicroCell cell = make_microcell_disk(2, {0.0, 0.0, 0.0}, 0.3);
        GridPtr g = build_grid(cell, kLo, kHi, 0.5, 0.1, std::sqrt(2.0), 0.5 / 8,
                               Variant::General);
        EnergyConfig cfg;
        CHECK_THROWS_AS(minimize_energy(g, cfg, 42), ContractError);
    }
}

TEST_CASE("homogenization sweep holds the compactness ingredients") {
    FixtureDescriptor geo;
    geo.cell = make_microcell_disk(2, {0.0, 0.0, 0.0}, 0.3);
    geo.lambda = 0.1;
    EnergyConfig cfg;
    ManifoldSpec circle = make_manifold(ManifoldKind::Sphere, 2);
    TranslationSearchConfig tcfg;

    // uniform pinning makes the minimizer the constant axis field, so the
    // W^{1,2} norms sit at the domain volume's square root at every epsilon
    auto rows = homogenization_study(geo, {0.5, 1.0 / 3.0}, cfg, circle, tcfg,
                                     CollarPinning::Uniform);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].epsilon == 0.5);
    CHECK(rows[1].epsilon == doctest::Approx(1.0 / 3.0));
    for (const auto& r : rows) {
        CHECK(r.converged);
        CHECK(r.w12Norm == doctest::Approx(1.0).epsilon(0.02));
        CHECK(r.constraintViolation <= 1e-12);
        CHECK(r.minimalEnergy <= 1e-6);
    }
    CHECK_THROWS_AS(
        homogenization_study(geo, {}, cfg, circle, tcfg, CollarPinning::Uniform),
        ContractError);
}
