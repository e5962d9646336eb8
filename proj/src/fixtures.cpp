#include "mext/fixtures.hpp"

#include <cmath>

#include "mext/errors.hpp"

namespace mext {

namespace {

Vec eval_affine(const AffineMap& map, int ambient, int dim, const std::array<double, 3>& x) {
    Vec y(ambient);
    for (int i = 0; i < ambient; ++i) {
        double s = map.a[i];
        for (int k = 0; k < dim; ++k) s += map.rows[static_cast<std::size_t>(i)][k] * x[static_cast<std::size_t>(k)];
        y[i] = s;
    }
    return y;
}

double frobenius(const AffineMap& map, int ambient, int dim) {
    double s = 0.0;
    for (int i = 0; i < ambient; ++i)
        for (int k = 0; k < dim; ++k) {
            double b = map.rows[static_cast<std::size_t>(i)][k];
            s += b * b;
        }
    return std::sqrt(s);
}

VectorField retracted_field(GridPtr grid, const ManifoldSpec& spec,
                            const AffineMap& base, const AffineMap* bump, double bumpScale,
                            double* lipBound) {
    const PerforatedGrid& g = *grid;
    if (spec.ambientDim > 4) throw ContractError("ambient dimension exceeds the fixture capacity");
    VectorField f = make_field(grid, spec.ambientDim);
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (g.mask[static_cast<std::size_t>(idx)] != CellLabel::Solid) continue;
        auto x = g.center(idx);
        Vec y = eval_affine(base, spec.ambientDim, g.dim, x);
        if (bump) y = y + bumpScale * eval_affine(*bump, spec.ambientDim, g.dim, x);
        f.setValue(idx, retract(spec, y));
    }
    if (lipBound) {
        double rmax = 0.0;
        for (int k = 0; k < g.dim; ++k) {
            auto ks = static_cast<std::size_t>(k);
            double m = std::max(std::abs(g.lo[ks]), std::abs(g.hi[ks]));
            rmax += m * m;
        }
        rmax = std::sqrt(rmax);
        double bn = frobenius(base, spec.ambientDim, g.dim);
        double an = norm(base.a);
        if (bump) {
            bn += std::abs(bumpScale) * frobenius(*bump, spec.ambientDim, g.dim);
            an -= std::abs(bumpScale) * norm(bump->a);
        }
        double lowestNorm = an - bn * rmax;
        if (!(lowestNorm > 0.0))
            throw ContractError("affine fixture certificate failed: values may reach the singular set");
        *lipBound = bn / lowestNorm;
    }
    return f;
}

} // namespace

VectorField constant_field(GridPtr grid, const ManifoldSpec& spec, const Vec& q) {
    const PerforatedGrid& g = *grid;
    Vec v = retract(spec, q);
    VectorField f = make_field(grid, spec.ambientDim);
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx)
        if (g.mask[static_cast<std::size_t>(idx)] == CellLabel::Solid) f.setValue(idx, v);
    return f;
}

VectorField affine_normalized_field(GridPtr grid, const ManifoldSpec& spec, const AffineMap& map,
                                    double* lipBound) {
    return retracted_field(grid, spec, map, nullptr, 0.0, lipBound);
}

AffineMap standard_affine_family(int member, int dim, int ambientDim) {
    if (member < 0 || member > 4) throw ContractError("family member must be 0..4");
    AffineMap map;
    map.a = Vec(ambientDim);
    // Frozen parameters: |a| = 2 with B entries in [-0.25, 0.25], keeping
    // |a + B x| >= 2 - 0.25*sqrt(l*d)*max|x| > 0 on unit-scale boxes.
    Rng rng(0x5eedf00dull + 977ull * static_cast<std::uint64_t>(member) +
            31ull * static_cast<std::uint64_t>(dim) + static_cast<std::uint64_t>(ambientDim));
    Vec dir(ambientDim);
    double n = 0.0;
    while (n < 1e-3) {
        for (int i = 0; i < ambientDim; ++i) dir[i] = rng.normal();
        n = norm(dir);
    }
    map.a = (2.0 / n) * dir;
    for (int i = 0; i < ambientDim; ++i) {
        map.rows[static_cast<std::size_t>(i)] = Vec(dim);
        for (int k = 0; k < dim; ++k)
            map.rows[static_cast<std::size_t>(i)][k] = rng.uniform(-0.25, 0.25);
    }
    return map;
}

VectorField converging_family_member(GridPtr grid, const ManifoldSpec& spec, int k,
                                     double* lipBound) {
    if (k < 0) throw ContractError("family index must be non-negative");
    AffineMap base = standard_affine_family(0, grid->dim, spec.ambientDim);
    AffineMap bump = standard_affine_family(1, grid->dim, spec.ambientDim);
    double scale = 0.3 * std::pow(2.0, -static_cast<double>(k));
    return retracted_field(grid, spec, base, &bump, scale, lipBound);
}

VectorField random_unit_field(GridPtr grid, const ManifoldSpec& spec, std::uint64_t seed) {
    const PerforatedGrid& g = *grid;
    VectorField f = make_field(grid, spec.ambientDim);
    Rng rng(seed);
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (g.mask[static_cast<std::size_t>(idx)] != CellLabel::Solid) continue;
        Vec y(spec.ambientDim);
        double away = 0.0;
        while (away < 1e-3) {
            for (int i = 0; i < spec.ambientDim; ++i) y[i] = rng.normal();
            away = dist_to_singular(spec, y);
        }
        f.setValue(idx, retract(spec, y));
    }
    return f;
}

} // namespace mext
