#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "mext/field.hpp"
#include "mext/manifold.hpp"

namespace mext {

// Geometry plus fixture identity; everything a study needs to rebuild its
// grids and fields from scratch, deterministically.
struct FixtureDescriptor {
    std::string fixtureId = "affine-0"; // constant | affine-K | converging-K | random
    MicroCell cell;
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{1.0, 1.0, 1.0};
    double lambda = 1.0;
    double mu = 0.0;         // <= 0 selects sqrt(dim)
    int cellsPerEpsilon = 8; // lattice cube resolution n; spacing = epsilon/n
    std::uint64_t seed = 42;
};

// Affine ambient map x -> a + B x; rows[i] holds row i of B (one per output
// component, each of the grid dimension).
struct AffineMap {
    Vec a;
    std::array<Vec, 4> rows;
};

// Constant field q (retracted onto N) on the solid cells.
VectorField constant_field(GridPtr grid, const ManifoldSpec& spec, const Vec& q);

// retract(a + B x) sampled on the solid cells. When lipBound is non-null it
// receives the analytic Lipschitz bound ||B||_F / min|a + B x|, with the
// minimum lower-bounded by |a| - ||B||_F * max|x| over the domain box (the
// map must stay away from the retraction's singular set for the bound to be
// finite; the generator throws if that certificate fails).
VectorField affine_normalized_field(GridPtr grid, const ManifoldSpec& spec, const AffineMap& map,
                                    double* lipBound = nullptr);

// Fixed five-member family of affine maps (member 0..4) for the given grid
// dimension and ambient dimension; parameters are frozen by an internal
// generator so every run sees the same family.
AffineMap standard_affine_family(int member, int dim, int ambientDim);

// Member k of a family converging (geometrically in k) to the member-0
// affine field: retract((a0 + B0 x) + 2^-k * 0.3 * (a1 + B1 x)).
VectorField converging_family_member(GridPtr grid, const ManifoldSpec& spec, int k,
                                     double* lipBound = nullptr);

// Independent per-cell values drawn uniformly on N (seeded, reproducible).
VectorField random_unit_field(GridPtr grid, const ManifoldSpec& spec, std::uint64_t seed);

} // namespace mext
