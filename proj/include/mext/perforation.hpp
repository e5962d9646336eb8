#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "mext/microcell.hpp"

namespace mext {

enum class CellLabel : std::uint8_t { Solid = 0, Hole = 1, Outside = 2 };
enum class Variant { Safe, General };

using LatticeZ = std::array<int, 3>;

// One scaled hole instance eps*(Q_0 + z), with the grid cells whose centers
// fall inside it.
struct HoleInstance {
    LatticeZ z{0, 0, 0};
    std::vector<std::int64_t> cells;
};

// Uniform cell grid over an axis-aligned box domain, cut by the periodic
// perforation at scale eps. Cell centers carry the labels; hole geometry
// stays analytic (the microcell signed distance in lattice coordinates).
//
// Safe variant: holes are the translations z with eps*(Q_0+z) inside the
// retracted domain (distance > eps*lambda from the boundary). General
// variant: every lattice cube meeting the domain contributes its hole part,
// boundary-cut holes included.
struct PerforatedGrid {
    MicroCell cell;
    int dim = 2;
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{0.0, 0.0, 0.0};
    double epsilon = 0.0;
    double lambda = 0.0;
    double mu = 1.0;
    double spacing = 0.0;
    Variant variant = Variant::Safe;

    std::array<std::int64_t, 3> dims{1, 1, 1}; // 1 beyond dim
    std::vector<CellLabel> mask;               // one label per cell
    std::vector<std::int32_t> holeOwner;       // index into holes, -1 if none

    std::vector<LatticeZ> zAdmissible; // safe-variant hole translations
    std::vector<LatticeZ> zInterior;   // cube meets the domain, avoids its boundary
    std::vector<LatticeZ> zBoundary;   // cube meets the domain and its boundary
    std::vector<HoleInstance> holes;   // instances owning at least one cell

    std::int64_t cellCount() const { return dims[0] * dims[1] * dims[2]; }
    double cellVolume() const {
        double v = spacing;
        for (int i = 1; i < dim; ++i) v *= spacing;
        return v;
    }
    std::int64_t index(std::int64_t ix, std::int64_t iy, std::int64_t iz) const {
        return (ix * dims[1] + iy) * dims[2] + iz;
    }
    std::array<std::int64_t, 3> unpack(std::int64_t idx) const {
        std::array<std::int64_t, 3> c{0, 0, 0};
        c[2] = idx % dims[2];
        idx /= dims[2];
        c[1] = idx % dims[1];
        c[0] = idx / dims[1];
        return c;
    }
    std::array<double, 3> center(std::int64_t idx) const {
        auto c = unpack(idx);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int k = 0; k < dim; ++k)
            x[static_cast<std::size_t>(k)] =
                lo[static_cast<std::size_t>(k)] +
                (static_cast<double>(c[static_cast<std::size_t>(k)]) + 0.5) * spacing;
        return x;
    }
    double domainVolume() const {
        double v = 1.0;
        for (int k = 0; k < dim; ++k)
            v *= hi[static_cast<std::size_t>(k)] - lo[static_cast<std::size_t>(k)];
        return v;
    }
    std::int64_t countLabel(CellLabel label) const;
    // Distance from a point to the domain boundary (positive inside).
    double boundaryDistance(const std::array<double, 3>& x) const;
};

using GridPtr = std::shared_ptr<const PerforatedGrid>;

// Requires: eps below the smallest domain side, spacing dividing eps with at
// least 8 cells per lattice cube, domain sides whole multiples of spacing,
// lambda >= 0, mu > 0. The solid part must be nonempty.
GridPtr build_grid(const MicroCell& cell, const std::array<double, 3>& lo,
                   const std::array<double, 3>& hi, double epsilon, double lambda,
                   double mu, double spacing, Variant variant);

// Hole-to-solid volume ratio. Analytic for every fully interior hole; holes
// cut by the domain boundary (general variant) fall back to a fixed midpoint
// quadrature of the cut lattice cube.
double measure_ratio(const PerforatedGrid& grid);

// Scale below which the hole-to-solid ratio bound (1+q0)/(1-q0) is
// guaranteed: domainVolume*(1-q0) / (4*sqrt(d)*boundaryArea*q0).
double epsilon_threshold(const MicroCell& cell, const std::array<double, 3>& lo,
                         const std::array<double, 3>& hi);

// Ratio bound certified for eps <= epsilon_threshold.
double measure_ratio_bound(const MicroCell& cell);

// Cell-counted hole volume within the retracted domain (boundary distance
// > margin). Warns on stderr if it exceeds #zInterior * eps^d * q0, the
// bound valid for interior-covering margins.
double general_hole_measure_in_retract(const PerforatedGrid& grid, double margin);

} // namespace mext
