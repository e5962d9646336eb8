#include "mext/perforation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "mext/errors.hpp"

namespace mext {

namespace {

// Tolerance for geometric inclusion tests, scaled by eps where relevant.
constexpr double kGeomTol = 1e-12;

// Closed axis-aligned extent of the scaled hole eps*(Q_0 + z) along axis k.
void hole_extent(const MicroCell& cell, const LatticeZ& z, double eps, int k,
                 double& out_lo, double& out_hi) {
    auto ks = static_cast<std::size_t>(k);
    double c = eps * (static_cast<double>(z[ks]) + cell.center[ks]);
    double half = (cell.shape == HoleShape::Disk) ? eps * cell.radius : eps * cell.halfWidths[ks];
    out_lo = c - half;
    out_hi = c + half;
}

// eps*(Q_0+z) inside the retracted box (lo+margin, hi-margin). Per-axis
// interval containment is exact for both shapes (balls and boxes).
bool hole_inside_retract(const MicroCell& cell, const LatticeZ& z, double eps,
                         const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                         double margin) {
    for (int k = 0; k < cell.dim; ++k) {
        auto ks = static_cast<std::size_t>(k);
        if (hi[ks] - margin <= lo[ks] + margin) return false;
        double a, b;
        hole_extent(cell, z, eps, k, a, b);
        if (a < lo[ks] + margin - kGeomTol * eps) return false;
        if (b > hi[ks] - margin + kGeomTol * eps) return false;
    }
    return true;
}

// Open cube eps*(Q+z) meets the open domain box.
bool cube_meets_domain(const LatticeZ& z, double eps, int dim,
                       const std::array<double, 3>& lo, const std::array<double, 3>& hi) {
    for (int k = 0; k < dim; ++k) {
        auto ks = static_cast<std::size_t>(k);
        double a = eps * (static_cast<double>(z[ks]) - 0.5);
        double b = eps * (static_cast<double>(z[ks]) + 0.5);
        if (!(a < hi[ks] - kGeomTol * eps && b > lo[ks] + kGeomTol * eps)) return false;
    }
    return true;
}

// Open cube eps*(Q+z) avoids the domain boundary (given that it meets the
// domain): the cube must fit inside the closed box, faces may coincide.
bool cube_avoids_boundary(const LatticeZ& z, double eps, int dim,
                          const std::array<double, 3>& lo, const std::array<double, 3>& hi) {
    for (int k = 0; k < dim; ++k) {
        auto ks = static_cast<std::size_t>(k);
        double a = eps * (static_cast<double>(z[ks]) - 0.5);
        double b = eps * (static_cast<double>(z[ks]) + 0.5);
        if (a < lo[ks] - kGeomTol * eps) return false;
        if (b > hi[ks] + kGeomTol * eps) return false;
    }
    return true;
}

struct ZLess {
    bool operator()(const LatticeZ& a, const LatticeZ& b) const {
        return a < b;
    }
};

} // namespace

std::int64_t PerforatedGrid::countLabel(CellLabel label) const {
    std::int64_t n = 0;
    for (CellLabel m : mask)
        if (m == label) ++n;
    return n;
}

double PerforatedGrid::boundaryDistance(const std::array<double, 3>& x) const {
    double d = 1e300;
    for (int k = 0; k < dim; ++k) {
        auto ks = static_cast<std::size_t>(k);
        d = std::min(d, std::min(x[ks] - lo[ks], hi[ks] - x[ks]));
    }
    return d;
}

GridPtr build_grid(const MicroCell& cell, const std::array<double, 3>& lo,
                   const std::array<double, 3>& hi, double epsilon, double lambda,
                   double mu, double spacing, Variant variant) {
    const int d = cell.dim;
    double minSide = 1e300;
    for (int k = 0; k < d; ++k) {
        auto ks = static_cast<std::size_t>(k);
        double side = hi[ks] - lo[ks];
        if (!(side > 0.0)) throw InvalidShape("domain box has a non-positive side");
        minSide = std::min(minSide, side);
    }
    if (!(epsilon > 0.0)) throw InvalidShape("epsilon must be positive");
    if (epsilon > minSide * (1.0 + kGeomTol))
        throw EpsilonTooLarge("epsilon " + std::to_string(epsilon) +
                              " exceeds the smallest domain side " + std::to_string(minSide));
    if (!(lambda >= 0.0)) throw InvalidShape("lambda must be non-negative");
    if (!(mu > 0.0)) throw InvalidShape("mu must be positive");
    if (!(spacing > 0.0)) throw InvalidShape("spacing must be positive");

    double nReal = epsilon / spacing;
    double nRound = std::round(nReal);
    if (std::abs(nReal - nRound) > 1e-9 * nReal || nRound < 8.0)
        throw ResolutionTooCoarse("spacing must divide epsilon with at least 8 cells per lattice cube (got " +
                                  std::to_string(nReal) + ")");

    auto grid = std::make_shared<PerforatedGrid>();
    grid->cell = cell;
    grid->dim = d;
    grid->lo = lo;
    grid->hi = hi;
    grid->epsilon = epsilon;
    grid->lambda = lambda;
    grid->mu = mu;
    grid->spacing = spacing;
    grid->variant = variant;

    for (int k = 0; k < d; ++k) {
        auto ks = static_cast<std::size_t>(k);
        double cellsReal = (hi[ks] - lo[ks]) / spacing;
        double cellsRound = std::round(cellsReal);
        if (std::abs(cellsReal - cellsRound) > 1e-9 * cellsReal)
            throw InvalidShape("domain side along axis " + std::to_string(k) +
                               " is not a whole multiple of the spacing");
        grid->dims[ks] = static_cast<std::int64_t>(cellsRound);
    }

    // Classify lattice translations.
    std::array<int, 3> zlo{0, 0, 0}, zhi{0, 0, 0};
    for (int k = 0; k < d; ++k) {
        auto ks = static_cast<std::size_t>(k);
        zlo[ks] = static_cast<int>(std::floor(lo[ks] / epsilon)) - 2;
        zhi[ks] = static_cast<int>(std::ceil(hi[ks] / epsilon)) + 2;
    }
    std::map<LatticeZ, std::int32_t, ZLess> admissibleSet;
    LatticeZ z{0, 0, 0};
    for (z[0] = zlo[0]; z[0] <= zhi[0]; ++z[0])
        for (z[1] = zlo[1]; z[1] <= zhi[1]; ++z[1])
            for (z[2] = (d == 3 ? zlo[2] : 0); z[2] <= (d == 3 ? zhi[2] : 0); ++z[2]) {
                if (!cube_meets_domain(z, epsilon, d, lo, hi)) continue;
                if (cube_avoids_boundary(z, epsilon, d, lo, hi))
                    grid->zInterior.push_back(z);
                else
                    grid->zBoundary.push_back(z);
                if (hole_inside_retract(cell, z, epsilon, lo, hi, epsilon * lambda)) {
                    admissibleSet.emplace(z, static_cast<std::int32_t>(grid->zAdmissible.size()));
                    grid->zAdmissible.push_back(z);
                }
            }

    // Label cells by their centers; hole ownership is resolved through the
    // lattice cube containing the center.
    const std::int64_t n = grid->cellCount();
    grid->mask.assign(static_cast<std::size_t>(n), CellLabel::Solid);
    grid->holeOwner.assign(static_cast<std::size_t>(n), -1);
    std::map<LatticeZ, std::int32_t, ZLess> holeIds;

    for (std::int64_t idx = 0; idx < n; ++idx) {
        auto x = grid->center(idx);
        LatticeZ zc{0, 0, 0};
        std::array<double, 3> y{0.0, 0.0, 0.0};
        for (int k = 0; k < d; ++k) {
            auto ks = static_cast<std::size_t>(k);
            double t = x[ks] / epsilon;
            zc[ks] = static_cast<int>(std::nearbyint(t));
            y[ks] = t - static_cast<double>(zc[ks]);
        }
        if (signed_distance_to_hole(cell, y) >= 0.0) continue;
        if (variant == Variant::Safe && admissibleSet.find(zc) == admissibleSet.end()) continue;
        auto [it, inserted] = holeIds.emplace(zc, static_cast<std::int32_t>(grid->holes.size()));
        if (inserted) {
            HoleInstance h;
            h.z = zc;
            grid->holes.push_back(h);
        }
        grid->mask[static_cast<std::size_t>(idx)] = CellLabel::Hole;
        grid->holeOwner[static_cast<std::size_t>(idx)] = it->second;
        grid->holes[static_cast<std::size_t>(it->second)].cells.push_back(idx);
    }

    if (grid->countLabel(CellLabel::Solid) == 0)
        throw EmptySolidPart("perforation leaves no solid cells");
    return grid;
}

double measure_ratio(const PerforatedGrid& grid) {
    const int d = grid.dim;
    double epsD = std::pow(grid.epsilon, d);
    double holeVol = 0.0;
    if (grid.variant == Variant::Safe) {
        holeVol = grid.cell.q0 * epsD * static_cast<double>(grid.zAdmissible.size());
    } else {
        // Fully interior holes carry exactly q0*eps^d; cut holes are measured
        // by midpoint quadrature of their lattice cube clipped to the domain.
        constexpr int kSub = 48;
        for (const LatticeZ& z : grid.zInterior) {
            if (hole_inside_retract(grid.cell, z, grid.epsilon, grid.lo, grid.hi, 0.0)) {
                holeVol += grid.cell.q0 * epsD;
            }
        }
        auto quadrature = [&](const LatticeZ& z) {
            std::array<double, 3> blo{0.0, 0.0, 0.0}, bhi{0.0, 0.0, 0.0};
            double boxVol = 1.0;
            for (int k = 0; k < d; ++k) {
                auto ks = static_cast<std::size_t>(k);
                double a = grid.epsilon * (static_cast<double>(z[ks]) - 0.5);
                double b = grid.epsilon * (static_cast<double>(z[ks]) + 0.5);
                blo[ks] = std::max(a, grid.lo[ks]);
                bhi[ks] = std::min(b, grid.hi[ks]);
                if (bhi[ks] <= blo[ks]) return 0.0;
                boxVol *= bhi[ks] - blo[ks];
            }
            std::int64_t insideCount = 0;
            std::int64_t total = 1;
            for (int k = 0; k < d; ++k) total *= kSub;
            for (std::int64_t s = 0; s < total; ++s) {
                std::int64_t rem = s;
                std::array<double, 3> y{0.0, 0.0, 0.0};
                for (int k = d - 1; k >= 0; --k) {
                    auto ks = static_cast<std::size_t>(k);
                    std::int64_t ik = rem % kSub;
                    rem /= kSub;
                    double x = blo[ks] + (static_cast<double>(ik) + 0.5) * (bhi[ks] - blo[ks]) /
                                             static_cast<double>(kSub);
                    y[ks] = x / grid.epsilon - static_cast<double>(z[ks]);
                }
                if (signed_distance_to_hole(grid.cell, y) < 0.0) ++insideCount;
            }
            return boxVol * static_cast<double>(insideCount) / static_cast<double>(total);
        };
        for (const LatticeZ& z : grid.zInterior) {
            if (!hole_inside_retract(grid.cell, z, grid.epsilon, grid.lo, grid.hi, 0.0))
                holeVol += quadrature(z);
        }
        for (const LatticeZ& z : grid.zBoundary) holeVol += quadrature(z);
    }
    double solidVol = grid.domainVolume() - holeVol;
    if (!(solidVol > 0.0)) throw EmptySolidPart("holes cover the whole domain");
    return holeVol / solidVol;
}

double epsilon_threshold(const MicroCell& cell, const std::array<double, 3>& lo,
                         const std::array<double, 3>& hi) {
    const int d = cell.dim;
    std::array<double, 3> side{0.0, 0.0, 0.0};
    double volume = 1.0;
    for (int k = 0; k < d; ++k) {
        auto ks = static_cast<std::size_t>(k);
        side[ks] = hi[ks] - lo[ks];
        volume *= side[ks];
    }
    double area = 0.0;
    if (d == 2)
        area = 2.0 * (side[0] + side[1]);
    else
        area = 2.0 * (side[0] * side[1] + side[1] * side[2] + side[0] * side[2]);
    return volume * (1.0 - cell.q0) / (4.0 * std::sqrt(static_cast<double>(d)) * area * cell.q0);
}

double measure_ratio_bound(const MicroCell& cell) {
    return (1.0 + cell.q0) / (1.0 - cell.q0);
}

double general_hole_measure_in_retract(const PerforatedGrid& grid, double margin) {
    double cellVol = grid.cellVolume();
    std::int64_t count = 0;
    for (std::int64_t idx = 0; idx < grid.cellCount(); ++idx) {
        if (grid.mask[static_cast<std::size_t>(idx)] != CellLabel::Hole) continue;
        if (grid.boundaryDistance(grid.center(idx)) > margin) ++count;
    }
    double measure = cellVol * static_cast<double>(count);
    double bound = grid.cell.q0 * std::pow(grid.epsilon, grid.dim) *
                   static_cast<double>(grid.zInterior.size());
    if (measure > bound + 1e-12) {
        std::fprintf(stderr,
                     "WARN: hole measure %.17g in the margin-%.17g retract exceeds the interior-translation bound %.17g\n",
                     measure, margin, bound);
    }
    return measure;
}

} // namespace mext
