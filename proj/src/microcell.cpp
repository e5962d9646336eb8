#include "mext/microcell.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mext/errors.hpp"

namespace mext {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void check_dim(int dim) {
    if (dim != 2 && dim != 3)
        throw InvalidShape("microcell dimension must be 2 or 3, got " + std::to_string(dim));
}

} // namespace

MicroCell make_microcell_disk(int dim, const std::array<double, 3>& center, double radius) {
    check_dim(dim);
    if (!(radius > 0.0))
        throw InvalidShape("disk hole needs a positive radius");
    for (int i = 0; i < dim; ++i) {
        // Strict containment: the closed disk may not touch the cell faces.
        if (!(std::abs(center[static_cast<std::size_t>(i)]) + radius < 0.5))
            throw InvalidShape("disk hole exits the unit cell along axis " + std::to_string(i));
    }
    MicroCell cell;
    cell.dim = dim;
    cell.shape = HoleShape::Disk;
    cell.center = center;
    cell.radius = radius;
    cell.q0 = (dim == 2) ? kPi * radius * radius
                         : 4.0 / 3.0 * kPi * radius * radius * radius;
    if (!(cell.q0 > 0.0 && cell.q0 < 1.0))
        throw InvalidShape("hole volume fraction must lie in (0,1)");
    return cell;
}

MicroCell make_microcell_box(int dim, const std::array<double, 3>& center,
                             const std::array<double, 3>& halfWidths) {
    check_dim(dim);
    double volume = 1.0;
    for (int i = 0; i < dim; ++i) {
        auto k = static_cast<std::size_t>(i);
        if (!(halfWidths[k] > 0.0))
            throw InvalidShape("box hole needs positive half-widths");
        // Touching the cell faces is allowed; exiting is not.
        if (std::abs(center[k]) + halfWidths[k] > 0.5 + 1e-15)
            throw InvalidShape("box hole exits the unit cell along axis " + std::to_string(i));
        volume *= 2.0 * halfWidths[k];
    }
    MicroCell cell;
    cell.dim = dim;
    cell.shape = HoleShape::Box;
    cell.center = center;
    cell.halfWidths = halfWidths;
    cell.q0 = volume;
    if (!(cell.q0 > 0.0 && cell.q0 < 1.0))
        throw InvalidShape("hole volume fraction must lie in (0,1)");
    return cell;
}

double signed_distance_to_hole(const MicroCell& cell, const std::array<double, 3>& x) {
    if (cell.shape == HoleShape::Disk) {
        double r2 = 0.0;
        for (int i = 0; i < cell.dim; ++i) {
            auto k = static_cast<std::size_t>(i);
            double d = x[k] - cell.center[k];
            r2 += d * d;
        }
        return std::sqrt(r2) - cell.radius;
    }
    // Axis-aligned box: exact Euclidean distance on both sides.
    double outside2 = 0.0;
    double inside = -1e300;
    for (int i = 0; i < cell.dim; ++i) {
        auto k = static_cast<std::size_t>(i);
        double q = std::abs(x[k] - cell.center[k]) - cell.halfWidths[k];
        if (q > 0.0) outside2 += q * q;
        inside = std::max(inside, q);
    }
    return std::sqrt(outside2) + std::min(inside, 0.0);
}

std::array<double, 3> nearest_hole_boundary_point(const MicroCell& cell,
                                                  const std::array<double, 3>& x) {
    std::array<double, 3> p{0.0, 0.0, 0.0};
    if (cell.shape == HoleShape::Disk) {
        double r2 = 0.0;
        for (int i = 0; i < cell.dim; ++i) {
            auto k = static_cast<std::size_t>(i);
            double d = x[k] - cell.center[k];
            r2 += d * d;
        }
        double r = std::sqrt(r2);
        if (r < 1e-300) {
            // Center of the disk: any direction works; pick +e0.
            p = cell.center;
            p[0] += cell.radius;
            return p;
        }
        for (int i = 0; i < cell.dim; ++i) {
            auto k = static_cast<std::size_t>(i);
            p[k] = cell.center[k] + cell.radius * (x[k] - cell.center[k]) / r;
        }
        return p;
    }
    // Box. Outside (or on the surface): clamping onto the closed box lands on
    // the boundary. Inside: push the coordinate with the smallest margin to
    // its face, lowest axis first on ties.
    bool inside = true;
    for (int i = 0; i < cell.dim; ++i) {
        auto k = static_cast<std::size_t>(i);
        if (std::abs(x[k] - cell.center[k]) >= cell.halfWidths[k]) inside = false;
    }
    if (!inside) {
        for (int i = 0; i < cell.dim; ++i) {
            auto k = static_cast<std::size_t>(i);
            double lo = cell.center[k] - cell.halfWidths[k];
            double hi = cell.center[k] + cell.halfWidths[k];
            p[k] = std::clamp(x[k], lo, hi);
        }
        return p;
    }
    p = x;
    int bestAxis = 0;
    double bestMargin = 1e300;
    for (int i = 0; i < cell.dim; ++i) {
        auto k = static_cast<std::size_t>(i);
        double margin = cell.halfWidths[k] - std::abs(x[k] - cell.center[k]);
        if (margin < bestMargin) {
            bestMargin = margin;
            bestAxis = i;
        }
    }
    auto k = static_cast<std::size_t>(bestAxis);
    double side = (x[k] >= cell.center[k]) ? 1.0 : -1.0;
    p[k] = cell.center[k] + side * cell.halfWidths[k];
    return p;
}

} // namespace mext
