#pragma once

#include <cmath>
#include <limits>

#include "mext/field.hpp"
#include "mext/norms.hpp"

namespace mext {

// Collar depth around each hole, as a fraction of eps: reflection data is
// blended against the collar mean across this layer.
inline constexpr double kCollarFraction = 0.25;

struct ExtensionDiagnostics {
    double p = 2.0;
    double lpIn = 0.0;
    double lpOut = 0.0;
    double gradIn = 0.0;
    double gradOut = 0.0;
    double cFunc = std::numeric_limits<double>::quiet_NaN();
    // NaN when the input gradient vanishes (0/0 row, reported as NA).
    double cGrad = std::numeric_limits<double>::quiet_NaN();
    double convexHullViolation = 0.0;
    std::int64_t unfilledCells = 0;
};

// Linear extension of a solid-cell field into the holes of a safe-variant
// grid. Inside a hole the value is
//   w * f(snap(2*xi - x)) + (1 - w) * collarMean,
// with xi the nearest hole-boundary point, snap the nearest solid cell
// center, and w a cubic cutoff in depth/(kCollarFraction*eps): 1 at the hole
// boundary, 0 at depth kCollarFraction*eps and beyond (deep cells carry the
// collar mean). Solid cells are copied bit-exactly. Holes with an empty
// collar raise IsolatedHole.
VectorField extend_unconstrained(const VectorField& f, double p = 2.0,
                                 ExtensionDiagnostics* diag = nullptr);

// General-variant version: fills every hole (boundary-cut ones included)
// whose collar inside the domain is nonempty; holes without collar cells are
// left undefined and counted in diagnostics. The output is defined on cells
// with boundary distance > margin.
VectorField extend_unconstrained_general(const VectorField& f, double margin, double p = 2.0,
                                         ExtensionDiagnostics* diag = nullptr);

// Nearest solid cell center (ties resolved toward the lexicographically
// smallest cell index). Shared by the reflection snap and tests.
std::int64_t nearest_solid_cell(const PerforatedGrid& grid, const std::array<double, 3>& pt);

} // namespace mext
