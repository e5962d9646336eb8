#include "mext/extend_unconstrained.hpp"

#include <algorithm>
#include <cmath>

#include "mext/errors.hpp"

namespace mext {

namespace {

// Cubic cutoff: 1 at s=0 falling smoothly to 0 at s>=1.
double cutoff(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 - s * s * (3.0 - 2.0 * s);
}

struct Collar {
    std::vector<std::int64_t> cells;
    Vec mean;
};

// Solid cells within distance kCollarFraction*eps of the hole, located by a
// bounding-box scan in absolute coordinates.
Collar collect_collar(const PerforatedGrid& g, const VectorField& f, const HoleInstance& hole) {
    const double eps = g.epsilon;
    const double reach = kCollarFraction * eps;
    std::array<std::int64_t, 3> clo{0, 0, 0}, chi{0, 0, 0};
    for (int k = 0; k < g.dim; ++k) {
        auto ks = static_cast<std::size_t>(k);
        double c = eps * (static_cast<double>(hole.z[ks]) + g.cell.center[ks]);
        double half = (g.cell.shape == HoleShape::Disk) ? eps * g.cell.radius
                                                        : eps * g.cell.halfWidths[ks];
        double a = c - half - reach - g.spacing;
        double b = c + half + reach + g.spacing;
        clo[ks] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((a - g.lo[ks]) / g.spacing)));
        chi[ks] = std::min<std::int64_t>(g.dims[ks] - 1,
                                         static_cast<std::int64_t>(std::ceil((b - g.lo[ks]) / g.spacing)));
    }
    Collar collar;
    std::array<std::int64_t, 3> c{0, 0, 0};
    for (c[0] = clo[0]; c[0] <= chi[0]; ++c[0])
        for (c[1] = clo[1]; c[1] <= chi[1]; ++c[1])
            for (c[2] = clo[2]; c[2] <= chi[2]; ++c[2]) {
                std::int64_t idx = g.index(c[0], c[1], c[2]);
                if (g.mask[static_cast<std::size_t>(idx)] != CellLabel::Solid) continue;
                auto x = g.center(idx);
                std::array<double, 3> y{0.0, 0.0, 0.0};
                for (int k = 0; k < g.dim; ++k) {
                    auto ks = static_cast<std::size_t>(k);
                    y[ks] = x[ks] / eps - static_cast<double>(hole.z[ks]);
                }
                double dist = eps * signed_distance_to_hole(g.cell, y);
                if (dist > 0.0 && dist <= reach) collar.cells.push_back(idx);
            }
    if (collar.cells.empty()) return collar;
    collar.mean = Vec(f.components);
    std::vector<double> buf(collar.cells.size());
    for (int comp = 0; comp < f.components; ++comp) {
        for (std::size_t i = 0; i < collar.cells.size(); ++i)
            buf[i] = f.values[static_cast<std::size_t>(collar.cells[i] * f.components + comp)];
        collar.mean[comp] = pairwise_sum(buf) / static_cast<double>(collar.cells.size());
    }
    return collar;
}

void fill_diagnostics(const VectorField& f, const VectorField& out, double p,
                      ExtensionDiagnostics* diag, std::int64_t unfilled, bool general,
                      double margin) {
    if (!diag) return;
    diag->p = p;
    diag->unfilledCells = unfilled;
    const PerforatedGrid& g = *f.grid;
    // Norms of the input are taken over the same retracted region as the
    // output, so the general-variant ratios compare like with like.
    const VectorField* in = &f;
    VectorField restricted;
    if (general && margin > 0.0) {
        restricted = f;
        for (std::int64_t idx = 0; idx < g.cellCount(); ++idx)
            if (restricted.isDefined(idx) && !(g.boundaryDistance(g.center(idx)) > margin))
                restricted.defined[static_cast<std::size_t>(idx)] = 0;
        in = &restricted;
    }
    diag->lpIn = lp_norm(*in, p, NormRegion::Solid);
    diag->lpOut = lp_norm(out, p, NormRegion::All);
    diag->gradIn = w1p_seminorm(*in, p, NormRegion::Solid);
    diag->gradOut = w1p_seminorm(out, p, NormRegion::All);
    diag->cFunc = diag->lpOut / diag->lpIn;
    diag->cGrad = (diag->gradIn > 0.0) ? diag->gradOut / diag->gradIn
                                       : std::numeric_limits<double>::quiet_NaN();
    double maxIn = 0.0, maxHole = 0.0;
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (g.mask[static_cast<std::size_t>(idx)] == CellLabel::Solid && in->isDefined(idx))
            maxIn = std::max(maxIn, norm(in->value(idx)));
        if (g.mask[static_cast<std::size_t>(idx)] == CellLabel::Hole && out.isDefined(idx))
            maxHole = std::max(maxHole, norm(out.value(idx)));
    }
    diag->convexHullViolation = std::max(0.0, maxHole - maxIn);
}

VectorField extend_impl(const VectorField& f, bool general, double margin, double p,
                        ExtensionDiagnostics* diag) {
    const PerforatedGrid& g = *f.grid;
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        bool solid = g.mask[static_cast<std::size_t>(idx)] == CellLabel::Solid;
        if (solid != f.isDefined(idx))
            throw UndefinedInput("input field must be defined exactly on the solid cells");
    }
    VectorField out = make_field(f.grid, f.components);
    std::int64_t unfilled = 0;

    auto in_output = [&](std::int64_t idx) {
        if (!general) return true;
        return g.boundaryDistance(g.center(idx)) > margin;
    };

    if (general) {
        bool anyOutput = false;
        for (std::int64_t idx = 0; idx < g.cellCount() && !anyOutput; ++idx)
            if (g.mask[static_cast<std::size_t>(idx)] != CellLabel::Outside && in_output(idx))
                anyOutput = true;
        if (!anyOutput) {
            // Retracted domain is empty; nothing to extend onto.
            if (diag) *diag = ExtensionDiagnostics{};
            if (diag) diag->p = p;
            return out;
        }
    }

    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (g.mask[static_cast<std::size_t>(idx)] == CellLabel::Solid && in_output(idx)) {
            // Identity on the solid part, bit-exact.
            for (int c = 0; c < f.components; ++c)
                out.values[static_cast<std::size_t>(idx * f.components + c)] =
                    f.values[static_cast<std::size_t>(idx * f.components + c)];
            out.defined[static_cast<std::size_t>(idx)] = 1;
        }
    }

    const double eps = g.epsilon;
    for (const HoleInstance& hole : g.holes) {
        Collar collar = collect_collar(g, f, hole);
        if (collar.cells.empty()) {
            if (!general)
                throw IsolatedHole("hole has no solid collar cells to extend from");
            for (std::int64_t idx : hole.cells)
                if (in_output(idx)) ++unfilled;
            continue;
        }
        for (std::int64_t idx : hole.cells) {
            if (!in_output(idx)) continue;
            auto x = g.center(idx);
            std::array<double, 3> y{0.0, 0.0, 0.0};
            for (int k = 0; k < g.dim; ++k) {
                auto ks = static_cast<std::size_t>(k);
                y[ks] = x[ks] / eps - static_cast<double>(hole.z[ks]);
            }
            double depth = -eps * signed_distance_to_hole(g.cell, y);
            double w = cutoff(depth / (kCollarFraction * eps));
            Vec value = collar.mean;
            if (w > 0.0) {
                auto bd = nearest_hole_boundary_point(g.cell, y);
                std::array<double, 3> reflected{0.0, 0.0, 0.0};
                for (int k = 0; k < g.dim; ++k) {
                    auto ks = static_cast<std::size_t>(k);
                    double xi = eps * (bd[ks] + static_cast<double>(hole.z[ks]));
                    reflected[ks] = 2.0 * xi - x[ks];
                }
                std::int64_t src = nearest_solid_cell(g, reflected);
                const double* fv = f.values.data() + src * f.components;
                for (int c = 0; c < f.components; ++c)
                    value[c] = w * fv[c] + (1.0 - w) * collar.mean[c];
            }
            out.setValue(idx, value);
        }
    }

    fill_diagnostics(f, out, p, diag, unfilled, general, margin);
    return out;
}

} // namespace

std::int64_t nearest_solid_cell(const PerforatedGrid& g, const std::array<double, 3>& pt) {
    std::array<std::int64_t, 3> base{0, 0, 0};
    for (int k = 0; k < g.dim; ++k) {
        auto ks = static_cast<std::size_t>(k);
        auto i = static_cast<std::int64_t>(std::floor((pt[ks] - g.lo[ks]) / g.spacing));
        base[ks] = std::clamp<std::int64_t>(i, 0, g.dims[ks] - 1);
    }
    std::int64_t best = -1;
    double bestD2 = 1e300;
    std::int64_t maxRing = 0;
    for (int k = 0; k < g.dim; ++k) maxRing = std::max(maxRing, g.dims[static_cast<std::size_t>(k)]);
    for (std::int64_t ring = 0; ring <= maxRing; ++ring) {
        // Cells on this Chebyshev shell sit at least (ring-1)*spacing away
        // from pt, so a found candidate lets us stop a ring later.
        if (best >= 0) {
            double minPossible = (static_cast<double>(ring) - 1.0) * g.spacing;
            if (minPossible > 0.0 && minPossible * minPossible > bestD2) break;
        }
        std::array<std::int64_t, 3> clo{0, 0, 0}, chi{0, 0, 0};
        for (int k = 0; k < g.dim; ++k) {
            auto ks = static_cast<std::size_t>(k);
            clo[ks] = std::max<std::int64_t>(0, base[ks] - ring);
            chi[ks] = std::min<std::int64_t>(g.dims[ks] - 1, base[ks] + ring);
        }
        std::array<std::int64_t, 3> c{0, 0, 0};
        for (c[0] = clo[0]; c[0] <= chi[0]; ++c[0])
            for (c[1] = clo[1]; c[1] <= chi[1]; ++c[1])
                for (c[2] = clo[2]; c[2] <= chi[2]; ++c[2]) {
                    std::int64_t cheb = 0;
                    for (int k = 0; k < g.dim; ++k)
                        cheb = std::max(cheb, std::abs(c[static_cast<std::size_t>(k)] -
                                                       base[static_cast<std::size_t>(k)]));
                    if (cheb != ring) continue;
                    std::int64_t idx = g.index(c[0], c[1], c[2]);
                    if (g.mask[static_cast<std::size_t>(idx)] != CellLabel::Solid) continue;
                    auto x = g.center(idx);
                    double d2 = 0.0;
                    for (int k = 0; k < g.dim; ++k) {
                        auto ks = static_cast<std::size_t>(k);
                        double d = x[ks] - pt[ks];
                        d2 += d * d;
                    }
                    if (d2 < bestD2 || (d2 == bestD2 && idx < best)) {
                        bestD2 = d2;
                        best = idx;
                    }
                }
    }
    if (best < 0) throw IsolatedHole("no solid cell found for the reflection snap");
    return best;
}

VectorField extend_unconstrained(const VectorField& f, double p, ExtensionDiagnostics* diag) {
    if (f.grid->variant != Variant::Safe)
        throw ContractError("safe-variant extension called on a general-variant grid");
    return extend_impl(f, false, 0.0, p, diag);
}

VectorField extend_unconstrained_general(const VectorField& f, double margin, double p,
                                         ExtensionDiagnostics* diag) {
    if (f.grid->variant != Variant::General)
        throw ContractError("general-variant extension called on a safe-variant grid");
    if (!(margin >= 0.0)) throw ContractError("margin must be non-negative");
    return extend_impl(f, true, margin, p, diag);
}

} // namespace mext
