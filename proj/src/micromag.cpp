#include "mext/micromag.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mext/errors.hpp"
#include "mext/norms.hpp"

namespace mext {

namespace {

Vec axis_or_default(const EnergyConfig& cfg, int components) {
    Vec e = cfg.anisotropyAxis;
    if (e.size() == 0) {
        e = Vec(components);
        e[components - 1] = 1.0;
    }
    if (e.size() != components)
        throw ContractError("anisotropy axis does not match the field components");
    double n = norm(e);
    if (!(n > 0.0)) throw ContractError("anisotropy axis must be nonzero");
    return (1.0 / n) * e;
}

void check_config(const EnergyConfig& cfg) {
    if (!(cfg.exchange > 0.0)) throw ContractError("exchange coefficient must be positive");
    if (!(cfg.anisotropyWeight >= 0.0)) throw ContractError("anisotropy weight must be non-negative");
}

double energy_sum(const VectorField& m, const EnergyConfig& cfg, bool checked,
                  std::vector<double>& terms) {
    check_config(cfg);
    const PerforatedGrid& g = *m.grid;
    const Vec e = axis_or_default(cfg, m.components);
    const double vol = g.cellVolume();
    const double invH2 = 1.0 / (g.spacing * g.spacing);
    const std::int64_t strides[3] = {g.dims[1] * g.dims[2], g.dims[2], 1};
    terms.clear();
    terms.reserve(static_cast<std::size_t>(g.cellCount()));
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (g.mask[static_cast<std::size_t>(idx)] != CellLabel::Solid || !m.isDefined(idx))
            continue;
        Vec v = m.value(idx);
        if (checked && std::abs(norm(v) - 1.0) > 1e-9)
            throw ConstraintViolation("magnetization value is not unit length");
        auto c = g.unpack(idx);
        double cell = 0.0;
        for (int k = 0; k < g.dim; ++k) {
            if (c[static_cast<std::size_t>(k)] + 1 >= g.dims[static_cast<std::size_t>(k)]) continue;
            std::int64_t nb = idx + strides[k];
            if (g.mask[static_cast<std::size_t>(nb)] != CellLabel::Solid || !m.isDefined(nb))
                continue;
            Vec w = m.value(nb);
            double d2 = 0.0;
            for (int comp = 0; comp < m.components; ++comp) {
                double d = w[comp] - v[comp];
                d2 += d * d;
            }
            cell += cfg.exchange * d2 * invH2;
        }
        double me = dot(v, e);
        cell += cfg.anisotropyWeight * (1.0 - me * me);
        terms.push_back(cell * vol);
    }
    if (terms.empty()) throw EmptyRegion("no defined solid cells to integrate over");
    return pairwise_sum(terms);
}

void gradient_into(const VectorField& m, const EnergyConfig& cfg, VectorField& grad) {
    check_config(cfg);
    const PerforatedGrid& g = *m.grid;
    const Vec e = axis_or_default(cfg, m.components);
    const double vol = g.cellVolume();
    const double invH2 = 1.0 / (g.spacing * g.spacing);
    const std::int64_t strides[3] = {g.dims[1] * g.dims[2], g.dims[2], 1};
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (g.mask[static_cast<std::size_t>(idx)] != CellLabel::Solid || !m.isDefined(idx))
            continue;
        Vec v = m.value(idx);
        Vec a(m.components);
        auto c = g.unpack(idx);
        for (int k = 0; k < g.dim; ++k) {
            auto ks = static_cast<std::size_t>(k);
            if (c[ks] + 1 < g.dims[ks]) {
                std::int64_t nb = idx + strides[k];
                if (g.mask[static_cast<std::size_t>(nb)] == CellLabel::Solid && m.isDefined(nb))
                    a = a + 2.0 * cfg.exchange * invH2 * (v - m.value(nb));
            }
            if (c[ks] > 0) {
                std::int64_t nb = idx - strides[k];
                if (g.mask[static_cast<std::size_t>(nb)] == CellLabel::Solid && m.isDefined(nb))
                    a = a + 2.0 * cfg.exchange * invH2 * (v - m.value(nb));
            }
        }
        double me = dot(v, e);
        a = a + (-2.0 * cfg.anisotropyWeight * me) * e;
        grad.setValue(idx, vol * a);
    }
}

} // namespace

double micromag_energy(const VectorField& m, const EnergyConfig& cfg) {
    std::vector<double> terms;
    return energy_sum(m, cfg, true, terms);
}

double micromag_energy_raw(const VectorField& m, const EnergyConfig& cfg) {
    std::vector<double> terms;
    return energy_sum(m, cfg, false, terms);
}

VectorField micromag_gradient(const VectorField& m, const EnergyConfig& cfg) {
    VectorField grad = make_field(m.grid, m.components);
    gradient_into(m, cfg, grad);
    return grad;
}

namespace {

std::vector<std::uint8_t> pinned_mask(const PerforatedGrid& g, CollarPinning pinning) {
    std::vector<std::uint8_t> pinned(static_cast<std::size_t>(g.cellCount()), 0);
    if (pinning == CollarPinning::None) return pinned;
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (g.mask[static_cast<std::size_t>(idx)] != CellLabel::Solid) continue;
        auto c = g.unpack(idx);
        bool onFace = false;
        if (pinning == CollarPinning::Uniform) {
            for (int k = 0; k < g.dim; ++k) {
                auto ks = static_cast<std::size_t>(k);
                if (c[ks] == 0 || c[ks] == g.dims[ks] - 1) onFace = true;
            }
        } else {
            onFace = (c[0] == 0 || c[0] == g.dims[0] - 1);
        }
        if (onFace) pinned[static_cast<std::size_t>(idx)] = 1;
    }
    return pinned;
}

} // namespace

MinimizeResult minimize_energy(GridPtr grid, const EnergyConfig& cfg, std::uint64_t seed,
                               CollarPinning pinning) {
    check_config(cfg);
    const PerforatedGrid& g = *grid;
    if (g.variant != Variant::Safe)
        throw ContractError("minimization expects a safe-variant grid");
    const int comps = g.dim; // S^{d-1}-valued magnetization
    const Vec e = axis_or_default(cfg, comps);

    ManifoldSpec sphere = make_manifold(ManifoldKind::Sphere, comps);
    MinimizeResult res;
    res.field = random_unit_field(grid, sphere, seed);
    std::vector<std::uint8_t> pinned = pinned_mask(g, pinning);
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (!pinned[static_cast<std::size_t>(idx)]) continue;
        auto c = g.unpack(idx);
        bool flip = (pinning == CollarPinning::Wall) && (c[0] == g.dims[0] - 1);
        res.field.setValue(idx, flip ? -1.0 * e : e);
    }

    const double vol = g.cellVolume();
    const double baseStep = cfg.stepSize > 0.0 ? cfg.stepSize : 0.2 * g.spacing * g.spacing;
    double step = baseStep;
    std::vector<double> scratch;
    double energy = energy_sum(res.field, cfg, true, scratch);
    VectorField save = res.field;
    VectorField grad = make_field(grid, comps);
    std::int64_t iter = 0;
    for (; iter < cfg.maxIters; ++iter) {
        gradient_into(res.field, cfg, grad);
        double residual = 0.0;
        for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
            if (!grad.isDefined(idx) || pinned[static_cast<std::size_t>(idx)]) continue;
            Vec gv = (1.0 / vol) * grad.value(idx); // L2 gradient
            Vec v = res.field.value(idx);
            Vec tangential = gv - dot(gv, v) * v;
            residual = std::max(residual, norm(tangential));
        }
        res.residual = residual;
        if (residual <= cfg.gradTolerance) {
            res.converged = true;
            break;
        }
        save.values = res.field.values;
        bool accepted = false;
        while (step >= 1e-14) {
            for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
                if (!grad.isDefined(idx) || pinned[static_cast<std::size_t>(idx)]) continue;
                Vec v(comps);
                const double* sv = save.values.data() + idx * comps;
                const double* gv = grad.values.data() + idx * comps;
                for (int cmp = 0; cmp < comps; ++cmp)
                    v[cmp] = sv[cmp] - (step / vol) * gv[cmp];
                double n = norm(v);
                if (!(n > 0.0)) {
                    for (int cmp = 0; cmp < comps; ++cmp) v[cmp] = sv[cmp];
                    n = norm(v);
                }
                res.field.setValue(idx, (1.0 / n) * v);
            }
            double newEnergy = energy_sum(res.field, cfg, false, scratch);
            if (newEnergy <= energy) {
                energy = newEnergy;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        // Regrow toward the base step so rounding-level rejections near a
        // plateau cannot shrink the step permanently.
        if (accepted) step = std::min(baseStep, 2.0 * step);
        if (!accepted) {
            res.field.values = save.values;
            res.warnings.push_back("descent step collapsed before the tolerance was met");
            break;
        }
    }
    res.iterations = iter;
    res.finalEnergy = energy;
    if (!res.converged)
        res.warnings.push_back("no convergence within the iteration budget; best iterate returned");
    return res;
}

std::vector<HomogenizationRow> homogenization_study(const FixtureDescriptor& geometry,
                                                    const std::vector<double>& epsilons,
                                                    const EnergyConfig& cfg,
                                                    const ManifoldSpec& spec,
                                                    const TranslationSearchConfig& tcfg,
                                                    CollarPinning pinning) {
    if (epsilons.empty()) throw ContractError("study needs at least one epsilon");
    std::vector<double> eps = epsilons;
    std::sort(eps.begin(), eps.end(), std::greater<double>());
    int dim = geometry.cell.dim;
    double mu = geometry.mu > 0.0 ? geometry.mu : std::sqrt(static_cast<double>(dim));

    std::vector<HomogenizationRow> rows;
    for (double epsilon : eps) {
        double spacing = epsilon / static_cast<double>(geometry.cellsPerEpsilon);
        GridPtr grid = build_grid(geometry.cell, geometry.lo, geometry.hi, epsilon,
                                  geometry.lambda, mu, spacing, Variant::Safe);
        auto t0 = std::chrono::steady_clock::now();
        MinimizeResult mr = minimize_energy(grid, cfg, geometry.seed, pinning);
        ConstrainedResult er = extend_constrained(mr.field, spec, tcfg, 2.0);
        auto t1 = std::chrono::steady_clock::now();

        HomogenizationRow row;
        row.epsilon = epsilon;
        row.minimalEnergy = mr.finalEnergy;
        double lp = lp_norm(er.field, 2.0, NormRegion::All);
        double w1 = w1p_seminorm(er.field, 2.0, NormRegion::All);
        row.w12Norm = std::sqrt(lp * lp + w1 * w1);
        row.constraintViolation = er.constraintViolation;
        row.converged = mr.converged;
        row.monotone = mr.monotone;
        row.runtimeMs = std::chrono::duration<double, std::milli>(t1 - t0).count();
        rows.push_back(row);
    }
    double wMax = 0.0, wMin = std::numeric_limits<double>::infinity();
    for (const HomogenizationRow& r : rows) {
        wMax = std::max(wMax, r.w12Norm);
        wMin = std::min(wMin, r.w12Norm);
        if (r.constraintViolation > 1e-12)
            throw ConstraintViolation("extended minimizer leaves the sphere beyond 1e-12");
    }
    if (rows.size() > 1 && !(wMax <= 1.5 * wMin))
        throw ContractError("W^{1,2} norms of the extensions are not uniformly bounded (factor > 1.5)");
    return rows;
}

} // namespace mext
