#include "mext/extend_constrained.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "mext/errors.hpp"
#include "mext/norms.hpp"

namespace mext {

namespace {

double auto_guard_eta(double spacing, double sigma) {
    return std::clamp(10.0 * spacing, 1e-3, sigma / 8.0);
}

// Index j reflected into [0, n) with period 2n (symmetric padding).
std::int64_t mirror_index(std::int64_t j, std::int64_t n) {
    if (n == 1) return 0;
    const std::int64_t period = 2 * n;
    std::int64_t m = j % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

struct BBox {
    std::array<std::int64_t, 3> lo{0, 0, 0};
    std::array<std::int64_t, 3> hi{-1, -1, -1};
    bool empty = true;
};

BBox defined_bbox(const VectorField& f) {
    const PerforatedGrid& g = *f.grid;
    BBox bb;
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (!f.isDefined(idx)) continue;
        auto c = g.unpack(idx);
        if (bb.empty) {
            bb.lo = c;
            bb.hi = c;
            bb.empty = false;
        } else {
            for (int k = 0; k < 3; ++k) {
                auto ks = static_cast<std::size_t>(k);
                bb.lo[ks] = std::min(bb.lo[ks], c[ks]);
                bb.hi[ks] = std::max(bb.hi[ks], c[ks]);
            }
        }
    }
    return bb;
}

} // namespace

VectorField mollify(const VectorField& f, int radius) {
    if (radius < 0) throw ContractError("mollify radius must be non-negative");
    if (radius == 0) return f;
    const PerforatedGrid& g = *f.grid;
    BBox bb = defined_bbox(f);
    if (bb.empty) throw ContractError("mollify needs at least one defined cell");
    std::array<std::int64_t, 3> c{0, 0, 0};
    for (c[0] = bb.lo[0]; c[0] <= bb.hi[0]; ++c[0])
        for (c[1] = bb.lo[1]; c[1] <= bb.hi[1]; ++c[1])
            for (c[2] = bb.lo[2]; c[2] <= bb.hi[2]; ++c[2])
                if (!f.isDefined(g.index(c[0], c[1], c[2])))
                    throw ContractError("mollify needs the defined cells to fill a box");

    std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        double t = static_cast<double>(k) / static_cast<double>(radius + 1);
        double wk = (1.0 - t * t) * (1.0 - t * t);
        w[static_cast<std::size_t>(k + radius)] = wk;
        total += wk;
    }
    for (double& wk : w) wk /= total;

    const int L = f.components;
    const std::int64_t strides[3] = {g.dims[1] * g.dims[2], g.dims[2], 1};
    std::vector<double> bufA = f.values;
    std::vector<double> bufB = f.values;
    std::vector<double>* src = &bufA;
    std::vector<double>* dst = &bufB;
    for (int axis = 0; axis < g.dim; ++axis) {
        auto as = static_cast<std::size_t>(axis);
        const std::int64_t n = bb.hi[as] - bb.lo[as] + 1;
        for (c[0] = bb.lo[0]; c[0] <= bb.hi[0]; ++c[0])
            for (c[1] = bb.lo[1]; c[1] <= bb.hi[1]; ++c[1])
                for (c[2] = bb.lo[2]; c[2] <= bb.hi[2]; ++c[2]) {
                    const std::int64_t idx = g.index(c[0], c[1], c[2]);
                    double acc[4] = {0.0, 0.0, 0.0, 0.0};
                    for (int k = -radius; k <= radius; ++k) {
                        std::int64_t off = mirror_index(c[as] - bb.lo[as] + k, n) - (c[as] - bb.lo[as]);
                        const double* v = src->data() + (idx + off * strides[axis]) * L;
                        double wk = w[static_cast<std::size_t>(k + radius)];
                        for (int comp = 0; comp < L; ++comp) acc[comp] += wk * v[comp];
                    }
                    double* o = dst->data() + idx * L;
                    for (int comp = 0; comp < L; ++comp) o[comp] = acc[comp];
                }
        std::swap(src, dst);
    }
    VectorField out;
    out.grid = f.grid;
    out.components = L;
    out.defined = f.defined;
    out.values = std::move(*src);
    return out;
}

TranslationChoice select_translation(const VectorField& fSmooth, const ManifoldSpec& spec,
                                     const TranslationSearchConfig& cfg, double p) {
    const PerforatedGrid& g = *fSmooth.grid;
    if (cfg.candidateCount < 8) throw ContractError("candidateCount must be at least 8");
    if (fSmooth.components != spec.ambientDim)
        throw ContractError("field components do not match the target's ambient dimension");
    const double eta = cfg.guardEta > 0.0 ? cfg.guardEta : auto_guard_eta(g.spacing, spec.sigma);
    if (!(eta > 0.0) || !(eta < spec.sigma / 4.0))
        throw ContractError("guardEta must lie in (0, sigma/4)");

    const int l = spec.ambientDim;
    static constexpr std::uint32_t kBases[4] = {2, 3, 5, 7};
    std::vector<Vec> candidates;
    candidates.reserve(static_cast<std::size_t>(cfg.candidateCount));
    std::uint64_t hIdx = 1 + cfg.seed % 100003ull;
    const double rad = spec.sigma / 2.0;
    while (static_cast<int>(candidates.size()) < cfg.candidateCount) {
        Vec c(l);
        double n2 = 0.0;
        for (int i = 0; i < l; ++i) {
            double u = halton(hIdx, kBases[i]);
            c[i] = 2.0 * u - 1.0;
            n2 += c[i] * c[i];
        }
        ++hIdx;
        if (n2 <= 1.0) candidates.push_back(rad * c);
    }

    VectorField buf;
    buf.grid = fSmooth.grid;
    buf.components = l;
    buf.values.assign(fSmooth.values.size(), std::numeric_limits<double>::quiet_NaN());
    buf.defined = fSmooth.defined;

    std::vector<double> survivorObjectives;
    int survivors = 0;
    int bestIdx = -1;
    double bestObj = std::numeric_limits<double>::infinity();
    Vec bestH(l);
    for (const Vec& h : candidates) {
        bool admissible = true;
        for (std::int64_t idx = 0; idx < g.cellCount() && admissible; ++idx) {
            if (!fSmooth.isDefined(idx)) continue;
            if (dist_to_singular(spec, fSmooth.value(idx) - h) < eta) admissible = false;
        }
        if (!admissible) continue;
        for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
            if (!fSmooth.isDefined(idx)) continue;
            buf.setValue(idx, retract_translated(spec, h, fSmooth.value(idx)));
        }
        double s = w1p_seminorm(buf, p, NormRegion::All);
        double obj = std::pow(s, p);
        survivorObjectives.push_back(obj);
        if (obj < bestObj) {
            bestObj = obj;
            bestH = h;
            bestIdx = survivors;
        }
        ++survivors;
    }
    if (survivors == 0)
        throw NoAdmissibleTranslation(
            "every sampled translation hit the guard; lower guardEta or raise candidateCount");
    (void)bestIdx;
    double mean = pairwise_sum(survivorObjectives) / static_cast<double>(survivors);
    if (!(bestObj <= mean * (1.0 + 1e-12) + 1e-300))
        throw ContractError("translation argmin exceeded the survivor mean");
    TranslationChoice choice;
    choice.h = bestH;
    choice.objective = bestObj;
    choice.survivorCount = survivors;
    choice.survivorMeanObjective = mean;
    return choice;
}

namespace {

ConstrainedResult run_pipeline(const VectorField& f, const ManifoldSpec& spec,
                               const TranslationSearchConfig& cfg, double p, bool diagnosticMode,
                               bool retracted, double margin) {
    const PerforatedGrid& g = *f.grid;
    ConstrainedResult res;
    res.choice.h = Vec(spec.ambientDim);
    res.diag.p = p;

    if (spec.kind == ManifoldKind::FlatTorus) {
        if (!diagnosticMode)
            throw TargetNotCovered(
                "target is not simply connected; rerun in diagnostic mode to study it anyway");
        res.warnings.push_back("hypothesis violated: target is not simply connected (diagnostic run)");
    }
    if (f.components != spec.ambientDim)
        throw ContractError("field components do not match the target's ambient dimension");
    if (p >= static_cast<double>(g.dim))
        res.warnings.push_back("hypothesis violated: p >= d (bounds may degrade)");
    if (static_cast<int>(std::floor(p - 1.0)) > spec.connectivityOrder)
        res.warnings.push_back("hypothesis violated: target is not floor(p-1)-connected");

    if (retracted) {
        if (g.variant != Variant::General)
            throw ContractError("retracted extension needs a general-variant grid");
        if (g.epsilon * g.mu > margin * (1.0 + 1e-12))
            throw EpsilonMarginViolation("epsilon exceeds lambdaMargin / mu");
        bool any = false;
        for (std::int64_t idx = 0; idx < g.cellCount() && !any; ++idx)
            if (g.boundaryDistance(g.center(idx)) > margin) any = true;
        if (!any) {
            res.field = make_field(f.grid, f.components);
            res.warnings.push_back("retracted domain is empty");
            return res;
        }
    } else {
        if (g.variant != Variant::Safe)
            throw ContractError("constrained extension needs a safe-variant grid");
    }

    // Ingest, extend, and record input norms; the re-projected copy is not
    // needed afterwards.
    ExtensionDiagnostics udiag;
    VectorField m;
    {
        VectorField fin = f;
        for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
            if (!fin.isDefined(idx)) continue;
            Vec v = fin.value(idx);
            if (dist_to_manifold(spec, v) > 1e-9)
                throw ConstraintViolation("input value lies off the target manifold by more than 1e-9");
            fin.setValue(idx, project(spec, v));
        }
        const VectorField* in = &fin;
        VectorField restricted;
        if (retracted) {
            restricted = fin;
            for (std::int64_t idx = 0; idx < g.cellCount(); ++idx)
                if (restricted.isDefined(idx) && !(g.boundaryDistance(g.center(idx)) > margin))
                    restricted.defined[static_cast<std::size_t>(idx)] = 0;
            in = &restricted;
        }
        res.diag.lpIn = lp_norm(*in, p, NormRegion::Solid);
        res.diag.gradIn = w1p_seminorm(*in, p, NormRegion::Solid);
        VectorField S = retracted ? extend_unconstrained_general(fin, margin, p, &udiag)
                                  : extend_unconstrained(fin, p, &udiag);
        if (udiag.unfilledCells > 0)
            throw ContractError("a hole inside the working domain has no collar to extend from");
        m = mollify(S, cfg.mollifyRadius);
    }

    res.choice = select_translation(m, spec, cfg, p);

    VectorField out = make_field(f.grid, f.components);
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (!m.isDefined(idx)) continue;
        Vec z = retract_translated(spec, res.choice.h, m.value(idx));
        out.setValue(idx, inverse_on_manifold(spec, res.choice.h, z));
    }

    double mismatch = 0.0;
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (!out.isDefined(idx) || g.mask[static_cast<std::size_t>(idx)] != CellLabel::Solid)
            continue;
        mismatch = std::max(mismatch, norm(out.value(idx) - f.value(idx)));
        std::memcpy(out.values.data() + idx * f.components,
                    f.values.data() + idx * f.components,
                    sizeof(double) * static_cast<std::size_t>(f.components));
    }
    res.preSnapMismatch = mismatch;

    double maxDist = 0.0;
    double maxSolid = 0.0, maxHole = 0.0;
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (!out.isDefined(idx)) continue;
        Vec v = out.value(idx);
        maxDist = std::max(maxDist, dist_to_manifold(spec, v));
        if (g.mask[static_cast<std::size_t>(idx)] == CellLabel::Solid)
            maxSolid = std::max(maxSolid, norm(v));
        else if (g.mask[static_cast<std::size_t>(idx)] == CellLabel::Hole)
            maxHole = std::max(maxHole, norm(v));
    }
    res.constraintViolation = maxDist;

    res.diag.lpOut = lp_norm(out, p, NormRegion::All);
    res.diag.gradOut = w1p_seminorm(out, p, NormRegion::All);
    res.diag.cFunc = res.diag.lpOut / res.diag.lpIn;
    res.diag.cGrad = (res.diag.gradIn > 0.0) ? res.diag.gradOut / res.diag.gradIn
                                             : std::numeric_limits<double>::quiet_NaN();
    res.diag.convexHullViolation = std::max(0.0, maxHole - maxSolid);
    res.diag.unfilledCells = udiag.unfilledCells;
    res.field = std::move(out);
    return res;
}

} // namespace

ConstrainedResult extend_constrained(const VectorField& f, const ManifoldSpec& spec,
                                     const TranslationSearchConfig& cfg, double p,
                                     bool diagnosticMode) {
    return run_pipeline(f, spec, cfg, p, diagnosticMode, false, 0.0);
}

ConstrainedResult extend_constrained_retracted(const VectorField& f, const ManifoldSpec& spec,
                                               const TranslationSearchConfig& cfg,
                                               double lambdaMargin, double p, bool diagnosticMode) {
    if (!(lambdaMargin >= 0.0)) throw ContractError("lambdaMargin must be non-negative");
    return run_pipeline(f, spec, cfg, p, diagnosticMode, true, lambdaMargin);
}

LpBoundReport lp_bound_decomposition(const VectorField& f, const VectorField& extended,
                                     const ManifoldSpec& spec, double p) {
    const PerforatedGrid& g = *f.grid;
    if (g.variant != Variant::Safe)
        throw ContractError("bound decomposition needs the safe variant");
    LpBoundReport r;
    r.p = p;
    r.delta = spec.delta;
    r.gamma = spec.gammaMin;
    r.bigGamma = spec.gammaMax;

    ExtensionDiagnostics udiag;
    VectorField S = extend_unconstrained(f, p, &udiag);
    r.cFuncUnconstrained = udiag.cFunc;

    const double vol = g.cellVolume();
    std::vector<double> termsK, termsKc;
    std::int64_t countK = 0, countKc = 0;
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (g.mask[static_cast<std::size_t>(idx)] != CellLabel::Hole) continue;
        if (!extended.isDefined(idx))
            throw ContractError("constrained extension undefined on a hole cell");
        Vec sv = S.value(idx);
        Vec tv = extended.value(idx);
        double tp = std::pow(norm(tv), p);
        if (dist_to_manifold(spec, sv) < spec.delta) {
            ++countK;
            termsK.push_back(tp);
            double sn = norm(sv);
            if (sn > 0.0) r.lipHat = std::max(r.lipHat, norm(tv) / sn);
        } else {
            ++countKc;
            termsKc.push_back(tp);
        }
    }
    r.measureK = static_cast<double>(countK) * vol;
    r.measureKComplement = static_cast<double>(countKc) * vol;
    r.integralK = termsK.empty() ? 0.0 : pairwise_sum(termsK) * vol;
    r.integralKComplement = termsKc.empty() ? 0.0 : pairwise_sum(termsKc) * vol;

    r.inputNorm = lp_norm(f, p, NormRegion::Solid);
    const double holeVol = r.measureK + r.measureKComplement;
    r.lhs = std::pow(r.integralK + r.integralKComplement, 1.0 / p);
    r.cReal = std::max(r.lipHat, 2.0 * spec.gammaMax / spec.delta) * r.cFuncUnconstrained;
    r.rhs = r.cReal * r.inputNorm + 2.0 * spec.gammaMin * std::pow(holeVol, 1.0 / p);
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-12) + 1e-15;
    r.zeroInManifoldExercised = (spec.gammaMin == 0.0);

    double maxOff = 0.0;
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx)
        if (f.isDefined(idx)) maxOff = std::max(maxOff, dist_to_manifold(spec, f.value(idx)));
    double ebar = epsilon_threshold(g.cell, g.lo, g.hi);
    r.chainApplicable =
        (g.epsilon <= ebar + 1e-15) && (spec.gammaMin == spec.gammaMax) && maxOff <= 1e-9;
    if (r.chainApplicable) {
        r.chainLhs = spec.gammaMax * std::pow(holeVol, 1.0 / p);
        double bound = (1.0 + g.cell.q0) / (1.0 - g.cell.q0);
        r.chainRhs = std::pow(bound, 1.0 / p) * r.inputNorm;
        r.chainHolds = r.chainLhs <= r.chainRhs * (1.0 + 1e-12);
    }
    return r;
}

} // namespace mext
