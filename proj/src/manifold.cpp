#include "mext/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mext/errors.hpp"

namespace mext {

namespace {

constexpr double kSingularFloor = 1e-14;

double factor_norm(const Vec& y, int first) {
    auto f = static_cast<std::size_t>(first);
    return std::sqrt(y.v[f] * y.v[f] + y.v[f + 1] * y.v[f + 1]);
}

// Shared normalization core; project() and retract() must evaluate the same
// expressions so they agree bitwise inside the tube.
Vec normalize_onto(const ManifoldSpec& spec, const Vec& y) {
    Vec out(spec.ambientDim);
    if (spec.kind == ManifoldKind::Sphere) {
        double r = norm(y);
        for (int i = 0; i < spec.ambientDim; ++i)
            out[i] = y[i] / r;
        return out;
    }
    double r1 = factor_norm(y, 0);
    double r2 = factor_norm(y, 2);
    out[0] = y[0] / r1;
    out[1] = y[1] / r1;
    out[2] = y[2] / r2;
    out[3] = y[3] / r2;
    return out;
}

} // namespace

ManifoldSpec make_manifold(ManifoldKind kind, int ambientDim) {
    ManifoldSpec spec;
    spec.kind = kind;
    if (kind == ManifoldKind::Sphere) {
        if (ambientDim != 2 && ambientDim != 3)
            throw InvalidShape("sphere targets support ambient dimension 2 or 3");
        spec.ambientDim = ambientDim;
        spec.delta = 0.5;
        spec.bigR = 2.0;
        spec.gammaMin = 1.0;
        spec.gammaMax = 1.0;
        spec.connectivityOrder = ambientDim - 2;
    } else {
        if (ambientDim != 4)
            throw InvalidShape("the flat torus lives in ambient dimension 4");
        spec.ambientDim = 4;
        spec.delta = 0.25;
        spec.bigR = 2.0;
        spec.gammaMin = std::sqrt(2.0);
        spec.gammaMax = std::sqrt(2.0);
        spec.connectivityOrder = 0;
    }
    spec.sigma = std::min(spec.bigR - spec.gammaMax, spec.delta);
    return spec;
}

ManifoldSpec make_manifold_by_name(const std::string& name) {
    if (name == "sphere 2") return make_manifold(ManifoldKind::Sphere, 2);
    if (name == "sphere 3") return make_manifold(ManifoldKind::Sphere, 3);
    if (name == "flat-torus") return make_manifold(ManifoldKind::FlatTorus, 4);
    throw InvalidShape("unknown target '" + name + "' (expected: sphere 2, sphere 3, flat-torus)");
}

std::string manifold_name(const ManifoldSpec& spec) {
    if (spec.kind == ManifoldKind::FlatTorus) return "flat-torus";
    return spec.ambientDim == 2 ? "sphere 2" : "sphere 3";
}

double dist_to_manifold(const ManifoldSpec& spec, const Vec& v) {
    if (spec.kind == ManifoldKind::Sphere)
        return std::abs(norm(v) - 1.0);
    double d1 = factor_norm(v, 0) - 1.0;
    double d2 = factor_norm(v, 2) - 1.0;
    return std::sqrt(d1 * d1 + d2 * d2);
}

double dist_to_singular(const ManifoldSpec& spec, const Vec& y) {
    if (spec.kind == ManifoldKind::Sphere)
        return norm(y);
    return std::min(factor_norm(y, 0), factor_norm(y, 2));
}

Vec project(const ManifoldSpec& spec, const Vec& v) {
    if (!(dist_to_manifold(spec, v) < spec.delta))
        throw OutsideTubular("point lies outside the tubular neighbourhood of the target");
    return normalize_onto(spec, v);
}

Vec retract(const ManifoldSpec& spec, const Vec& y) {
    if (dist_to_singular(spec, y) < kSingularFloor)
        throw HitSingularSet("retraction evaluated on (or too close to) its singular set");
    return normalize_onto(spec, y);
}

Vec retract_translated(const ManifoldSpec& spec, const Vec& h, const Vec& y) {
    Vec shifted = y - h;
    for (int i = 0; i < spec.ambientDim; ++i) {
        if (std::abs(shifted[i]) > spec.bigR + 1e-12)
            throw OutsideTubular("translated point leaves the ambient box");
    }
    return retract(spec, shifted);
}

Vec inverse_on_manifold(const ManifoldSpec& spec, const Vec& h, const Vec& z) {
    if (!(norm(h) < spec.sigma / 2.0 + 1e-12))
        throw ContractError("translation exceeds half the translation budget");
    // Internal residual kept two orders below the contracted 1e-10 so the
    // round trip stays within 1e-10 after the Jacobian amplification (the
    // differential of the translated retraction scales by up to |y - h|).
    constexpr double kTol = 1e-12;
    constexpr int kMaxIter = 100;
    constexpr double kStep = 1.0;
    Vec y = project(spec, z + h);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        Vec image = retract_translated(spec, h, y);
        Vec residual = z - image;
        if (norm(residual) <= kTol) return y;
        y = project(spec, y + kStep * residual);
    }
    throw NoConvergence("translated-retraction inverse did not reach tolerance 1e-10 in 100 steps");
}

double retraction_gradient_norm(const ManifoldSpec& spec, const Vec& y) {
    if (dist_to_singular(spec, y) < kSingularFloor)
        throw HitSingularSet("retraction differential blows up on the singular set");
    if (spec.kind == ManifoldKind::Sphere)
        return 1.0 / norm(y);
    return std::max(1.0 / factor_norm(y, 0), 1.0 / factor_norm(y, 2));
}

double integrability_riemann_sum(const ManifoldSpec& spec, double p, double eta,
                                 int shellsPerDecade) {
    if (spec.kind != ManifoldKind::Sphere)
        throw TargetNotCovered("integrability sum implemented for sphere targets");
    if (!(eta > 0.0 && eta < spec.bigR))
        throw ContractError("eta must lie in (0, R)");
    const int l = spec.ambientDim;
    const double R = spec.bigR;

    // Radial shells over the inscribed ball: midpoint rule in log r, where the
    // integrand S_{l-1} r^{l-1-p} * r is constant for p = l (sum telescopes to
    // the exact logarithm) and smooth otherwise.
    const double surface = (l == 2) ? 2.0 * 3.14159265358979323846
                                    : 4.0 * 3.14159265358979323846;
    const double uLo = std::log(eta);
    const double uHi = std::log(R);
    const double decades = (uHi - uLo) / std::log(10.0);
    const int shells = std::max(64, static_cast<int>(std::ceil(decades * shellsPerDecade)));
    const double du = (uHi - uLo) / shells;
    std::vector<double> terms(static_cast<std::size_t>(shells));
    for (int j = 0; j < shells; ++j) {
        double u = uLo + (static_cast<double>(j) + 0.5) * du;
        double r = std::exp(u);
        terms[static_cast<std::size_t>(j)] =
            surface * std::pow(r, static_cast<double>(l) - p) * du;
    }
    double inner = pairwise_sum(terms);

    // Q_R minus the inscribed ball: fixed midpoint grid, integrand bounded
    // there so a moderate resolution suffices and keeps runs deterministic.
    const int res = (l == 2) ? 1024 : 160;
    const double hCell = 2.0 * R / res;
    double cellVol = hCell * hCell;
    if (l == 3) cellVol *= hCell;
    std::vector<double> outerTerms;
    outerTerms.reserve(static_cast<std::size_t>(res) * res);
    for (int i = 0; i < res; ++i) {
        double x = -R + (i + 0.5) * hCell;
        for (int j = 0; j < res; ++j) {
            double y = -R + (j + 0.5) * hCell;
            if (l == 2) {
                double r2 = x * x + y * y;
                if (r2 > R * R)
                    outerTerms.push_back(std::pow(r2, -p / 2.0) * cellVol);
            } else {
                for (int k = 0; k < res; ++k) {
                    double zc = -R + (k + 0.5) * hCell;
                    double r2 = x * x + y * y + zc * zc;
                    if (r2 > R * R)
                        outerTerms.push_back(std::pow(r2, -p / 2.0) * cellVol);
                }
            }
        }
    }
    return inner + pairwise_sum(outerTerms);
}

} // namespace mext
