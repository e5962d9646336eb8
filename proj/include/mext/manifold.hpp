#pragma once

#include <string>

#include "mext/numeric.hpp"

namespace mext {

enum class ManifoldKind { Sphere, FlatTorus };

// Compact target N without boundary, realized with an exact Lipschitz
// retraction of the ambient box Q_R = (-R,R)^l minus a singular set X:
//   Sphere    S^{l-1} in R^l (l = 2 or 3): retract y -> y/|y|, X = {0}.
//   FlatTorus S^1 x S^1 in R^4: per-factor normalization, X = the pair of
//             planes where either factor vanishes. pi_1 is nontrivial, so the
//             constrained pipeline accepts it only as a diagnostic target.
struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::Sphere;
    int ambientDim = 3;     // l
    double delta = 0.5;     // tubular radius: nearest-point projection is
                            // single-valued within distance delta of N
    double bigR = 2.0;      // ambient box half-side, N_delta inside Q_R
    double sigma = 0.5;     // translation budget min{bigR - gammaMax, delta}
    double gammaMin = 1.0;  // min |y| over N
    double gammaMax = 1.0;  // max |y| over N
    int connectivityOrder = 0; // largest j with pi_0..pi_j(N) trivial
};

ManifoldSpec make_manifold(ManifoldKind kind, int ambientDim);
ManifoldSpec make_manifold_by_name(const std::string& name); // "sphere 2|sphere 3|flat-torus"
std::string manifold_name(const ManifoldSpec& spec);         // inverse of the above

double dist_to_manifold(const ManifoldSpec& spec, const Vec& v);
double dist_to_singular(const ManifoldSpec& spec, const Vec& y);

// Nearest-point projection; defined only within the tubular neighbourhood.
Vec project(const ManifoldSpec& spec, const Vec& v);

// Retraction of Q_R \ X onto N; agrees with project inside the tube by
// construction (same normalization formula).
Vec retract(const ManifoldSpec& spec, const Vec& y);

// retract(y - h): the translated retraction used by the constrained
// extension. Requires y - h inside Q_R and away from X.
Vec retract_translated(const ManifoldSpec& spec, const Vec& h, const Vec& y);

// Exact inverse of the translated retraction restricted to N: the y on N
// with retract_translated(h, y) = z, found by a damped fixed-point iteration
// (residual tolerance 1e-12 so the round trip holds to 1e-10, at most 100
// steps). Requires |h| < sigma/2.
// Note: applying retract_translated with -h is only an O(|h|^2) approximation
// of this inverse; the deviation is measured in the acceptance suite.
Vec inverse_on_manifold(const ManifoldSpec& spec, const Vec& h, const Vec& z);

// Operator norm of the retraction differential: 1/|y| on spheres,
// max(1/|y1|, 1/|y2|) on the torus. Satisfies norm * dist_to_singular <= 1
// with equality on spheres.
double retraction_gradient_norm(const ManifoldSpec& spec, const Vec& y);

// Riemann sum of |D retract|^p over Q_R \ B_eta(X) for sphere targets:
// log-radial midpoint shells (exact for the critical power) plus a fixed
// midpoint grid for the region outside the inscribed ball. Converges as
// eta -> 0 exactly when p < ambientDim.
double integrability_riemann_sum(const ManifoldSpec& spec, double p, double eta,
                                 int shellsPerDecade = 2000);

} // namespace mext
