#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mext/extend_constrained.hpp"
#include "mext/fixtures.hpp"

namespace mext {

struct SweepRow {
    double epsilon = 0.0;
    double measureRatio = 0.0;
    double epsilonThreshold = 0.0;
    double cFunc = std::numeric_limits<double>::quiet_NaN();
    double cGrad = std::numeric_limits<double>::quiet_NaN(); // NaN serialized as NA
    double constraintViolation = 0.0;
    double preSnapMismatch = 0.0;
    // Wall-clock; volatile, so canonical serializations leave it out.
    double runtimeMs = 0.0;
    bool warnEpsilon = false; // epsilon above the certified threshold
};

struct SweepReport {
    std::string fixtureId;
    std::string target;
    double p = 2.0;
    int d = 0;
    std::uint64_t seed = 42;
    std::vector<SweepRow> rows; // sorted by decreasing epsilon
};

// Builds the named fixture on a grid. Known ids: "constant", "affine-0"
// through "affine-4", "converging-K" (K >= 0), "random".
VectorField make_fixture_field(GridPtr grid, const ManifoldSpec& spec, const std::string& fixtureId,
                               std::uint64_t seed, double* lipBound = nullptr);

// Full constrained pipeline once per epsilon on safe-variant grids; rows are
// ordered by decreasing epsilon and carry a WARN flag where epsilon exceeds
// the measure-ratio threshold. Flat-torus targets run in diagnostic mode.
SweepReport run_sweep(const FixtureDescriptor& fixture, std::vector<double> epsilons,
                      const ManifoldSpec& spec, const TranslationSearchConfig& cfg, double p);

// Canonical CSV: header comment with provenance, then one row per epsilon,
// %.17g formatting, NaN as NA, no timing column. Byte-stable across runs
// with equal seeds.
std::string sweep_csv_string(const SweepReport& report);
void write_sweep_csv(const SweepReport& report, const std::string& path);

// Degree of a closed loop of nonzero plane vectors: wrapped angle increments
// summed and divided by 2*pi. Needs >= 16 samples and every consecutive gap
// below pi/2.
int winding_number(const std::vector<Vec>& loop);

struct VortexRow {
    int resolution = 0;
    double energy = 0.0;
    std::int64_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// Minimal discrete Dirichlet energy of circle-valued fields on the unit
// disk with boundary data e^(i*degree*theta), by projected gradient descent
// at each resolution. For degree 1 the logarithmic growth law
// E(n2) - E(n1) >= 0.8 * 2*pi * ln(n2/n1) is asserted between successive
// resolutions. Requires p = 2.
std::vector<VortexRow> vortex_energy_study(const std::vector<int>& resolutions, double p,
                                           int degree = 1);

} // namespace mext
