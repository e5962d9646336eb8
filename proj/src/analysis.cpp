#include "mext/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mext/errors.hpp"

namespace mext {

namespace {

constexpr double kPi = 3.14159265358979323846;

int parse_member(const std::string& id, const std::string& prefix) {
    std::string tail = id.substr(prefix.size());
    if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos)
        throw ContractError("malformed fixtureId '" + id + "'");
    return std::stoi(tail);
}

} // namespace

VectorField make_fixture_field(GridPtr grid, const ManifoldSpec& spec, const std::string& fixtureId,
                               std::uint64_t seed, double* lipBound) {
    if (lipBound) *lipBound = std::numeric_limits<double>::quiet_NaN();
    if (fixtureId == "constant") {
        Vec q(spec.ambientDim);
        q[0] = 1.0;
        if (spec.kind == ManifoldKind::FlatTorus) q[2] = 1.0;
        if (lipBound) *lipBound = 0.0;
        return constant_field(grid, spec, q);
    }
    if (fixtureId.rfind("affine-", 0) == 0) {
        int member = parse_member(fixtureId, "affine-");
        AffineMap map = standard_affine_family(member, grid->dim, spec.ambientDim);
        return affine_normalized_field(grid, spec, map, lipBound);
    }
    if (fixtureId.rfind("converging-", 0) == 0) {
        int k = parse_member(fixtureId, "converging-");
        return converging_family_member(grid, spec, k, lipBound);
    }
    if (fixtureId == "random") return random_unit_field(grid, spec, seed);
    throw ContractError("unknown fixtureId '" + fixtureId +
                        "' (expected constant, affine-K, converging-K, random)");
}

SweepReport run_sweep(const FixtureDescriptor& fixture, std::vector<double> epsilons,
                      const ManifoldSpec& spec, const TranslationSearchConfig& cfg, double p) {
    if (epsilons.empty()) throw ContractError("sweep needs at least one epsilon");
    std::sort(epsilons.begin(), epsilons.end(), std::greater<double>());

    int dim = fixture.cell.dim;
    double mu = fixture.mu > 0.0 ? fixture.mu : std::sqrt(static_cast<double>(dim));
    double ebar = epsilon_threshold(fixture.cell, fixture.lo, fixture.hi);

    SweepReport report;
    report.fixtureId = fixture.fixtureId;
    report.target = manifold_name(spec);
    report.p = p;
    report.d = dim;
    report.seed = fixture.seed;

    const bool diagnostic = (spec.kind == ManifoldKind::FlatTorus);
    for (double eps : epsilons) {
        double spacing = eps / static_cast<double>(fixture.cellsPerEpsilon);
        GridPtr grid = build_grid(fixture.cell, fixture.lo, fixture.hi, eps, fixture.lambda, mu,
                                  spacing, Variant::Safe);
        VectorField f = make_fixture_field(grid, spec, fixture.fixtureId, fixture.seed);

        auto t0 = std::chrono::steady_clock::now();
        ConstrainedResult res = extend_constrained(f, spec, cfg, p, diagnostic);
        auto t1 = std::chrono::steady_clock::now();

        SweepRow row;
        row.epsilon = eps;
        row.measureRatio = measure_ratio(*grid);
        row.epsilonThreshold = ebar;
        row.cFunc = res.diag.cFunc;
        row.cGrad = res.diag.cGrad;
        row.constraintViolation = res.constraintViolation;
        row.preSnapMismatch = res.preSnapMismatch;
        row.runtimeMs = std::chrono::duration<double, std::milli>(t1 - t0).count();
        row.warnEpsilon = eps > ebar * (1.0 + 1e-12);
        report.rows.push_back(row);
    }
    return report;
}

std::string sweep_csv_string(const SweepReport& report) {
    std::string out;
    out += "# sweep fixture=" + report.fixtureId + " target=" + report.target;
    out += " d=" + std::to_string(report.d) + " p=" + format_g17(report.p);
    out += " seed=" + std::to_string(report.seed) + "\n";
    out += "epsilon,measureRatio,epsilonThreshold,cFunc,cGrad,constraintViolation,"
           "preSnapMismatch,warn\n";
    for (const SweepRow& r : report.rows) {
        out += format_g17(r.epsilon) + "," + format_g17(r.measureRatio) + "," +
               format_g17(r.epsilonThreshold) + "," + format_or_na(r.cFunc) + "," +
               format_or_na(r.cGrad) + "," + format_g17(r.constraintViolation) + "," +
               format_g17(r.preSnapMismatch) + "," + (r.warnEpsilon ? "1" : "0") + "\n";
    }
    return out;
}

void write_sweep_csv(const SweepReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("cannot open '" + path + "' for writing");
    out << sweep_csv_string(report);
    if (!out) throw ContractError("write failed for '" + path + "'");
}

int winding_number(const std::vector<Vec>& loop) {
    if (loop.size() < 16) throw ContractError("winding needs at least 16 loop samples");
    double total = 0.0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec& a = loop[i];
        const Vec& b = loop[(i + 1) % n];
        if (norm(a) == 0.0 || norm(b) == 0.0)
            throw ContractError("winding samples must be nonzero vectors");
        double da = std::atan2(b[1], b[0]) - std::atan2(a[1], a[0]);
        while (da > kPi) da -= 2.0 * kPi;
        while (da <= -kPi) da += 2.0 * kPi;
        if (std::abs(da) >= kPi / 2.0)
            throw GapTooLarge("consecutive loop samples differ by a quarter turn or more");
        total += da;
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

namespace {

struct DiskGrid {
    int n = 0;
    double h = 0.0;
    std::vector<std::uint8_t> active; // inside the unit disk
    std::vector<std::uint8_t> pinned; // boundary band, fixed values
    std::vector<double> vx, vy;       // unit vectors per cell
    int idx(int i, int j) const { return i * n + j; }
};

DiskGrid make_disk(int n, int degree) {
    DiskGrid g;
    g.n = n;
    g.h = 2.0 / static_cast<double>(n);
    g.active.assign(static_cast<std::size_t>(n) * n, 0);
    g.pinned.assign(static_cast<std::size_t>(n) * n, 0);
    g.vx.assign(static_cast<std::size_t>(n) * n, 0.0);
    g.vy.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double x = -1.0 + (i + 0.5) * g.h;
            double y = -1.0 + (j + 0.5) * g.h;
            double r = std::sqrt(x * x + y * y);
            if (r >= 1.0) continue;
            int id = g.idx(i, j);
            g.active[static_cast<std::size_t>(id)] = 1;
            if (r > 1.0 - 1.5 * g.h) g.pinned[static_cast<std::size_t>(id)] = 1;
            double theta = std::atan2(y, x);
            g.vx[static_cast<std::size_t>(id)] = std::cos(degree * theta);
            g.vy[static_cast<std::size_t>(id)] = std::sin(degree * theta);
        }
    return g;
}

// Sum over active neighbour pairs of |v_a - v_b|^2 (the h factors cancel for
// the planar Dirichlet integral).
double disk_energy(const DiskGrid& g) {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(g.n) * g.n * 2);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            int id = g.idx(i, j);
            if (!g.active[static_cast<std::size_t>(id)]) continue;
            const int nbs[2] = {i + 1 < g.n ? g.idx(i + 1, j) : -1,
                                j + 1 < g.n ? g.idx(i, j + 1) : -1};
            for (int nb : nbs) {
                if (nb < 0 || !g.active[static_cast<std::size_t>(nb)]) continue;
                double dx = g.vx[static_cast<std::size_t>(id)] - g.vx[static_cast<std::size_t>(nb)];
                double dy = g.vy[static_cast<std::size_t>(id)] - g.vy[static_cast<std::size_t>(nb)];
                terms.push_back(dx * dx + dy * dy);
            }
        }
    return terms.empty() ? 0.0 : pairwise_sum(terms);
}

VortexRow minimize_disk(DiskGrid& g) {
    VortexRow row;
    row.resolution = g.n;
    const std::int64_t maxIters = 300000;
    double step = 0.1;
    double energy = disk_energy(g);
    std::vector<double> gx(g.vx.size()), gy(g.vy.size());
    std::vector<double> savex, savey;
    const int offs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    std::int64_t iter = 0;
    for (; iter < maxIters; ++iter) {
        double residual = 0.0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                int id = g.idx(i, j);
                if (!g.active[static_cast<std::size_t>(id)] ||
                    g.pinned[static_cast<std::size_t>(id)]) {
                    gx[static_cast<std::size_t>(id)] = 0.0;
                    gy[static_cast<std::size_t>(id)] = 0.0;
                    continue;
                }
                double ax = 0.0, ay = 0.0;
                for (const auto& o : offs) {
                    int ii = i + o[0], jj = j + o[1];
                    if (ii < 0 || jj < 0 || ii >= g.n || jj >= g.n) continue;
                    int nb = g.idx(ii, jj);
                    if (!g.active[static_cast<std::size_t>(nb)]) continue;
                    ax += g.vx[static_cast<std::size_t>(id)] - g.vx[static_cast<std::size_t>(nb)];
                    ay += g.vy[static_cast<std::size_t>(id)] - g.vy[static_cast<std::size_t>(nb)];
                }
                ax *= 2.0;
                ay *= 2.0;
                gx[static_cast<std::size_t>(id)] = ax;
                gy[static_cast<std::size_t>(id)] = ay;
                // Tangential residual: the normal component is removed by
                // the renormalization, so only this part drives descent.
                double vn = ax * g.vx[static_cast<std::size_t>(id)] +
                            ay * g.vy[static_cast<std::size_t>(id)];
                double tx = ax - vn * g.vx[static_cast<std::size_t>(id)];
                double ty = ay - vn * g.vy[static_cast<std::size_t>(id)];
                residual = std::max(residual, std::sqrt(tx * tx + ty * ty));
            }
        row.residual = residual;
        savex = g.vx;
        savey = g.vy;
        double newEnergy = energy;
        while (true) {
            for (std::size_t id = 0; id < g.vx.size(); ++id) {
                if (!g.active[id] || g.pinned[id]) continue;
                double nx = savex[id] - step * gx[id];
                double ny = savey[id] - step * gy[id];
                double nn = std::sqrt(nx * nx + ny * ny);
                g.vx[id] = nx / nn;
                g.vy[id] = ny / nn;
            }
            newEnergy = disk_energy(g);
            if (newEnergy <= energy || step < 1e-14) break;
            step *= 0.5; // persistent halving keeps later steps stable too
        }
        double drop = energy - newEnergy;
        energy = newEnergy;
        if (drop >= 0.0 && drop <= 1e-9 * std::max(1.0, energy)) {
            row.converged = true;
            ++iter;
            break;
        }
    }
    row.iterations = iter;
    row.energy = energy;
    if (!row.converged)
        throw NoConvergence("disk minimization stalled; residual " + format_g17(row.residual));
    return row;
}

} // namespace

std::vector<VortexRow> vortex_energy_study(const std::vector<int>& resolutions, double p,
                                           int degree) {
    if (p != 2.0) throw ContractError("vortex study is defined for p = 2");
    if (resolutions.empty()) throw ContractError("vortex study needs at least one resolution");
    for (int n : resolutions)
        if (n < 8 || n % 2 != 0) throw ContractError("resolutions must be even and at least 8");
    std::vector<VortexRow> rows;
    for (int n : resolutions) {
        DiskGrid g = make_disk(n, degree);
        rows.push_back(minimize_disk(g));
    }
    if (degree == 1) {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            double lhs = rows[i].energy - rows[i - 1].energy;
            double rhs = 0.8 * 2.0 * kPi *
                         std::log(static_cast<double>(rows[i].resolution) /
                                  static_cast<double>(rows[i - 1].resolution));
            if (!(lhs >= rhs))
                throw ContractError("vortex energy increment fell below the logarithmic law");
        }
    }
    return rows;
}

} // namespace mext
