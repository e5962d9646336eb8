#include "mext/cli.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <vector>

#include <json.hpp>

#include "mext/analysis.hpp"
#include "mext/config.hpp"
#include "mext/micromag.hpp"

namespace mext {

namespace {

using Json = nlohmann::ordered_json;

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

void write_json(const Json& j, const std::string& path) {
    write_text(j.dump(2) + "\n", path);
}

Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

double parse_token_real(const Config& cfg, const std::string& key, const std::string& tok) {
    std::size_t slash = tok.find('/');
    if (slash != std::string::npos) {
        double num = parse_token_real(cfg, key, tok.substr(0, slash));
        double den = parse_token_real(cfg, key, tok.substr(slash + 1));
        if (den == 0.0) cfg.fail(key, "divides by zero in \"" + tok + "\"");
        return num / den;
    }
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size())
        cfg.fail(key, "expects a real, got \"" + tok + "\"");
    return v;
}

std::vector<std::string> tokens_of(const std::string& s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t b = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

// Geometry block shared by every grid-building command.
struct GeometryKeys {
    MicroCell cell;
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{0.0, 0.0, 0.0};
    int dim = 2;
    double lambda = 1.0;
    double mu = 0.0; // 0 selects sqrt(dim)
    int cellsPerEps = 8;

    double muResolved() const { return mu > 0.0 ? mu : std::sqrt(static_cast<double>(dim)); }
};

GeometryKeys read_geometry(Config& cfg) {
    GeometryKeys g;
    std::vector<double> dom = cfg.reals_required("domain");
    if (dom.size() != 4 && dom.size() != 6)
        cfg.fail("domain", "expects lo then hi per axis (4 reals in 2-d, 6 in 3-d)");
    g.dim = static_cast<int>(dom.size() / 2);
    for (int k = 0; k < g.dim; ++k) {
        g.lo[static_cast<std::size_t>(k)] = dom[static_cast<std::size_t>(k)];
        g.hi[static_cast<std::size_t>(k)] = dom[static_cast<std::size_t>(k + g.dim)];
        if (!(g.lo[static_cast<std::size_t>(k)] < g.hi[static_cast<std::size_t>(k)]))
            cfg.fail("domain", "needs lo < hi on every axis");
    }

    std::vector<std::string> hole = tokens_of(cfg.str_required("hole"));
    if (hole.empty()) cfg.fail("hole", "expects `disk <center> <radius>` or `box <center> <halfwidths>`");
    std::array<double, 3> center{0.0, 0.0, 0.0};
    try {
        if (hole[0] == "disk") {
            if (hole.size() != static_cast<std::size_t>(g.dim) + 2)
                cfg.fail("hole", "disk expects " + std::to_string(g.dim) + " center coordinates and a radius");
            for (int k = 0; k < g.dim; ++k)
                center[static_cast<std::size_t>(k)] =
                    parse_token_real(cfg, "hole", hole[static_cast<std::size_t>(k) + 1]);
            double radius = parse_token_real(cfg, "hole", hole.back());
            g.cell = make_microcell_disk(g.dim, center, radius);
        } else if (hole[0] == "box") {
            if (hole.size() != 2 * static_cast<std::size_t>(g.dim) + 1)
                cfg.fail("hole", "box expects " + std::to_string(g.dim) + " center coordinates and " +
                                     std::to_string(g.dim) + " half-widths");
            std::array<double, 3> hw{0.0, 0.0, 0.0};
            for (int k = 0; k < g.dim; ++k) {
                center[static_cast<std::size_t>(k)] =
                    parse_token_real(cfg, "hole", hole[static_cast<std::size_t>(k) + 1]);
                hw[static_cast<std::size_t>(k)] =
                    parse_token_real(cfg, "hole", hole[static_cast<std::size_t>(g.dim + k) + 1]);
            }
            g.cell = make_microcell_box(g.dim, center, hw);
        } else {
            cfg.fail("hole", "unknown shape \"" + hole[0] + "\" (disk or box)");
        }
    } catch (const ContractError& e) {
        cfg.fail("hole", std::string("is invalid: ") + e.what());
    }

    g.lambda = cfg.real("lambda", "1");
    if (g.lambda < 0.0) cfg.fail("lambda", "must be >= 0");
    g.mu = cfg.real("mu", "0");
    if (g.mu < 0.0) cfg.fail("mu", "must be >= 0 (0 selects sqrt(d))");
    g.cellsPerEps = static_cast<int>(cfg.integer("cells_per_epsilon", "8"));
    if (g.cellsPerEps < 1) cfg.fail("cells_per_epsilon", "must be positive");
    return g;
}

Variant read_variant(Config& cfg) {
    std::string v = cfg.str("variant", "safe");
    if (v == "safe") return Variant::Safe;
    if (v == "general") return Variant::General;
    cfg.fail("variant", "expects safe or general");
}

ManifoldSpec read_target(Config& cfg) {
    std::string name = cfg.str_required("target");
    try {
        return make_manifold_by_name(name);
    } catch (const ContractError& e) {
        cfg.fail("target", std::string("is invalid: ") + e.what());
    }
}

TranslationSearchConfig read_translation(Config& cfg, std::uint64_t seed) {
    TranslationSearchConfig t;
    t.candidateCount = static_cast<int>(cfg.integer("candidates", "64"));
    t.guardEta = cfg.real("guard_eta", "0");
    if (t.guardEta < 0.0) cfg.fail("guard_eta", "must be >= 0 (0 selects the default)");
    t.mollifyRadius = static_cast<int>(cfg.integer("mollify_radius", "2"));
    if (t.mollifyRadius < 0) cfg.fail("mollify_radius", "must be >= 0");
    t.seed = seed;
    return t;
}

std::vector<double> read_epsilons(Config& cfg, const char* fallback) {
    std::vector<double> eps = cfg.reals("epsilons", fallback);
    for (double e : eps)
        if (!(e > 0.0)) cfg.fail("epsilons", "must all be positive");
    return eps;
}

void write_mask_csv(const PerforatedGrid& g, const std::string& path) {
    std::string out;
    std::int64_t layer = g.dim == 3 ? g.dims[2] / 2 : 0;
    out += "# cell labels: 0 solid, 1 hole, 2 outside";
    if (g.dim == 3) out += " (slice iz=" + std::to_string(layer) + ")";
    out += "\n";
    out += g.dim == 3 ? "ix,iy,iz,x,y,z,label\n" : "ix,iy,x,y,label\n";
    for (std::int64_t ix = 0; ix < g.dims[0]; ++ix)
        for (std::int64_t iy = 0; iy < g.dims[1]; ++iy) {
            std::int64_t idx = g.index(ix, iy, layer);
            auto x = g.center(idx);
            out += std::to_string(ix) + "," + std::to_string(iy) + ",";
            if (g.dim == 3) out += std::to_string(layer) + ",";
            out += format_g17(x[0]) + "," + format_g17(x[1]) + ",";
            if (g.dim == 3) out += format_g17(x[2]) + ",";
            out += std::to_string(static_cast<int>(g.mask[static_cast<std::size_t>(idx)])) + "\n";
        }
    write_text(out, path);
}

Json diagnostics_json(const ExtensionDiagnostics& d) {
    Json j;
    j["p"] = d.p;
    j["lpIn"] = d.lpIn;
    j["lpOut"] = d.lpOut;
    j["gradIn"] = d.gradIn;
    j["gradOut"] = d.gradOut;
    j["cFunc"] = d.cFunc;
    j["cGrad"] = d.cGrad;
    j["convexHullViolation"] = d.convexHullViolation;
    j["unfilledCells"] = d.unfilledCells;
    return j;
}

int run_build_domain(Config& cfg, const RunDescriptor& run) {
    GeometryKeys g = read_geometry(cfg);
    double epsilon = cfg.real_required("epsilon");
    if (!(epsilon > 0.0)) cfg.fail("epsilon", "must be positive");
    Variant variant = read_variant(cfg);
    cfg.reject_unknown();
    cfg.write_resolved(join(run.outputDir, "resolved.cfg"), run.command);

    auto t0 = std::chrono::steady_clock::now();
    GridPtr grid = build_grid(g.cell, g.lo, g.hi, epsilon, g.lambda, g.muResolved(),
                              epsilon / g.cellsPerEps, variant);
    double ratio = measure_ratio(*grid);
    double ebar = epsilon_threshold(g.cell, g.lo, g.hi);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    Json j;
    j["command"] = "build-domain";
    j["epsilon"] = epsilon;
    j["variant"] = variant == Variant::Safe ? "safe" : "general";
    j["spacing"] = grid->spacing;
    j["dims"] = Json::array();
    for (int k = 0; k < grid->dim; ++k) j["dims"].push_back(grid->dims[static_cast<std::size_t>(k)]);
    j["cells"] = Json{{"solid", grid->countLabel(CellLabel::Solid)},
                      {"hole", grid->countLabel(CellLabel::Hole)},
                      {"outside", grid->countLabel(CellLabel::Outside)}};
    j["translations"] = Json{{"admissible", grid->zAdmissible.size()},
                             {"interior", grid->zInterior.size()},
                             {"boundary", grid->zBoundary.size()},
                             {"holesWithCells", grid->holes.size()}};
    j["measureRatio"] = ratio;
    j["measureRatioBound"] = measure_ratio_bound(g.cell);
    j["epsilonThreshold"] = ebar;
    j["warnEpsilon"] = epsilon > ebar * (1.0 + 1e-12);
    j["files"] = Json{{"mask", "mask.csv"}};
    j["timings"] = Json{{"totalMs", ms}};
    write_mask_csv(*grid, join(run.outputDir, "mask.csv"));
    write_json(j, join(run.outputDir, "report.json"));
    std::printf("build-domain: ratio %.6g (bound %.6g), threshold %.6g\n", ratio,
                measure_ratio_bound(g.cell), ebar);
    return 0;
}

int run_extend(Config& cfg, const RunDescriptor& run) {
    GeometryKeys g = read_geometry(cfg);
    double epsilon = cfg.real_required("epsilon");
    if (!(epsilon > 0.0)) cfg.fail("epsilon", "must be positive");
    Variant variant = read_variant(cfg);
    double margin = 0.0;
    if (variant == Variant::General) margin = cfg.real_required("margin");
    ManifoldSpec spec = read_target(cfg);
    std::string fixtureId = cfg.str("fixture", "affine-0");
    double p = cfg.real("p", "2");
    TranslationSearchConfig tcfg = read_translation(cfg, run.seed);
    cfg.reject_unknown();
    cfg.write_resolved(join(run.outputDir, "resolved.cfg"), run.command);

    auto t0 = std::chrono::steady_clock::now();
    GridPtr grid = build_grid(g.cell, g.lo, g.hi, epsilon, g.lambda, g.muResolved(),
                              epsilon / g.cellsPerEps, variant);
    VectorField f = make_fixture_field(grid, spec, fixtureId, run.seed);
    bool diagnostic = spec.kind == ManifoldKind::FlatTorus;
    ConstrainedResult res = variant == Variant::Safe
                                ? extend_constrained(f, spec, tcfg, p, diagnostic)
                                : extend_constrained_retracted(f, spec, tcfg, margin, p, diagnostic);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    Json j;
    j["command"] = "extend";
    j["epsilon"] = epsilon;
    j["variant"] = variant == Variant::Safe ? "safe" : "general";
    j["target"] = manifold_name(spec);
    j["fixture"] = fixtureId;
    j["p"] = p;
    j["h"] = vec_json(res.choice.h);
    j["objective"] = res.choice.objective;
    j["survivorCount"] = res.choice.survivorCount;
    j["survivorMeanObjective"] = res.choice.survivorMeanObjective;
    j["cFunc"] = res.diag.cFunc;
    j["cGrad"] = res.diag.cGrad;
    j["diagnostics"] = diagnostics_json(res.diag);
    j["preSnapMismatch"] = res.preSnapMismatch;
    j["constraintViolation"] = res.constraintViolation;
    j["warnings"] = res.warnings;
    if (variant == Variant::Safe) {
        LpBoundReport lp = lp_bound_decomposition(f, res.field, spec, p);
        j["lpBound"] = Json{{"lipHat", lp.lipHat},
                            {"cReal", lp.cReal},
                            {"lhs", lp.lhs},
                            {"rhs", lp.rhs},
                            {"holds", lp.holds},
                            {"chainApplicable", lp.chainApplicable},
                            {"chainLhs", lp.chainLhs},
                            {"chainRhs", lp.chainRhs},
                            {"chainHolds", lp.chainHolds}};
    }
    j["files"] = Json{{"input", "input.field"}, {"output", "output.field"}, {"slice", "slice.csv"}};
    j["timings"] = Json{{"totalMs", ms}};
    write_field(f, join(run.outputDir, "input.field"));
    write_field(res.field, join(run.outputDir, "output.field"));
    write_field_csv_slice(res.field, join(run.outputDir, "slice.csv"), 2, grid->dims[2] / 2);
    write_json(j, join(run.outputDir, "report.json"));
    std::printf("extend: constraint violation %.3g, pre-snap mismatch %.3g\n",
                res.constraintViolation, res.preSnapMismatch);
    return 0;
}

int run_sweep_cmd(Config& cfg, const RunDescriptor& run) {
    GeometryKeys g = read_geometry(cfg);
    std::vector<double> epsilons = read_epsilons(cfg, "1/8 1/12 1/16 1/24 1/32");
    ManifoldSpec spec = read_target(cfg);
    std::string fixtureId = cfg.str("fixture", "affine-0");
    double p = cfg.real("p", "2");
    TranslationSearchConfig tcfg = read_translation(cfg, run.seed);
    cfg.reject_unknown();
    cfg.write_resolved(join(run.outputDir, "resolved.cfg"), run.command);

    FixtureDescriptor fd;
    fd.fixtureId = fixtureId;
    fd.cell = g.cell;
    fd.lo = g.lo;
    fd.hi = g.hi;
    fd.lambda = g.lambda;
    fd.mu = g.mu;
    fd.cellsPerEpsilon = g.cellsPerEps;
    fd.seed = run.seed;

    auto t0 = std::chrono::steady_clock::now();
    SweepReport rep = run_sweep(fd, epsilons, spec, tcfg, p);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    write_sweep_csv(rep, join(run.outputDir, "sweep.csv"));
    Json j;
    j["command"] = "sweep";
    j["fixture"] = rep.fixtureId;
    j["target"] = rep.target;
    j["d"] = rep.d;
    j["p"] = rep.p;
    j["seed"] = rep.seed;
    j["rows"] = Json::array();
    for (const SweepRow& r : rep.rows) {
        Json row;
        row["epsilon"] = r.epsilon;
        row["measureRatio"] = r.measureRatio;
        row["epsilonThreshold"] = r.epsilonThreshold;
        row["cFunc"] = r.cFunc;
        row["cGrad"] = r.cGrad;
        row["constraintViolation"] = r.constraintViolation;
        row["preSnapMismatch"] = r.preSnapMismatch;
        row["warnEpsilon"] = r.warnEpsilon;
        row["runtimeMs"] = r.runtimeMs;
        j["rows"].push_back(row);
    }
    j["files"] = Json{{"sweep", "sweep.csv"}};
    j["timings"] = Json{{"totalMs", ms}};
    write_json(j, join(run.outputDir, "report.json"));
    std::printf("sweep: %zu rows written\n", rep.rows.size());
    return 0;
}

int run_vortex(Config& cfg, const RunDescriptor& run) {
    std::vector<std::int64_t> res64 = cfg.integers("resolutions", "32 64 128");
    int degree = static_cast<int>(cfg.integer("degree", "1"));
    double p = cfg.real("p", "2");
    cfg.reject_unknown();
    cfg.write_resolved(join(run.outputDir, "resolved.cfg"), run.command);

    std::vector<int> resolutions;
    resolutions.reserve(res64.size());
    for (std::int64_t r : res64) resolutions.push_back(static_cast<int>(r));

    auto t0 = std::chrono::steady_clock::now();
    std::vector<VortexRow> rows = vortex_energy_study(resolutions, p, degree);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    std::string csv = "# disk vortex energies, degree=" + std::to_string(degree) + "\n";
    csv += "resolution,energy,iterations,residual,converged\n";
    for (const VortexRow& r : rows)
        csv += std::to_string(r.resolution) + "," + format_g17(r.energy) + "," +
               std::to_string(r.iterations) + "," + format_g17(r.residual) + "," +
               (r.converged ? "1" : "0") + "\n";
    write_text(csv, join(run.outputDir, "vortex.csv"));

    Json j;
    j["command"] = "vortex";
    j["degree"] = degree;
    j["p"] = p;
    j["rows"] = Json::array();
    for (const VortexRow& r : rows)
        j["rows"].push_back(Json{{"resolution", r.resolution},
                                 {"energy", r.energy},
                                 {"iterations", r.iterations},
                                 {"residual", r.residual},
                                 {"converged", r.converged}});
    j["files"] = Json{{"vortex", "vortex.csv"}};
    j["timings"] = Json{{"totalMs", ms}};
    write_json(j, join(run.outputDir, "report.json"));
    std::printf("vortex: %zu resolutions\n", rows.size());
    return 0;
}

int run_micromag(Config& cfg, const RunDescriptor& run) {
    GeometryKeys g = read_geometry(cfg);
    // Descent cost grows like spacing^-(d+2); keep the default sweep at grids
    // the default iteration budget actually relaxes (<= 32^d at 8 cells per epsilon).
    std::vector<double> epsilons = read_epsilons(cfg, "1/2 1/3 1/4");
    ManifoldSpec spec = read_target(cfg);

    EnergyConfig ecfg;
    ecfg.exchange = cfg.real("exchange", "1");
    if (!(ecfg.exchange > 0.0)) cfg.fail("exchange", "must be positive");
    ecfg.anisotropyWeight = cfg.real("kappa", "0");
    if (ecfg.anisotropyWeight < 0.0) cfg.fail("kappa", "must be >= 0");
    if (cfg.has("anisotropy_axis")) {
        std::vector<double> ax = cfg.reals("anisotropy_axis", "");
        if (static_cast<int>(ax.size()) != g.dim)
            cfg.fail("anisotropy_axis", "expects one component per grid axis");
        Vec axis(g.dim);
        for (int k = 0; k < g.dim; ++k) axis[k] = ax[static_cast<std::size_t>(k)];
        ecfg.anisotropyAxis = axis;
    } else {
        (void)cfg.str("anisotropy_axis", "auto");
    }
    ecfg.maxIters = cfg.integer("max_iters", "200000");
    ecfg.stepSize = cfg.real("step_size", "0");
    ecfg.gradTolerance = cfg.real("grad_tolerance", "1e-4");

    std::string pin = cfg.str("pinning", "none");
    CollarPinning pinning = CollarPinning::None;
    if (pin == "uniform") pinning = CollarPinning::Uniform;
    else if (pin == "wall") pinning = CollarPinning::Wall;
    else if (pin != "none") cfg.fail("pinning", "expects none, uniform or wall");

    TranslationSearchConfig tcfg = read_translation(cfg, run.seed);
    cfg.reject_unknown();
    cfg.write_resolved(join(run.outputDir, "resolved.cfg"), run.command);

    FixtureDescriptor geo;
    geo.cell = g.cell;
    geo.lo = g.lo;
    geo.hi = g.hi;
    geo.lambda = g.lambda;
    geo.mu = g.mu;
    geo.cellsPerEpsilon = g.cellsPerEps;
    geo.seed = run.seed;

    auto t0 = std::chrono::steady_clock::now();
    std::vector<HomogenizationRow> rows =
        homogenization_study(geo, epsilons, ecfg, spec, tcfg, pinning);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    std::string csv = "# homogenization study\n";
    csv += "epsilon,minimalEnergy,w12Norm,constraintViolation,converged\n";
    for (const HomogenizationRow& r : rows)
        csv += format_g17(r.epsilon) + "," + format_g17(r.minimalEnergy) + "," +
               format_g17(r.w12Norm) + "," + format_g17(r.constraintViolation) + "," +
               (r.converged ? "1" : "0") + "\n";
    write_text(csv, join(run.outputDir, "homog.csv"));

    Json j;
    j["command"] = "micromag";
    j["exchange"] = ecfg.exchange;
    j["kappa"] = ecfg.anisotropyWeight;
    j["pinning"] = pin;
    j["rows"] = Json::array();
    for (const HomogenizationRow& r : rows)
        j["rows"].push_back(Json{{"epsilon", r.epsilon},
                                 {"minimalEnergy", r.minimalEnergy},
                                 {"w12Norm", r.w12Norm},
                                 {"constraintViolation", r.constraintViolation},
                                 {"converged", r.converged},
                                 {"runtimeMs", r.runtimeMs}});
    j["files"] = Json{{"homog", "homog.csv"}};
    j["timings"] = Json{{"totalMs", ms}};
    write_json(j, join(run.outputDir, "report.json"));
    std::printf("micromag: %zu rows written\n", rows.size());
    return 0;
}

// ---------------------------------------------------------------------------
// selftest

struct CheckResult {
    std::string name;
    bool ok = true;
    std::string error;
};

void require_check(bool cond, const std::string& what) {
    if (!cond) throw ContractError(what);
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

int run_selftest(Config& cfg, const RunDescriptor& run) {
    cfg.reject_unknown();
    cfg.write_resolved(join(run.outputDir, "resolved.cfg"), run.command);

    const std::uint64_t seed = run.seed;
    MicroCell disk2 = make_microcell_disk(2, {0.0, 0.0, 0.0}, 0.3);
    auto grid8 = [&] {
        return build_grid(disk2, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 0.125, 1.0, std::sqrt(2.0),
                          0.125 / 8.0, Variant::Safe);
    };
    ManifoldSpec sphere2 = make_manifold(ManifoldKind::Sphere, 2);
    ManifoldSpec sphere3 = make_manifold(ManifoldKind::Sphere, 3);

    std::vector<std::pair<std::string, std::function<void()>>> checks;

    checks.emplace_back("microcell-volume-fractions", [&] {
        require_check(std::abs(disk2.q0 - 3.14159265358979323846 * 0.09) <= 1e-15,
                      "disk q0 differs from pi r^2");
        MicroCell box = make_microcell_box(2, {0.0, 0.0, 0.0}, {0.25, 0.25, 0.0});
        require_check(box.q0 == 0.25, "box q0 differs from the side product");
        require_check(std::abs(disk2.q0 + (1.0 - disk2.q0) - 1.0) <= 1e-16, "q0 + q1 != 1");
    });

    checks.emplace_back("hole-signed-distance", [&] {
        require_check(std::abs(signed_distance_to_hole(disk2, {0.3, 0.0, 0.0})) <= 1e-15,
                      "boundary point not at distance zero");
        require_check(std::abs(signed_distance_to_hole(disk2, {0.0, 0.0, 0.0}) + 0.3) <= 1e-15,
                      "center not at depth radius");
    });

    checks.emplace_back("threshold-formula", [&] {
        double ebar = epsilon_threshold(disk2, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
        double expected = (1.0 - disk2.q0) / (4.0 * std::sqrt(2.0) * 4.0 * disk2.q0);
        require_check(std::abs(ebar - expected) <= 1e-15 * expected,
                      "threshold differs from the closed form");
    });

    checks.emplace_back("measure-ratio-bound", [&] {
        GridPtr grid = build_grid(disk2, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 1.0 / 12.0, 1.0,
                                  std::sqrt(2.0), 1.0 / 96.0, Variant::Safe);
        double ratio = measure_ratio(*grid);
        double bound = measure_ratio_bound(disk2);
        require_check(ratio > 0.0 && ratio <= bound, "ratio exceeds the certified bound");
        require_check(std::abs(bound - (1.0 + disk2.q0) / (1.0 - disk2.q0)) <= 1e-15 * bound,
                      "bound differs from (1+q0)/(1-q0)");
    });

    checks.emplace_back("retraction-laws", [&] {
        Rng rng(seed ^ 0x72657472ull);
        for (int i = 0; i < 200; ++i) {
            Vec y(3);
            double r2 = 0.0;
            do {
                for (int k = 0; k < 3; ++k) y[k] = rng.uniform(-1.0, 1.0);
                r2 = dot(y, y);
            } while (r2 < 0.05 * 0.05 || r2 > 1.9 * 1.9);
            Vec z = retract(sphere3, y);
            require_check(std::abs(norm(z) - 1.0) <= 1e-14, "retraction left the sphere");
            double law = retraction_gradient_norm(sphere3, y) * dist_to_singular(sphere3, y);
            require_check(std::abs(law - 1.0) <= 1e-12, "gradient-distance law violated");
        }
    });

    checks.emplace_back("projection-agrees-in-tube", [&] {
        Rng rng(seed ^ 0x70726f6aull);
        for (int i = 0; i < 200; ++i) {
            Vec dir(2);
            double n = 0.0;
            do {
                dir[0] = rng.normal();
                dir[1] = rng.normal();
                n = norm(dir);
            } while (n < 1e-6);
            Vec y = (rng.uniform(0.6, 1.4) / n) * dir;
            Vec a = project(sphere2, y);
            Vec b = retract(sphere2, y);
            require_check(norm(a - b) <= 1e-15, "projection and retraction disagree in the tube");
        }
    });

    checks.emplace_back("inverse-round-trip", [&] {
        for (const ManifoldSpec& spec : {sphere2, sphere3}) {
            Rng rng(seed ^ 0x696e76ull ^ static_cast<std::uint64_t>(spec.ambientDim));
            for (int i = 0; i < 100; ++i) {
                Vec z(spec.ambientDim);
                double n = 0.0;
                do {
                    for (int k = 0; k < spec.ambientDim; ++k) z[k] = rng.normal();
                    n = norm(z);
                } while (n < 1e-6);
                z = (1.0 / n) * z;
                Vec h(spec.ambientDim);
                double r2 = 0.0;
                do {
                    for (int k = 0; k < spec.ambientDim; ++k) h[k] = rng.uniform(-1.0, 1.0);
                    r2 = dot(h, h);
                } while (r2 > 1.0);
                h = (spec.sigma / 2.0) * h;
                Vec back = inverse_on_manifold(spec, h, retract_translated(spec, h, z));
                require_check(norm(back - z) <= 1e-10, "inverse round trip drifted");
            }
        }
    });

    checks.emplace_back("winding-degrees", [&] {
        auto loop_of = [](int degree) {
            std::vector<Vec> loop;
            for (int i = 0; i < 64; ++i) {
                double th = 2.0 * 3.14159265358979323846 * i / 64.0;
                Vec v(2);
                v[0] = std::cos(degree * th);
                v[1] = std::sin(degree * th);
                loop.push_back(v);
            }
            return loop;
        };
        require_check(winding_number(loop_of(1)) == 1, "identity loop winding != 1");
        require_check(winding_number(loop_of(3)) == 3, "cubed loop winding != 3");
        require_check(winding_number(loop_of(-2)) == -2, "inverse-square loop winding != -2");
    });

    checks.emplace_back("unconstrained-identity", [&] {
        GridPtr grid = grid8();
        VectorField f = make_fixture_field(grid, sphere2, "affine-0", seed);
        ExtensionDiagnostics diag;
        VectorField s = extend_unconstrained(f, 2.0, &diag);
        require_check(diag.unfilledCells == 0, "safe extension left holes unfilled");
        for (std::int64_t idx = 0; idx < grid->cellCount(); ++idx) {
            CellLabel lab = grid->mask[static_cast<std::size_t>(idx)];
            if (lab == CellLabel::Solid) {
                require_check(std::memcmp(f.values.data() + idx * 2, s.values.data() + idx * 2,
                                          2 * sizeof(double)) == 0,
                              "solid cell not copied bit-exactly");
            } else {
                require_check(s.isDefined(idx), "hole cell left undefined");
            }
        }
    });

    checks.emplace_back("unconstrained-linearity", [&] {
        GridPtr grid = grid8();
        VectorField u = random_unit_field(grid, sphere2, seed + 1);
        VectorField v = random_unit_field(grid, sphere2, seed + 2);
        VectorField w = make_field(grid, 2);
        for (std::int64_t idx = 0; idx < grid->cellCount(); ++idx)
            if (u.isDefined(idx)) w.setValue(idx, 0.7 * u.value(idx) + (-1.3) * v.value(idx));
        VectorField su = extend_unconstrained(u);
        VectorField sv = extend_unconstrained(v);
        VectorField sw = extend_unconstrained(w);
        for (std::int64_t idx = 0; idx < grid->cellCount(); ++idx) {
            if (!sw.isDefined(idx)) continue;
            Vec lhs = sw.value(idx);
            Vec rhs = 0.7 * su.value(idx) + (-1.3) * sv.value(idx);
            require_check(norm(lhs - rhs) <= 1e-12, "extension is not linear");
        }
    });

    checks.emplace_back("unconstrained-convex-hull", [&] {
        GridPtr grid = grid8();
        VectorField u = random_unit_field(grid, sphere2, seed + 3);
        VectorField su = extend_unconstrained(u);
        for (std::int64_t idx = 0; idx < grid->cellCount(); ++idx)
            if (su.isDefined(idx))
                require_check(norm(su.value(idx)) <= 1.0 + 1e-12,
                              "extension escaped the unit ball hull");
    });

    checks.emplace_back("mollify-hull-and-identity", [&] {
        GridPtr grid = grid8();
        VectorField f = make_fixture_field(grid, sphere2, "affine-1", seed);
        VectorField s = extend_unconstrained(f);
        VectorField same = mollify(s, 0);
        require_check(bits_equal(s.values, same.values), "radius-0 mollification changed values");
        VectorField m = mollify(s, 2);
        for (int c = 0; c < 2; ++c) {
            double lo = 1e300;
            double hi = -1e300;
            for (std::int64_t idx = 0; idx < grid->cellCount(); ++idx)
                if (s.isDefined(idx)) {
                    lo = std::min(lo, s.values[static_cast<std::size_t>(idx * 2 + c)]);
                    hi = std::max(hi, s.values[static_cast<std::size_t>(idx * 2 + c)]);
                }
            for (std::int64_t idx = 0; idx < grid->cellCount(); ++idx)
                if (m.isDefined(idx)) {
                    double v = m.values[static_cast<std::size_t>(idx * 2 + c)];
                    require_check(v >= lo - 1e-12 && v <= hi + 1e-12,
                                  "mollified value escaped the component hull");
                }
        }
    });

    checks.emplace_back("constrained-pipeline", [&] {
        GridPtr grid = grid8();
        VectorField f = make_fixture_field(grid, sphere2, "affine-0", seed);
        TranslationSearchConfig tcfg;
        tcfg.seed = seed;
        ConstrainedResult res = extend_constrained(f, sphere2, tcfg, 2.0);
        require_check(res.constraintViolation <= 1e-12, "constrained output left the sphere");
        require_check(res.choice.objective <=
                          res.choice.survivorMeanObjective * (1.0 + 1e-12) + 1e-300,
                      "selected objective above the survivor mean");
        require_check(res.choice.survivorCount >= 1, "no surviving translation");
        for (std::int64_t idx = 0; idx < grid->cellCount(); ++idx)
            if (grid->mask[static_cast<std::size_t>(idx)] == CellLabel::Solid)
                require_check(std::memcmp(f.values.data() + idx * 2, res.field.values.data() + idx * 2,
                                          2 * sizeof(double)) == 0,
                              "snap did not restore the input bit-exactly");
    });

    checks.emplace_back("micromag-closed-forms", [&] {
        GridPtr grid = grid8();
        EnergyConfig ecfg;
        Vec e(2);
        e[0] = 0.0;
        e[1] = 1.0;
        ecfg.anisotropyAxis = e;
        VectorField me = make_field(grid, 2);
        VectorField mp = make_field(grid, 2);
        std::int64_t solidCount = 0;
        for (std::int64_t idx = 0; idx < grid->cellCount(); ++idx)
            if (grid->mask[static_cast<std::size_t>(idx)] == CellLabel::Solid) {
                Vec a(2);
                a[0] = 0.0;
                a[1] = 1.0;
                me.setValue(idx, a);
                Vec b(2);
                b[0] = 1.0;
                b[1] = 0.0;
                mp.setValue(idx, b);
                ++solidCount;
            }
        require_check(micromag_energy(me, ecfg) == 0.0, "aligned constant field has energy");
        ecfg.anisotropyWeight = 1.0;
        double expected = static_cast<double>(solidCount) * grid->cellVolume();
        require_check(micromag_energy(mp, ecfg) == expected,
                      "orthogonal constant field misses kappa * volume");
    });

    checks.emplace_back("micromag-fd-gradient", [&] {
        GridPtr grid = grid8();
        VectorField m = random_unit_field(grid, sphere2, seed + 5);
        EnergyConfig ecfg;
        ecfg.anisotropyWeight = 0.7;
        VectorField grad = micromag_gradient(m, ecfg);
        int tested = 0;
        for (std::int64_t idx = 0; idx < grid->cellCount() && tested < 3; ++idx) {
            if (grid->mask[static_cast<std::size_t>(idx)] != CellLabel::Solid) continue;
            auto c = grid->unpack(idx);
            if (c[0] < 2 || c[1] < 2) continue;
            bool interior = true;
            for (int axis = 0; axis < 2 && interior; ++axis)
                for (int sgn = -1; sgn <= 1 && interior; sgn += 2) {
                    auto cc = c;
                    cc[static_cast<std::size_t>(axis)] += sgn;
                    if (cc[static_cast<std::size_t>(axis)] < 0 ||
                        cc[static_cast<std::size_t>(axis)] >= grid->dims[static_cast<std::size_t>(axis)] ||
                        grid->mask[static_cast<std::size_t>(grid->index(cc[0], cc[1], cc[2]))] !=
                            CellLabel::Solid)
                        interior = false;
                }
            if (!interior) continue;
            ++tested;
            for (int comp = 0; comp < 2; ++comp) {
                double h = 1e-6;
                VectorField plus = m;
                VectorField minus = m;
                plus.values[static_cast<std::size_t>(idx * 2 + comp)] += h;
                minus.values[static_cast<std::size_t>(idx * 2 + comp)] -= h;
                double fd = (micromag_energy_raw(plus, ecfg) - micromag_energy_raw(minus, ecfg)) /
                            (2.0 * h);
                double an = grad.values[static_cast<std::size_t>(idx * 2 + comp)];
                require_check(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)),
                              "finite differences disagree with the gradient");
            }
        }
        require_check(tested == 3, "not enough interior solid cells for the probe");
    });

    checks.emplace_back("micromag-coercivity", [&] {
        GridPtr grid = grid8();
        VectorField m = random_unit_field(grid, sphere2, seed + 6);
        EnergyConfig ecfg;
        ecfg.anisotropyWeight = 0.3;
        double energy = micromag_energy(m, ecfg);
        double semi = w1p_seminorm(m, 2.0, NormRegion::Solid);
        require_check(energy >= semi * semi - 1e-12 * std::max(1.0, semi * semi),
                      "energy fell below the exchange seminorm");
    });

    checks.emplace_back("sweep-determinism", [&] {
        FixtureDescriptor fd;
        fd.fixtureId = "affine-0";
        fd.cell = disk2;
        fd.lo = {0.0, 0.0, 0.0};
        fd.hi = {1.0, 1.0, 1.0};
        fd.seed = seed;
        TranslationSearchConfig tcfg;
        tcfg.seed = seed;
        SweepReport a = run_sweep(fd, {0.125}, sphere2, tcfg, 2.0);
        SweepReport b = run_sweep(fd, {0.125}, sphere2, tcfg, 2.0);
        require_check(sweep_csv_string(a) == sweep_csv_string(b),
                      "identical sweeps serialized differently");
    });

    checks.emplace_back("field-round-trip", [&] {
        GridPtr grid = grid8();
        VectorField f = make_fixture_field(grid, sphere2, "random", seed + 7);
        std::string path = join(run.outputDir, "selftest-roundtrip.field");
        write_field(f, path);
        RawField raw = read_field(path);
        VectorField g2 = attach_field(raw, grid);
        require_check(bits_equal(f.values, g2.values), "values changed across the round trip");
        require_check(f.defined == g2.defined, "defined mask changed across the round trip");
    });

    checks.emplace_back("config-parsing", [&] {
        Config c = Config::from_string("a = 1/8\n# comment\nb = \"x y\"\n");
        require_check(c.real("a", "0") == 0.125, "fraction value parsed wrong");
        require_check(c.str("b", "") == "x y", "quoted value parsed wrong");
        c.reject_unknown();
        bool threw = false;
        try {
            Config bad = Config::from_string("x = 1\n");
            bad.reject_unknown();
        } catch (const UnknownKey&) {
            threw = true;
        }
        require_check(threw, "unknown key not rejected");
        threw = false;
        try {
            Config bad = Config::from_string("lambda = abc\n");
            bad.real("lambda", "1");
        } catch (const TypeMismatch&) {
            threw = true;
        }
        require_check(threw, "type mismatch not detected");
    });

    std::vector<CheckResult> results;
    int failed = 0;
    for (auto& [name, body] : checks) {
        CheckResult r;
        r.name = name;
        try {
            body();
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
            ++failed;
        }
        std::printf("%s %s%s%s\n", r.ok ? "ok  " : "FAIL", r.name.c_str(),
                    r.ok ? "" : ": ", r.error.c_str());
        results.push_back(std::move(r));
    }
    std::printf("selftest: %zu passed, %d failed\n", results.size() - static_cast<std::size_t>(failed),
                failed);

    Json j;
    j["command"] = "selftest";
    j["seed"] = seed;
    j["passed"] = results.size() - static_cast<std::size_t>(failed);
    j["failed"] = failed;
    j["checks"] = Json::array();
    for (const CheckResult& r : results) {
        Json e;
        e["name"] = r.name;
        e["ok"] = r.ok;
        if (!r.ok) e["error"] = r.error;
        j["checks"].push_back(e);
    }
    write_json(j, join(run.outputDir, "report.json"));
    return failed == 0 ? 0 : 1;
}

} // namespace

int run_descriptor(const RunDescriptor& run) {
    try {
        try {
            std::filesystem::create_directories(run.outputDir);
        } catch (const std::exception& e) {
            throw ConfigError("output directory " + run.outputDir + ": " + e.what());
        }
        Config cfg = Config::load(run.configPath);
        if (run.command == "build-domain") return run_build_domain(cfg, run);
        if (run.command == "extend") return run_extend(cfg, run);
        if (run.command == "sweep") return run_sweep_cmd(cfg, run);
        if (run.command == "vortex") return run_vortex(cfg, run);
        if (run.command == "micromag") return run_micromag(cfg, run);
        if (run.command == "selftest") return run_selftest(cfg, run);
        throw ConfigError("unknown command '" + run.command + "'");
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ContractError& e) {
        std::fprintf(stderr, "contract violation: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace mext
