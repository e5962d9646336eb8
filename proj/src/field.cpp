#include "mext/field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "mext/errors.hpp"

namespace mext {

VectorField make_field(GridPtr grid, int components) {
    if (components < 1 || components > 4)
        throw InvalidShape("field components must lie in 1..4");
    VectorField f;
    f.grid = std::move(grid);
    f.components = components;
    f.values.assign(static_cast<std::size_t>(f.grid->cellCount()) * components,
                    std::numeric_limits<double>::quiet_NaN());
    f.defined.assign(static_cast<std::size_t>(f.grid->cellCount()), 0);
    return f;
}

void write_field(const VectorField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("cannot open '" + path + "' for writing");
    auto put = [&](const void* p, std::size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    };
    std::int32_t dim = field.grid->dim;
    std::int32_t comps = field.components;
    put(&dim, 4);
    put(&comps, 4);
    for (int k = 0; k < field.grid->dim; ++k) {
        std::int64_t n = field.grid->dims[static_cast<std::size_t>(k)];
        put(&n, 8);
    }
    put(&field.grid->spacing, 8);
    put(&field.grid->epsilon, 8);
    put(field.values.data(), field.values.size() * 8);
    if (!out) throw ContractError("write failed for '" + path + "'");
}

RawField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractError("cannot open '" + path + "' for reading");
    auto get = [&](void* p, std::size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in) throw ContractError("truncated field file '" + path + "'");
    };
    RawField raw;
    std::int32_t dim = 0, comps = 0;
    get(&dim, 4);
    get(&comps, 4);
    if (dim < 2 || dim > 3 || comps < 1 || comps > 4)
        throw ContractError("field file '" + path + "' has an invalid header");
    raw.dim = dim;
    raw.components = comps;
    raw.dims.resize(static_cast<std::size_t>(dim));
    std::int64_t cells = 1;
    for (int k = 0; k < dim; ++k) {
        get(&raw.dims[static_cast<std::size_t>(k)], 8);
        cells *= raw.dims[static_cast<std::size_t>(k)];
    }
    get(&raw.spacing, 8);
    get(&raw.epsilon, 8);
    raw.values.resize(static_cast<std::size_t>(cells * comps));
    get(raw.values.data(), raw.values.size() * 8);
    return raw;
}

VectorField attach_field(const RawField& raw, GridPtr grid) {
    if (raw.dim != grid->dim) throw ContractError("field/grid dimension mismatch");
    for (int k = 0; k < grid->dim; ++k)
        if (raw.dims[static_cast<std::size_t>(k)] != grid->dims[static_cast<std::size_t>(k)])
            throw ContractError("field/grid cell-count mismatch");
    if (std::abs(raw.spacing - grid->spacing) > 1e-12 * grid->spacing ||
        std::abs(raw.epsilon - grid->epsilon) > 1e-12 * grid->epsilon)
        throw ContractError("field/grid scale mismatch");
    VectorField f = make_field(std::move(grid), raw.components);
    f.values = raw.values;
    for (std::int64_t idx = 0; idx < f.grid->cellCount(); ++idx) {
        bool ok = true;
        for (int c = 0; c < f.components; ++c)
            if (std::isnan(f.values[static_cast<std::size_t>(idx * f.components + c)])) ok = false;
        f.defined[static_cast<std::size_t>(idx)] = ok ? 1 : 0;
    }
    return f;
}

void write_field_csv_slice(const VectorField& field, const std::string& path,
                           int sliceAxis, std::int64_t layer) {
    const PerforatedGrid& g = *field.grid;
    std::ofstream out(path);
    if (!out) throw ContractError("cannot open '" + path + "' for writing");
    char line[512];
    out << "x0,x1";
    for (int c = 0; c < field.components; ++c) out << ",v" << c;
    out << ",defined\n";
    auto emit = [&](std::int64_t idx, double a, double b) {
        int n = std::snprintf(line, sizeof line, "%.17g,%.17g", a, b);
        for (int c = 0; c < field.components; ++c)
            n += std::snprintf(line + n, sizeof line - static_cast<std::size_t>(n), ",%.17g",
                               field.values[static_cast<std::size_t>(idx * field.components + c)]);
        std::snprintf(line + n, sizeof line - static_cast<std::size_t>(n), ",%d",
                      field.isDefined(idx) ? 1 : 0);
        out << line << "\n";
    };
    if (g.dim == 2) {
        for (std::int64_t ix = 0; ix < g.dims[0]; ++ix)
            for (std::int64_t iy = 0; iy < g.dims[1]; ++iy) {
                std::int64_t idx = g.index(ix, iy, 0);
                auto x = g.center(idx);
                emit(idx, x[0], x[1]);
            }
        return;
    }
    if (sliceAxis < 0 || sliceAxis > 2 || layer < 0 ||
        layer >= g.dims[static_cast<std::size_t>(sliceAxis)])
        throw ContractError("slice layer outside the grid");
    int a = (sliceAxis == 0) ? 1 : 0;
    int b = (sliceAxis == 2) ? 1 : 2;
    std::array<std::int64_t, 3> c{0, 0, 0};
    c[static_cast<std::size_t>(sliceAxis)] = layer;
    for (std::int64_t ia = 0; ia < g.dims[static_cast<std::size_t>(a)]; ++ia)
        for (std::int64_t ib = 0; ib < g.dims[static_cast<std::size_t>(b)]; ++ib) {
            c[static_cast<std::size_t>(a)] = ia;
            c[static_cast<std::size_t>(b)] = ib;
            std::int64_t idx = g.index(c[0], c[1], c[2]);
            auto x = g.center(idx);
            emit(idx, x[static_cast<std::size_t>(a)], x[static_cast<std::size_t>(b)]);
        }
}

} // namespace mext
