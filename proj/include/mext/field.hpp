#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mext/numeric.hpp"
#include "mext/perforation.hpp"

namespace mext {

// Cell-sampled vector field over a perforated grid. Values of undefined
// cells are kept at NaN so stray reads surface immediately.
struct VectorField {
    GridPtr grid;
    int components = 0;
    std::vector<double> values;        // cellCount * components
    std::vector<std::uint8_t> defined; // one flag per cell

    Vec value(std::int64_t idx) const {
        Vec v(components);
        const double* src = values.data() + idx * components;
        for (int i = 0; i < components; ++i) v[i] = src[i];
        return v;
    }
    void setValue(std::int64_t idx, const Vec& v) {
        double* dst = values.data() + idx * components;
        for (int i = 0; i < components; ++i) dst[i] = v[i];
        defined[static_cast<std::size_t>(idx)] = 1;
    }
    bool isDefined(std::int64_t idx) const { return defined[static_cast<std::size_t>(idx)] != 0; }
};

VectorField make_field(GridPtr grid, int components);

// Flat little-endian layout: int32 dim, int32 components, int64 dims[dim],
// float64 spacing, float64 epsilon, float64 values[cellCount*components]
// (cells row-major, last axis fastest; undefined cells hold NaN).
void write_field(const VectorField& field, const std::string& path);

struct RawField {
    int dim = 0;
    int components = 0;
    std::vector<std::int64_t> dims;
    double spacing = 0.0;
    double epsilon = 0.0;
    std::vector<double> values;
};

RawField read_field(const std::string& path);

// Attach raw data to a grid built from the matching descriptor; cells with
// any NaN component stay undefined.
VectorField attach_field(const RawField& raw, GridPtr grid);

// CSV slice for plotting: 2-d fields dump whole; 3-d fields fix one axis at
// the given layer. Columns: cell coordinates then components then defined.
void write_field_csv_slice(const VectorField& field, const std::string& path,
                           int sliceAxis = 2, std::int64_t layer = 0);

} // namespace mext
