#include "mext/norms.hpp"

#include <cmath>

#include "mext/errors.hpp"

namespace mext {

namespace {

bool in_region(CellLabel label, NormRegion region) {
    switch (region) {
        case NormRegion::All: return label != CellLabel::Outside;
        case NormRegion::Solid: return label == CellLabel::Solid;
        case NormRegion::Hole: return label == CellLabel::Hole;
    }
    return false;
}

void check_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw ContractError("integrability exponent p must lie in (1, inf)");
}

} // namespace

double lp_norm(const VectorField& field, double p, NormRegion region) {
    check_p(p);
    const PerforatedGrid& g = *field.grid;
    const double vol = g.cellVolume();
    const int l = field.components;
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(g.cellCount()));
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        if (!field.isDefined(idx)) continue;
        if (!in_region(g.mask[static_cast<std::size_t>(idx)], region)) continue;
        const double* v = field.values.data() + idx * l;
        double m2 = 0.0;
        for (int c = 0; c < l; ++c) m2 += v[c] * v[c];
        terms.push_back((p == 2.0 ? m2 : std::pow(m2, p / 2.0)) * vol);
    }
    if (terms.empty()) throw EmptyRegion("no defined cells in the requested norm region");
    return std::pow(pairwise_sum(terms), 1.0 / p);
}

double w1p_seminorm(const VectorField& field, double p, NormRegion region) {
    check_p(p);
    const PerforatedGrid& g = *field.grid;
    const double vol = g.cellVolume();
    const double invH = 1.0 / g.spacing;
    const int l = field.components;
    const std::int64_t strides[3] = {g.dims[1] * g.dims[2], g.dims[2], 1};
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(g.cellCount()));
    bool any = false;
    for (std::int64_t idx = 0; idx < g.cellCount(); ++idx) {
        CellLabel label = g.mask[static_cast<std::size_t>(idx)];
        if (!in_region(label, region) || !field.isDefined(idx)) continue;
        any = true;
        auto c = g.unpack(idx);
        const double* v = field.values.data() + idx * l;
        double g2 = 0.0;
        for (int k = 0; k < g.dim; ++k) {
            if (c[static_cast<std::size_t>(k)] + 1 >= g.dims[static_cast<std::size_t>(k)]) continue;
            std::int64_t nb = idx + strides[k];
            if (g.mask[static_cast<std::size_t>(nb)] != label || !field.isDefined(nb)) continue;
            const double* w = field.values.data() + nb * l;
            for (int comp = 0; comp < l; ++comp) {
                double d = (w[comp] - v[comp]) * invH;
                g2 += d * d;
            }
        }
        terms.push_back((p == 2.0 ? g2 : std::pow(g2, p / 2.0)) * vol);
    }
    if (!any) throw EmptyRegion("no defined cells in the requested seminorm region");
    return std::pow(pairwise_sum(terms), 1.0 / p);
}

} // namespace mext
