#include "mext/numeric.hpp"

#include <cstdio>

namespace mext {

double pairwise_sum(const double* x, std::size_t n) {
    // Blocks of 8 are summed directly; larger ranges split in half. The split
    // point depends only on n, so the reduction tree is input-independent.
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double pairwise_sum(const std::vector<double>& x) {
    return pairwise_sum(x.data(), x.size());
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::string format_or_na(double v) {
    return std::isnan(v) ? std::string("NA") : format_g17(v);
}

double halton(std::uint64_t index, std::uint32_t base) {
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

} // namespace mext
