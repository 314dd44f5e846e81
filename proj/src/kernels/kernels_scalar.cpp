#include "gal/kernels.hpp"

#include <algorithm>

namespace gal::kernels::detail {

WeightedMoments weighted_moments_scalar(const double* a, const double* b, const double* w,
                                        std::size_t n) {
    WeightedMoments m;
    for (std::size_t i = 0; i < n; ++i) {
        const double wa = w[i] * a[i];
        const double wb = w[i] * b[i];
        m.ab += wa * b[i];
        m.aa += wa * a[i];
        m.bb += wb * b[i];
    }
    return m;
}

void ring_contains_scalar(const double* ring_x, const double* ring_y, std::size_t ring_n,
                          const double* px, const double* py, std::size_t n, std::uint8_t* out) {
    for (std::size_t k = 0; k < n; ++k) {
        const double x = px[k];
        const double y = py[k];
        bool inside = false;
        bool boundary = false;
        for (std::size_t i = 0; i + 1 < ring_n; ++i) {
            const double xi = ring_x[i], yi = ring_y[i];
            const double xj = ring_x[i + 1], yj = ring_y[i + 1];

            const double cross = (xj - xi) * (y - yi) - (yj - yi) * (x - xi);
            if (cross == 0.0 && std::min(xi, xj) <= x && x <= std::max(xi, xj) &&
                std::min(yi, yj) <= y && y <= std::max(yi, yj))
                boundary = true;

            if ((yi > y) != (yj > y)) {
                const double x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi;
                if (x < x_cross) inside = !inside;
            }
        }
        out[k] = (inside || boundary) ? 1 : 0;
    }
}

} // namespace gal::kernels::detail
