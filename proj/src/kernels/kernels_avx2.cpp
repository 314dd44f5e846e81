// Compiled with -mavx2 only; reached through the dispatcher after a CPUID check.

#include "gal/kernels.hpp"

#include <algorithm>
#include <immintrin.h>

namespace gal::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

WeightedMoments weighted_moments_avx2(const double* a, const double* b, const double* w,
                                      std::size_t n) {
    __m256d ab = _mm256_setzero_pd();
    __m256d aa = _mm256_setzero_pd();
    __m256d bb = _mm256_setzero_pd();

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        const __m256d vw = _mm256_loadu_pd(w + i);
        const __m256d wa = _mm256_mul_pd(vw, va);
        const __m256d wb = _mm256_mul_pd(vw, vb);
        ab = _mm256_add_pd(ab, _mm256_mul_pd(wa, vb));
        aa = _mm256_add_pd(aa, _mm256_mul_pd(wa, va));
        bb = _mm256_add_pd(bb, _mm256_mul_pd(wb, vb));
    }

    WeightedMoments tail = weighted_moments_scalar(a + i, b + i, w + i, n - i);
    return {hsum(ab) + tail.ab, hsum(aa) + tail.aa, hsum(bb) + tail.bb};
}

void ring_contains_avx2(const double* ring_x, const double* ring_y, std::size_t ring_n,
                        const double* px, const double* py, std::size_t n, std::uint8_t* out) {
    const __m256d zero = _mm256_setzero_pd();

    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d x = _mm256_loadu_pd(px + k);
        const __m256d y = _mm256_loadu_pd(py + k);
        __m256d inside = zero;   // lanes toggle between all-zero and all-one bits
        __m256d boundary = zero;

        for (std::size_t i = 0; i + 1 < ring_n; ++i) {
            const double sxi = ring_x[i], syi = ring_y[i];
            const double sxj = ring_x[i + 1], syj = ring_y[i + 1];
            const __m256d xi = _mm256_set1_pd(sxi), yi = _mm256_set1_pd(syi);
            const __m256d yj = _mm256_set1_pd(syj);
            const __m256d dx = _mm256_set1_pd(sxj - sxi);
            const __m256d dy = _mm256_set1_pd(syj - syi);

            const __m256d y_off = _mm256_sub_pd(y, yi);
            const __m256d cross =
                _mm256_sub_pd(_mm256_mul_pd(dx, y_off), _mm256_mul_pd(dy, _mm256_sub_pd(x, xi)));

            __m256d on_edge = _mm256_cmp_pd(cross, zero, _CMP_EQ_OQ);
            on_edge = _mm256_and_pd(
                on_edge, _mm256_cmp_pd(_mm256_set1_pd(std::min(sxi, sxj)), x, _CMP_LE_OQ));
            on_edge = _mm256_and_pd(
                on_edge, _mm256_cmp_pd(x, _mm256_set1_pd(std::max(sxi, sxj)), _CMP_LE_OQ));
            on_edge = _mm256_and_pd(
                on_edge, _mm256_cmp_pd(_mm256_set1_pd(std::min(syi, syj)), y, _CMP_LE_OQ));
            on_edge = _mm256_and_pd(
                on_edge, _mm256_cmp_pd(y, _mm256_set1_pd(std::max(syi, syj)), _CMP_LE_OQ));
            boundary = _mm256_or_pd(boundary, on_edge);

            const __m256d straddles = _mm256_xor_pd(_mm256_cmp_pd(yi, y, _CMP_GT_OQ),
                                                    _mm256_cmp_pd(yj, y, _CMP_GT_OQ));
            if (_mm256_movemask_pd(straddles) == 0) continue;

            const __m256d x_cross = _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(dx, y_off), dy), xi);
            const __m256d left = _mm256_cmp_pd(x, x_cross, _CMP_LT_OQ);
            inside = _mm256_xor_pd(inside, _mm256_and_pd(straddles, left));
        }

        const int mask = _mm256_movemask_pd(_mm256_or_pd(inside, boundary));
        for (int lane = 0; lane < 4; ++lane) out[k + lane] = (mask >> lane) & 1;
    }

    if (k < n) ring_contains_scalar(ring_x, ring_y, ring_n, px + k, py + k, n - k, out + k);
}

} // namespace gal::kernels::detail
