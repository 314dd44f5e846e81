#pragma once

// Data-parallel inner loops used by the spatial and retrieval layers.
//
// Every kernel has a scalar reference implementation; vectorized variants
// must agree with it (bit-exactly for ring containment, to rounding for the
// reductions). The active table is picked once from the CPU's capabilities.
// Set GAL_SIMD=scalar in the environment to force the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gal::kernels {

struct WeightedMoments {
    double ab = 0.0; // sum w*a*b
    double aa = 0.0; // sum w*a*a
    double bb = 0.0; // sum w*b*b
};

using WeightedMomentsFn = WeightedMoments (*)(const double* a, const double* b, const double* w,
                                              std::size_t n);

// Even-odd containment of n query points against a closed ring
// (ring_x[0] == ring_x[ring_n-1]). Points on an edge or vertex are inside.
// out[i] is 1 for inside, 0 for outside.
using RingContainsFn = void (*)(const double* ring_x, const double* ring_y, std::size_t ring_n,
                                const double* px, const double* py, std::size_t n,
                                std::uint8_t* out);

struct KernelTable {
    std::string_view name;
    WeightedMomentsFn weighted_moments;
    RingContainsFn ring_contains;
};

const KernelTable& scalar_table();

// nullptr when the build has no AVX2 variant or the CPU lacks AVX2.
const KernelTable* avx2_table();

// Every table usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

const KernelTable& active();

// Convenience wrappers over active().
WeightedMoments weighted_moments(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> w);

void ring_contains(std::span<const double> ring_x, std::span<const double> ring_y,
                   std::span<const double> px, std::span<const double> py,
                   std::span<std::uint8_t> out);

namespace detail {
WeightedMoments weighted_moments_scalar(const double* a, const double* b, const double* w,
                                        std::size_t n);
void ring_contains_scalar(const double* ring_x, const double* ring_y, std::size_t ring_n,
                          const double* px, const double* py, std::size_t n, std::uint8_t* out);
#if defined(GAL_HAVE_AVX2_KERNELS)
WeightedMoments weighted_moments_avx2(const double* a, const double* b, const double* w,
                                      std::size_t n);
void ring_contains_avx2(const double* ring_x, const double* ring_y, std::size_t ring_n,
                        const double* px, const double* py, std::size_t n, std::uint8_t* out);
#endif
} // namespace detail

} // namespace gal::kernels
