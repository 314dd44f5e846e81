#include "gal/kernels.hpp"

#include "gal/error.hpp"

#include <cstdlib>
#include <string>

namespace gal::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(GAL_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable& choose() {
    if (const char* forced = std::getenv("GAL_SIMD"); forced && std::string(forced) == "scalar")
        return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar", &detail::weighted_moments_scalar,
                                   &detail::ring_contains_scalar};
    return table;
}

const KernelTable* avx2_table() {
#if defined(GAL_HAVE_AVX2_KERNELS)
    static const KernelTable table{"avx2", &detail::weighted_moments_avx2,
                                   &detail::ring_contains_avx2};
    return cpu_has_avx2() ? &table : nullptr;
#else
    return nullptr;
#endif
}

std::vector<const KernelTable*> available_tables() {
    std::vector<const KernelTable*> out{&scalar_table()};
    if (const KernelTable* t = avx2_table()) out.push_back(t);
    return out;
}

const KernelTable& active() {
    static const KernelTable& table = choose();
    return table;
}

WeightedMoments weighted_moments(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> w) {
    require(a.size() == b.size() && a.size() == w.size(), "weighted_moments: length mismatch");
    return active().weighted_moments(a.data(), b.data(), w.data(), a.size());
}

void ring_contains(std::span<const double> ring_x, std::span<const double> ring_y,
                   std::span<const double> px, std::span<const double> py,
                   std::span<std::uint8_t> out) {
    require(ring_x.size() == ring_y.size(), "ring_contains: ring coordinate length mismatch");
    require(px.size() == py.size() && px.size() == out.size(),
            "ring_contains: point buffer length mismatch");
    active().ring_contains(ring_x.data(), ring_y.data(), ring_x.size(), px.data(), py.data(),
                           px.size(), out.data());
}

} // namespace gal::kernels
