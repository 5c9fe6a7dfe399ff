#include "levcycle/kernels.hpp"

#include <immintrin.h>

namespace levcycle::kernels {
namespace {

void ema_avx2(double* acc, const double* x, std::size_t n, double weight) {
    const double keep = 1.0 - weight;
    const __m256d vk = _mm256_set1_pd(keep);
    const __m256d vw = _mm256_set1_pd(weight);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_mul_pd(vk, _mm256_loadu_pd(acc + i));
        const __m256d b = _mm256_mul_pd(vw, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(acc + i, _mm256_add_pd(a, b));
    }
    for (; i < n; ++i) acc[i] = keep * acc[i] + weight * x[i];
}

void ewma_outer_avx2(double* m, const double* d, std::size_t n, double weight) {
    const double keep = 1.0 - weight;
    const __m256d vk = _mm256_set1_pd(keep);
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = weight * d[i];
        const __m256d vwi = _mm256_set1_pd(wi);
        double* row = m + i * n;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const __m256d a = _mm256_mul_pd(vwi, _mm256_loadu_pd(d + j));
            const __m256d b = _mm256_mul_pd(vk, _mm256_loadu_pd(row + j));
            _mm256_storeu_pd(row + j, _mm256_add_pd(a, b));
        }
        for (; j < n; ++j) row[j] = wi * d[j] + keep * row[j];
    }
}

double hsum(__m256d v) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double quad_form_avx2(const double* w, const double* m, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * dot_avx2(m + i * n, w, n);
    return s;
}

void moments_avx2(const double* x, std::size_t n, double shift, double* sum, double* sumsq) {
    const __m256d vs = _mm256_set1_pd(shift);
    __m256d s = _mm256_setzero_pd();
    __m256d q = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vs);
        s = _mm256_add_pd(s, d);
        q = _mm256_add_pd(q, _mm256_mul_pd(d, d));
    }
    double ss = hsum(s), qq = hsum(q);
    for (; i < n; ++i) {
        const double d = x[i] - shift;
        ss += d;
        qq += d * d;
    }
    *sum = ss;
    *sumsq = qq;
}

constexpr KernelTable kAvx2{ema_avx2, ewma_outer_avx2, quad_form_avx2, dot_avx2, moments_avx2};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

}  // namespace levcycle::kernels
