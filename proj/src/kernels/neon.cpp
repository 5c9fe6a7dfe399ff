#include "levcycle/kernels.hpp"

#include <arm_neon.h>

namespace levcycle::kernels {
namespace {

void ema_neon(double* acc, const double* x, std::size_t n, double weight) {
    const double keep = 1.0 - weight;
    const float64x2_t vk = vdupq_n_f64(keep);
    const float64x2_t vw = vdupq_n_f64(weight);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t a = vmulq_f64(vk, vld1q_f64(acc + i));
        const float64x2_t b = vmulq_f64(vw, vld1q_f64(x + i));
        vst1q_f64(acc + i, vaddq_f64(a, b));
    }
    for (; i < n; ++i) acc[i] = keep * acc[i] + weight * x[i];
}

void ewma_outer_neon(double* m, const double* d, std::size_t n, double weight) {
    const double keep = 1.0 - weight;
    const float64x2_t vk = vdupq_n_f64(keep);
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = weight * d[i];
        const float64x2_t vwi = vdupq_n_f64(wi);
        double* row = m + i * n;
        std::size_t j = 0;
        for (; j + 2 <= n; j += 2) {
            const float64x2_t a = vmulq_f64(vwi, vld1q_f64(d + j));
            const float64x2_t b = vmulq_f64(vk, vld1q_f64(row + j));
            vst1q_f64(row + j, vaddq_f64(a, b));
        }
        for (; j < n; ++j) row[j] = wi * d[j] + keep * row[j];
    }
}

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double quad_form_neon(const double* w, const double* m, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * dot_neon(m + i * n, w, n);
    return s;
}

void moments_neon(const double* x, std::size_t n, double shift, double* sum, double* sumsq) {
    const float64x2_t vs = vdupq_n_f64(shift);
    float64x2_t s = vdupq_n_f64(0.0);
    float64x2_t q = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vs);
        s = vaddq_f64(s, d);
        q = vaddq_f64(q, vmulq_f64(d, d));
    }
    double ss = vgetq_lane_f64(s, 0) + vgetq_lane_f64(s, 1);
    double qq = vgetq_lane_f64(q, 0) + vgetq_lane_f64(q, 1);
    for (; i < n; ++i) {
        const double d = x[i] - shift;
        ss += d;
        qq += d * d;
    }
    *sum = ss;
    *sumsq = qq;
}

constexpr KernelTable kNeon{ema_neon, ewma_outer_neon, quad_form_neon, dot_neon, moments_neon};

}  // namespace

const KernelTable* neon_table() { return &kNeon; }

}  // namespace levcycle::kernels
