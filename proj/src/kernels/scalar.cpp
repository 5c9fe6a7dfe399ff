#include "levcycle/kernels.hpp"

namespace levcycle::kernels {
namespace {

void ema_scalar(double* acc, const double* x, std::size_t n, double weight) {
    const double keep = 1.0 - weight;
    for (std::size_t i = 0; i < n; ++i) acc[i] = keep * acc[i] + weight * x[i];
}

void ewma_outer_scalar(double* m, const double* d, std::size_t n, double weight) {
    const double keep = 1.0 - weight;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = weight * d[i];
        double* row = m + i * n;
        for (std::size_t j = 0; j < n; ++j) row[j] = wi * d[j] + keep * row[j];
    }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double quad_form_scalar(const double* w, const double* m, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * dot_scalar(m + i * n, w, n);
    return s;
}

void moments_scalar(const double* x, std::size_t n, double shift, double* sum, double* sumsq) {
    double s = 0.0, q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - shift;
        s += d;
        q += d * d;
    }
    *sum = s;
    *sumsq = q;
}

constexpr KernelTable kScalar{ema_scalar, ewma_outer_scalar, quad_form_scalar, dot_scalar,
                              moments_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace levcycle::kernels
