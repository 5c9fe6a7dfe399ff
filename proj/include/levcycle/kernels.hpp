#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace levcycle::kernels {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
    // acc[i] = (1 - weight) * acc[i] + weight * x[i]
    void (*ema)(double* acc, const double* x, std::size_t n, double weight);
    // m = weight * d d^T + (1 - weight) * m, m dense n x n
    void (*ewma_outer)(double* m, const double* d, std::size_t n, double weight);
    double (*quad_form)(const double* w, const double* m, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sums of (x - shift) and (x - shift)^2
    void (*moments)(const double* x, std::size_t n, double shift, double* sum, double* sumsq);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();
const KernelTable* neon_table();

bool isa_available(Isa isa);
const KernelTable& table_for(Isa isa);
Isa active_isa();
const KernelTable& active();
std::string_view isa_name(Isa isa);

void ema_update(std::span<double> acc, std::span<const double> x, double weight);
void ewma_outer_update(std::span<double> m, std::span<const double> d, double weight);
double quad_form(std::span<const double> w, std::span<const double> m);
double dot(std::span<const double> a, std::span<const double> b);
void moments(std::span<const double> x, double shift, double& sum, double& sumsq);

}  // namespace levcycle::kernels
