#include "levcycle/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace levcycle::kernels {

#ifndef LEVCYCLE_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif
#ifndef LEVCYCLE_HAVE_NEON
const KernelTable* neon_table() { return nullptr; }
#endif

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(LEVCYCLE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::neon:
            return neon_table() != nullptr;
    }
    return false;
}

const KernelTable& table_for(Isa isa) {
    if (!isa_available(isa))
        throw std::runtime_error("kernel set not available: " + std::string(isa_name(isa)));
    switch (isa) {
        case Isa::avx2:
            return *avx2_table();
        case Isa::neon:
            return *neon_table();
        case Isa::scalar:
            break;
    }
    return scalar_table();
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
        case Isa::neon:
            return "neon";
    }
    return "unknown";
}

namespace {

Isa select_isa() {
    if (const char* env = std::getenv("LEVCYCLE_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return Isa::scalar;
        if (want == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
        if (want == "neon" && isa_available(Isa::neon)) return Isa::neon;
    }
    if (isa_available(Isa::avx2)) return Isa::avx2;
    if (isa_available(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

}  // namespace

Isa active_isa() {
    static const Isa isa = select_isa();
    return isa;
}

const KernelTable& active() {
    static const KernelTable& table = table_for(active_isa());
    return table;
}

void ema_update(std::span<double> acc, std::span<const double> x, double weight) {
    if (acc.size() != x.size()) throw std::invalid_argument("ema_update: size mismatch");
    active().ema(acc.data(), x.data(), acc.size(), weight);
}

void ewma_outer_update(std::span<double> m, std::span<const double> d, double weight) {
    if (m.size() != d.size() * d.size())
        throw std::invalid_argument("ewma_outer_update: size mismatch");
    active().ewma_outer(m.data(), d.data(), d.size(), weight);
}

double quad_form(std::span<const double> w, std::span<const double> m) {
    if (m.size() != w.size() * w.size()) throw std::invalid_argument("quad_form: size mismatch");
    return active().quad_form(w.data(), m.data(), w.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    return active().dot(a.data(), b.data(), a.size());
}

void moments(std::span<const double> x, double shift, double& sum, double& sumsq) {
    active().moments(x.data(), x.size(), shift, &sum, &sumsq);
}

}  // namespace levcycle::kernels
