#include "levcycle/kernels.hpp"
#include "levcycle/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace levcycle;
using namespace levcycle::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

std::vector<Isa> vector_isas() {
    std::vector<Isa> out;
    for (Isa i : {Isa::avx2, Isa::neon})
        if (isa_available(i)) out.push_back(i);
    return out;
}

}  // namespace

TEST_CASE("scalar kernels on small inputs") {
    const KernelTable& k = scalar_table();
    double acc[3] = {1.0, 2.0, 3.0};
    const double x[3] = {3.0, 2.0, 1.0};
    k.ema(acc, x, 3, 0.5);
    CHECK(acc[0] == 2.0);
    CHECK(acc[1] == 2.0);
    CHECK(acc[2] == 2.0);

    double m[4] = {1.0, 0.0, 0.0, 1.0};
    const double d[2] = {1.0, 2.0};
    k.ewma_outer(m, d, 2, 1.0);
    CHECK(m[0] == 1.0);
    CHECK(m[1] == 2.0);
    CHECK(m[2] == 2.0);
    CHECK(m[3] == 4.0);
    CHECK(k.quad_form(d, m, 2) == doctest::Approx(25.0));
    CHECK(k.dot(d, d, 2) == 5.0);

    double s = 0.0, q = 0.0;
    const double y[4] = {1.0, 2.0, 3.0, 4.0};
    k.moments(y, 4, 2.5, &s, &q);
    CHECK(s == 0.0);
    CHECK(q == 5.0);
}

TEST_CASE("vector kernels match the scalar reference") {
    const auto isas = vector_isas();
    if (isas.empty()) {
        MESSAGE("no vector kernel set on this host");
        return;
    }
    Rng rng(11);
    const KernelTable& ref = scalar_table();
    for (Isa isa : isas) {
        const KernelTable& vk = table_for(isa);
        for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 1001u}) {
            CAPTURE(n);
            const auto x = random_vec(rng, n);
            auto a1 = random_vec(rng, n);
            auto a2 = a1;
            ref.ema(a1.data(), x.data(), n, 0.13);
            vk.ema(a2.data(), x.data(), n, 0.13);
            CHECK(a1 == a2);

            if (n <= 64) {
                auto m1 = random_vec(rng, n * n);
                auto m2 = m1;
                ref.ewma_outer(m1.data(), x.data(), n, 0.07);
                vk.ewma_outer(m2.data(), x.data(), n, 0.07);
                CHECK(m1 == m2);
                const double q1 = ref.quad_form(x.data(), m1.data(), n);
                const double q2 = vk.quad_form(x.data(), m1.data(), n);
                double scale = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) scale += std::abs(x[i] * m1[i * n + j] * x[j]);
                CHECK(std::abs(q1 - q2) <= 1e-14 * scale);
            }

            const double d1 = ref.dot(x.data(), a1.data(), n);
            const double d2 = vk.dot(x.data(), a1.data(), n);
            double scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * a1[i]);
            CHECK(std::abs(d1 - d2) <= 1e-14 * scale);

            double s1, q1, s2, q2;
            ref.moments(x.data(), n, 0.3, &s1, &q1);
            vk.moments(x.data(), n, 0.3, &s2, &q2);
            CHECK(std::abs(q1 - q2) <= 1e-14 * q1);
            double sa = 0.0;
            for (double v : x) sa += std::abs(v - 0.3);
            CHECK(std::abs(s1 - s2) <= 1e-14 * sa);
        }
    }
}

TEST_CASE("dispatch reports a usable kernel set") {
    CHECK(isa_available(Isa::scalar));
    CHECK(isa_available(active_isa()));
    const std::vector<double> a{1.0, 2.0, 3.0};
    CHECK(dot(a, a) == 14.0);
    std::vector<double> acc{0.0, 0.0};
    CHECK_THROWS_AS(ema_update(acc, a, 0.5), std::invalid_argument);
}
