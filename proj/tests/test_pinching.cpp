#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tracegym/errors.hpp"
#include "tracegym/pinching.hpp"
#include "tracegym/rng.hpp"

using namespace tracegym;

TEST_CASE("pinching zeroes the off-diagonal blocks") {
    CounterRng rng(61);
    const DenseTensor h = oracles::pauli_z();
    DenseTensor x = draw_hermitian(Shape::square({2}), rng);
    const DenseTensor px = pinch(h, x);
    CHECK(px[0] == x[0]);
    CHECK(px[3] == x[3]);
    CHECK(std::abs(px[1]) == 0.0);
    CHECK(std::abs(px[2]) == 0.0);

    const DenseTensor id = DenseTensor::identity(Shape::square({2}));
    CHECK(approx_equal(pinch(id, x), x, 0.0));

    CHECK_THROWS_AS(pinch(h, draw_hermitian(Shape::square({3}), rng)), ShapeError);
}

TEST_CASE("pinching matches the eigenbasis and phase-average oracles") {
    CounterRng rng(62);
    for (const Shape& s : {Shape::square({2}), Shape::square({2, 2})}) {
        for (int trial = 0; trial < 10; ++trial) {
            const DenseTensor h = draw_hermitian(s, rng);
            const DenseTensor x = draw_hermitian(s, rng);
            const Eigen::MatrixXcd got = matricize(pinch(h, x));
            const Eigen::MatrixXcd hm = oracles::naive_matricize(h);
            const Eigen::MatrixXcd xm = oracles::naive_matricize(x);
            CHECK(oracles::rel_residual(got, oracles::pinch_oracle(hm, xm)) <= 1e-10);
            CHECK(oracles::rel_residual(got, oracles::pinch_dft_oracle(hm, xm)) <= 1e-10);
        }
    }
}

TEST_CASE("pinching map structural properties") {
    CounterRng rng(63);
    for (int trial = 0; trial < 20; ++trial) {
        const Shape s = (trial % 2) ? Shape::square({2, 2}) : Shape::square({2});
        const DenseTensor h = draw_hermitian(s, rng);
        const DenseTensor x = draw_hermitian(s, rng);
        const DenseTensor xp = draw_positive_definite(s, rng);
        const SpectralDecomposition dec = eig_hermitian(h);
        const DenseTensor px = pinch(dec, x);
        const double scale = frobenius_norm(h) * frobenius_norm(x);

        CHECK(approx_equal(conj_transpose(px), px, 1e-12 * frobenius_norm(x)));
        CHECK(frobenius_norm(einstein_product(px, h) - einstein_product(h, px)) <=
              1e-9 * scale);
        CHECK(std::abs(trace(einstein_product(px, h)) -
                       trace(einstein_product(x, h))) <= 1e-9 * std::max(1.0, scale));
        CHECK(approx_equal(pinch(dec, px), px, 1e-10 * std::max(1.0, frobenius_norm(px))));
        CHECK(std::abs(trace(px) - trace(x)) <=
              1e-10 * std::max(1.0, std::abs(trace(x))));

        const double inv_sp = 1.0 / static_cast<double>(dec.eigenvalues.size());
        CHECK(loewner_geq(pinch(dec, xp), inv_sp * xp, 1e-9));
    }
}

TEST_CASE("integral representation reproduces exact pinching") {
    const DenseTensor h = oracles::pauli_z();
    const DenseTensor x = oracles::pauli_x();
    const DenseTensor via = pinch_via_integral(h, x);
    CHECK(frobenius_norm(via) <= 1e-6);

    CounterRng rng(64);
    const DenseTensor commuting = oracles::diag_tensor({0.4, 1.9});
    CHECK(approx_equal(pinch_via_integral(h, commuting), commuting, 1e-6));

    for (int trial = 0; trial < 6; ++trial) {
        const Shape s = Shape::square({2});
        const DenseTensor hr = draw_hermitian(s, rng);
        const DenseTensor xr = draw_hermitian(s, rng);
        const DenseTensor exact = pinch(hr, xr);
        const DenseTensor approx = pinch_via_integral(hr, xr);
        CHECK(frobenius_norm(approx - exact) <=
              1e-6 * std::max(1.0, frobenius_norm(xr)));
        CHECK(approx_equal(conj_transpose(approx), approx,
                           1e-9 * std::max(1.0, frobenius_norm(xr))));
    }
}

TEST_CASE("integral representation guards") {
    CounterRng rng(65);
    const Shape s = Shape::square({2});
    const DenseTensor x = draw_hermitian(s, rng);
    CHECK_THROWS_AS(pinch_via_integral(DenseTensor::identity(s), x),
                    DegenerateSpectrumError);
    PinchIntegralOptions tiny;
    tiny.max_nodes = 16;
    CHECK_THROWS_AS(pinch_via_integral(oracles::pauli_z(), x, tiny), ConvergenceError);
}

TEST_CASE("pinching kernel wraps the fejer family") {
    const PinchingKernel k{2.0};
    CHECK(k(0.0) == mu_delta_density(2.0, 0.0));
    CHECK(k.transform(0.0) == 1.0);
    CHECK(k.transform(2.0) == 0.0);
    CHECK(k.transform(5.0) == 0.0);
}
