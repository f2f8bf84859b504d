#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tracegym/errors.hpp"
#include "tracegym/rng.hpp"
#include "tracegym/spectral.hpp"

using namespace tracegym;

TEST_CASE("eigendecomposition clusters and reconstructs") {
    const DenseTensor d = oracles::diag_tensor({1, 1, 3});
    const SpectralDecomposition dec = eig_hermitian(d);
    REQUIRE(dec.eigenvalues.size() == 2);
    CHECK(dec.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dec.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(trace(dec.projectors[0]).real() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(trace(dec.projectors[1]).real() == doctest::Approx(1.0).epsilon(1e-12));

    const SpectralDecomposition px = eig_hermitian(oracles::pauli_x());
    REQUIRE(px.eigenvalues.size() == 2);
    CHECK(px.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(px.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decomposition invariants on random hermitian tensors") {
    CounterRng rng(31);
    const Shape s = Shape::square({2, 2});
    for (int trial = 0; trial < 15; ++trial) {
        const DenseTensor h = draw_hermitian(s, rng);
        const SpectralDecomposition dec = eig_hermitian(h);
        const DenseTensor id = DenseTensor::identity(s);

        DenseTensor completeness = DenseTensor::zero(s);
        DenseTensor recon = DenseTensor::zero(s);
        for (std::size_t j = 0; j < dec.projectors.size(); ++j) {
            completeness = completeness + dec.projectors[j];
            recon = recon + dec.eigenvalues[j] * dec.projectors[j];
        }
        CHECK(frobenius_norm(completeness - id) <= 1e-10);
        CHECK(frobenius_norm(recon - h) <= 1e-9 * std::max(1.0, frobenius_norm(h)));

        for (std::size_t j = 0; j < dec.projectors.size(); ++j) {
            for (std::size_t k = 0; k < dec.projectors.size(); ++k) {
                const DenseTensor prod =
                    einstein_product(dec.projectors[j], dec.projectors[k]);
                const DenseTensor want =
                    (j == k) ? dec.projectors[j] : DenseTensor::zero(s);
                CHECK(frobenius_norm(prod - want) <= 1e-10);
            }
            if (j > 0) {
                CHECK(dec.eigenvalues[j] - dec.eigenvalues[j - 1] > dec.cluster_tol);
            }
        }
    }
}

TEST_CASE("hermitianity gate symmetrizes small noise and rejects large") {
    CounterRng rng(32);
    const Shape s = Shape::square({2});
    DenseTensor h = draw_hermitian(s, rng);
    const double scale = frobenius_norm(h);
    h[1] += cplx(0, 1e-12 * scale);
    CHECK_NOTHROW(eig_hermitian(h));
    h[1] += cplx(0.3 * scale, 0);
    CHECK_THROWS_AS(eig_hermitian(h), HermitianityError);
    CHECK_THROWS_AS(eig_hermitian(draw_ginibre(Shape({2}, {3}), rng)), ShapeError);
}

TEST_CASE("tensor exponential") {
    const Shape s = Shape::square({2, 2});
    CHECK(approx_equal(tensor_exp(DenseTensor::zero(s)), DenseTensor::identity(s),
                       1e-14));
    CHECK(approx_equal(tensor_exp(oracles::diag_tensor({0.0, std::log(2.0)})),
                       oracles::diag_tensor({1.0, 2.0}), 1e-14));

    CounterRng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        DenseTensor h = draw_hermitian(s, rng);
        h = (0.8 / std::max(1.0, frobenius_norm(h))) * h;
        const Eigen::MatrixXcd want = oracles::series_exp(oracles::naive_matricize(h));
        CHECK(oracles::rel_residual(matricize(tensor_exp(h)), want) <= 1e-10);

        const auto lam = oracles::eigenvalues_hermitian(matricize(tensor_exp(h)));
        for (double l : lam) CHECK(l > 0.0);
    }
}

TEST_CASE("tensor logarithm inverts exp and guards its domain") {
    CounterRng rng(34);
    const Shape s = Shape::square({2, 2});
    for (int trial = 0; trial < 10; ++trial) {
        const DenseTensor h = draw_hermitian(s, rng);
        CHECK(frobenius_norm(tensor_log(tensor_exp(h)) - h) <=
              1e-8 * std::max(1.0, frobenius_norm(h)));
    }
    CHECK_THROWS_AS(tensor_log(oracles::pauli_z()), DomainError);
    CHECK_THROWS_AS(tensor_log(oracles::diag_tensor({0.0, 1.0})), DomainError);
}

TEST_CASE("real powers") {
    CHECK(approx_equal(tensor_pow(oracles::diag_tensor({4.0}), 0.5),
                       oracles::diag_tensor({2.0}), 1e-14));
    CounterRng rng(35);
    const Shape s = Shape::square({2});
    const DenseTensor a = draw_positive_definite(s, rng);
    CHECK(approx_equal(tensor_pow(a, 1.0), a, 1e-13));
    CHECK(frobenius_norm(einstein_product(tensor_pow(a, -1.0), a) -
                         DenseTensor::identity(s)) <= 1e-10);
    const Eigen::MatrixXcd want = oracles::mat_pow(oracles::naive_matricize(a), 0.37);
    CHECK(oracles::rel_residual(matricize(tensor_pow(a, 0.37)), want) <= 1e-9);
    CHECK_THROWS_AS(tensor_pow(oracles::diag_tensor({0.0, 1.0}), -1.0), DomainError);
}

TEST_CASE("complex powers are unitary phases at pure imaginary exponents") {
    CounterRng rng(36);
    const Shape s = Shape::square({2, 2});
    const DenseTensor a = draw_positive_definite(s, rng);
    CHECK(approx_equal(complex_power(a, cplx(1, 0)), a, 1e-12 * frobenius_norm(a)));

    for (double sv : {0.5, 2.0}) {
        const DenseTensor phase = complex_power(a, cplx(0, sv));
        for (double sigma : oracles::singular_values(matricize(phase))) {
            CHECK(sigma == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK(schatten_norm(phase, schatten_inf) == doctest::Approx(1.0).epsilon(1e-12));
    }

    const Eigen::MatrixXcd want =
        oracles::mat_cpow(oracles::naive_matricize(a), cplx(0.5, 1.5));
    CHECK(oracles::rel_residual(matricize(complex_power(a, cplx(0.5, 1.5))), want) <=
          1e-9);

    const DenseTensor singular = oracles::diag_tensor({0.0, 1.0});
    CHECK_THROWS_AS(complex_power(singular, cplx(-1, 0)), DomainError);
    CHECK_THROWS_AS(complex_power(singular, cplx(0, 1)), DomainError);
    const DenseTensor rooted = complex_power(singular, cplx(0.5, 0));
    CHECK(approx_equal(rooted, singular, 1e-14));
}

TEST_CASE("schatten norms") {
    CHECK(schatten_norm(DenseTensor::identity(Shape::square({2})), 1.0) ==
          doctest::Approx(2.0).epsilon(1e-14));
    CounterRng rng(37);
    const Shape s = Shape::square({2, 2});
    const DenseTensor x = draw_ginibre(s, rng);
    CHECK(schatten_norm(x, 2.0) == doctest::Approx(frobenius_norm(x)).epsilon(1e-12));
    for (double p : {0.5, 1.0, 3.0}) {
        CHECK(schatten_norm(x, p) ==
              doctest::Approx(oracles::schatten_oracle(oracles::naive_matricize(x), p))
                  .epsilon(1e-10));
    }
    CHECK(schatten_norm(x, schatten_inf) ==
          doctest::Approx(oracles::singular_values(matricize(x)).front())
              .epsilon(1e-12));
    CHECK_THROWS_AS(schatten_norm(x, 0.0), DomainError);
    CHECK_THROWS_AS(schatten_norm(x, -1.0), DomainError);

    for (int trial = 0; trial < 10; ++trial) {
        const DenseTensor a = draw_positive_definite(s, rng);
        const DenseTensor b = draw_positive_definite(s, rng);
        const double p = 0.5;
        const double lhs = std::pow(schatten_norm(a + b, p), p);
        const double rhs = std::pow(schatten_norm(a, p), p) + std::pow(schatten_norm(b, p), p);
        CHECK(lhs <= rhs + 1e-10 * rhs);

        const DenseTensor u = draw_unitary(s, rng);
        const DenseTensor v = draw_unitary(s, rng);
        const double base = schatten_norm(a, 1.5);
        const double rotated =
            schatten_norm(einstein_product(u, einstein_product(a, v)), 1.5);
        CHECK(std::abs(rotated - base) <= 1e-10 * base);
    }
}

TEST_CASE("absolute value recovers singular values") {
    CHECK(approx_equal(abs_tensor(oracles::diag_tensor({-3.0})),
                       oracles::diag_tensor({3.0}), 1e-14));
    CounterRng rng(38);
    const Shape s = Shape::square({2, 2});
    const DenseTensor u = draw_unitary(s, rng);
    CHECK(frobenius_norm(abs_tensor(u) - DenseTensor::identity(s)) <= 1e-12);

    const DenseTensor x = draw_ginibre(s, rng);
    auto lam = oracles::eigenvalues_hermitian(matricize(abs_tensor(x)));
    auto sv = oracles::singular_values(oracles::naive_matricize(x));
    std::sort(lam.rbegin(), lam.rend());
    REQUIRE(lam.size() == sv.size());
    for (std::size_t i = 0; i < sv.size(); ++i) {
        CHECK(lam[i] == doctest::Approx(sv[i]).epsilon(1e-10));
    }
    CHECK(schatten_norm(abs_tensor(x), 1.7) ==
          doctest::Approx(schatten_norm(x, 1.7)).epsilon(1e-10));
}

TEST_CASE("loewner order") {
    const DenseTensor a = oracles::diag_tensor({2, 2});
    const DenseTensor b = oracles::diag_tensor({1, 3});
    CHECK(loewner_geq(a, a));
    CHECK_FALSE(loewner_geq(a, b));
    CHECK(loewner_geq(oracles::diag_tensor({2, 4}), oracles::diag_tensor({1, 3})));
    CHECK_THROWS_AS(loewner_geq(a, oracles::diag_tensor({1, 2, 3})), ShapeError);
}

TEST_CASE("spectral gap") {
    CHECK(spectral_gap(eig_hermitian(oracles::diag_tensor({1, 1, 3}))) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(spectral_gap(eig_hermitian(oracles::diag_tensor({0, 0.5, 0.6}))) ==
          doctest::Approx(0.1).epsilon(1e-9));
    CHECK_THROWS_AS(
        spectral_gap(eig_hermitian(DenseTensor::identity(Shape::square({2})))),
        DegenerateSpectrumError);

    CounterRng rng(39);
    for (int trial = 0; trial < 10; ++trial) {
        const SpectralDecomposition dec =
            eig_hermitian(draw_hermitian(Shape::square({2, 2}), rng));
        if (dec.eigenvalues.size() < 2) continue;
        double want = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < dec.eigenvalues.size(); ++j) {
            for (std::size_t k = j + 1; k < dec.eigenvalues.size(); ++k) {
                want = std::min(want, std::abs(dec.eigenvalues[j] - dec.eigenvalues[k]));
            }
        }
        CHECK(spectral_gap(dec) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("eigenvalue counts under kronecker powers grow polynomially") {
    const auto rows = eigcount_growth(oracles::diag_tensor({1, 2}), 4);
    REQUIRE(rows.size() == 4);
    for (int m = 1; m <= 4; ++m) {
        CHECK(rows[static_cast<std::size_t>(m - 1)].m == m);
        CHECK(rows[static_cast<std::size_t>(m - 1)].count == m + 1);
        CHECK(rows[static_cast<std::size_t>(m - 1)].bound == m + 1);
        CHECK(rows[static_cast<std::size_t>(m - 1)].count ==
              oracles::distinct_product_count({1, 2}, m));
    }

    const auto id_rows = eigcount_growth(DenseTensor::identity(Shape::square({2, 2})), 3);
    for (const auto& row : id_rows) {
        CHECK(row.count == 1);
        CHECK(row.bound == 1);
    }

    const auto r124 = eigcount_growth(oracles::diag_tensor({1, 2, 4}), 2);
    REQUIRE(r124.size() == 2);
    CHECK(r124[1].count == 5);
    CHECK(r124[1].count == oracles::distinct_product_count({1, 2, 4}, 2));
    CHECK(r124[1].bound == 6);
    CHECK(r124[1].bound == oracles::binomial(2 + 3 - 1, 3 - 1));
    CHECK(r124[1].count <= r124[1].bound);

    CHECK_THROWS_AS(eigcount_growth(oracles::pauli_z(), 13), ResourceError);
    CHECK_THROWS_AS(eigcount_growth(oracles::pauli_z(), 0), DomainError);
}

TEST_CASE("functional calculus agrees with dense matrix-function oracles") {
    CounterRng rng(40);
    for (const Shape& s : {Shape::square({2, 2}), Shape::square({3})}) {
        for (int trial = 0; trial < 5; ++trial) {
            const DenseTensor h = draw_hermitian(s, rng);
            CHECK(oracles::rel_residual(matricize(tensor_exp(h)),
                                        oracles::mat_exp(oracles::naive_matricize(h))) <=
                  1e-9);

            const DenseTensor a = draw_positive_definite(s, rng);
            CHECK(oracles::rel_residual(matricize(tensor_log(a)),
                                        oracles::mat_log(oracles::naive_matricize(a))) <=
                  1e-9);
            CHECK(oracles::rel_residual(
                      matricize(tensor_pow(a, 1.8)),
                      oracles::mat_pow(oracles::naive_matricize(a), 1.8)) <= 1e-9);
        }
    }
}

TEST_CASE("apply_spectral_function maps eigenvalues pointwise") {
    CounterRng rng(41);
    const DenseTensor h = draw_hermitian(Shape::square({2, 2}), rng);
    const SpectralDecomposition dec = eig_hermitian(h);
    const DenseTensor got =
        apply_spectral_function(dec, [](double l) { return std::cos(l); });
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracles::naive_matricize(h));
    const Eigen::MatrixXcd want =
        es.eigenvectors() *
        es.eigenvalues().array().cos().matrix().asDiagonal().toDenseMatrix().cast<cplx>() *
        es.eigenvectors().adjoint();
    CHECK(oracles::rel_residual(matricize(got), want) <= 1e-10);

    CHECK_THROWS_AS(apply_spectral_function(
                        dec, [](double) { return std::numeric_limits<double>::infinity(); }),
                    DomainError);
}
