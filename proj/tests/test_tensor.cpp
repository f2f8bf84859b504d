#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include "oracles.hpp"
#include "tracegym/errors.hpp"
#include "tracegym/rng.hpp"
#include "tracegym/spectral.hpp"
#include "tracegym/tensor.hpp"

using namespace tracegym;

TEST_CASE("shape accounting and validation") {
    const Shape s({2, 3}, {4});
    CHECK(s.row_size() == 6);
    CHECK(s.col_size() == 4);
    CHECK_FALSE(s.is_square());
    CHECK(Shape::square({2, 2}).is_square());
    CHECK(Shape::square({2, 2}).is_cubical());
    CHECK_FALSE(Shape::square({2, 3}).is_cubical());
    CHECK(Shape({2}, {2}) == Shape::square({2}));
    CHECK_THROWS_AS(Shape({0}, {2}), ShapeError);
    CHECK_THROWS_AS(Shape({2}, {-1}), ShapeError);
}

TEST_CASE("flatten and unflatten are inverse bijections") {
    const std::vector<std::int64_t> dims{2, 3, 4};
    for (std::int64_t f = 0; f < 24; ++f) {
        const auto idx = unflatten_index(dims, f);
        CHECK(flatten_index(dims, idx) == f);
        CHECK(oracles::flat_index(dims, idx) == f);
    }
}

TEST_CASE("identity tensor matricizes to the identity matrix") {
    const DenseTensor id = DenseTensor::identity(Shape::square({2, 3}));
    CHECK(oracles::naive_matricize(id).isIdentity(0.0));
    CHECK(trace(id).real() == 6.0);
    CHECK(trace(id).imag() == 0.0);
    CHECK_THROWS_AS(DenseTensor::identity(Shape({2}, {3})), ShapeError);
}

TEST_CASE("einstein product matches the brute-force loop contraction") {
    CounterRng rng(11);
    const Shape sa({2, 3}, {2, 3});
    const DenseTensor a = draw_ginibre(sa, rng);
    const DenseTensor b = draw_ginibre(sa, rng);
    const DenseTensor got = einstein_product(a, b);
    const DenseTensor want = oracles::naive_einstein(a, b);
    CHECK(approx_equal(got, want, 1e-12 * frobenius_norm(a) * frobenius_norm(b)));

    const DenseTensor rect_a = draw_ginibre(Shape({2}, {3, 2}), rng);
    const DenseTensor rect_b = draw_ginibre(Shape({3, 2}, {4}), rng);
    CHECK(approx_equal(einstein_product(rect_a, rect_b),
                       oracles::naive_einstein(rect_a, rect_b), 1e-12));
}

TEST_CASE("einstein product identity and diagonal cases") {
    CounterRng rng(12);
    const Shape s = Shape::square({2, 2});
    const DenseTensor a = draw_ginibre(s, rng);
    const DenseTensor id = DenseTensor::identity(s);
    CHECK(approx_equal(einstein_product(id, a), a, 1e-14));
    CHECK(approx_equal(einstein_product(a, id), a, 1e-14));

    const DenseTensor d1 = oracles::diag_tensor({1, 2});
    const DenseTensor d2 = oracles::diag_tensor({3, 4});
    CHECK(approx_equal(einstein_product(d1, d2), oracles::diag_tensor({3, 8}), 1e-15));

    CHECK_THROWS_AS(einstein_product(a, draw_ginibre(Shape::square({3}), rng)),
                    ShapeError);
}

TEST_CASE("matricize is an algebra homomorphism") {
    CounterRng rng(13);
    const Shape s = Shape::square({2, 2});
    for (int trial = 0; trial < 25; ++trial) {
        const DenseTensor a = draw_ginibre(s, rng);
        const DenseTensor b = draw_ginibre(s, rng);
        const Eigen::MatrixXcd lhs = matricize(einstein_product(a, b));
        const Eigen::MatrixXcd rhs = oracles::naive_matricize(a) * oracles::naive_matricize(b);
        CHECK((lhs - rhs).norm() <= 1e-12 * frobenius_norm(a) * frobenius_norm(b));
    }
}

TEST_CASE("matricize round-trips bit-exactly") {
    CounterRng rng(14);
    const Shape s({2, 3}, {4});
    const DenseTensor a = draw_ginibre(s, rng);
    const DenseTensor back = dematricize(matricize(a), s);
    for (std::int64_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == back[i]);
    }
    CHECK((matricize(a) - oracles::naive_matricize(a)).norm() == 0.0);
    CHECK_THROWS_AS(dematricize(Eigen::MatrixXcd::Zero(3, 3), s), ShapeError);
}

TEST_CASE("conjugate transpose is the matricized adjoint and an involution") {
    CounterRng rng(15);
    const DenseTensor a = draw_ginibre(Shape({2, 2}, {3}), rng);
    CHECK((matricize(conj_transpose(a)) - oracles::naive_matricize(a).adjoint()).norm() ==
          0.0);
    CHECK(approx_equal(conj_transpose(conj_transpose(a)), a, 0.0));

    const DenseTensor h = draw_hermitian(Shape::square({2, 2}), rng);
    CHECK(approx_equal(conj_transpose(h), h, 1e-12 * frobenius_norm(h)));
}

TEST_CASE("trace identities") {
    CounterRng rng(16);
    const Shape s = Shape::square({2, 2});
    CHECK(trace(DenseTensor::identity(s)) == cplx(4.0, 0.0));
    CHECK_THROWS_AS(trace(draw_ginibre(Shape({2}, {3}), rng)), ShapeError);

    for (int trial = 0; trial < 20; ++trial) {
        const DenseTensor a = draw_ginibre(s, rng);
        const DenseTensor b = draw_ginibre(s, rng);
        const cplx ab = trace(einstein_product(a, b));
        const cplx ba = trace(einstein_product(b, a));
        CHECK(std::abs(ab - ba) <= 1e-10 * std::max(1.0, std::abs(ab)));

        const cplx tk = trace(kronecker_product(a, b));
        CHECK(std::abs(tk - trace(a) * trace(b)) <= 1e-10 * std::max(1.0, std::abs(tk)));
    }

    const DenseTensor d1 = oracles::diag_tensor({1, 2});
    const DenseTensor d2 = oracles::diag_tensor({3, 4});
    CHECK(trace(kronecker_product(d1, d2)).real() == 21.0);
}

TEST_CASE("frobenius inner product and norm") {
    CounterRng rng(17);
    const Shape s = Shape::square({2, 2});
    CHECK(frobenius_inner(DenseTensor::identity(Shape::square({2})),
                          DenseTensor::identity(Shape::square({2})))
              .real() == 2.0);

    const DenseTensor a = draw_ginibre(s, rng);
    const DenseTensor b = draw_ginibre(s, rng);
    cplx entrywise = 0;
    for (std::int64_t i = 0; i < a.size(); ++i) entrywise += std::conj(a[i]) * b[i];
    CHECK(std::abs(frobenius_inner(a, b) - entrywise) <= 1e-12 * std::abs(entrywise));
    CHECK(std::abs(frobenius_inner(a, b) - std::conj(frobenius_inner(b, a))) <= 1e-12);
    CHECK(frobenius_norm(a) ==
          doctest::Approx(std::sqrt(frobenius_inner(a, a).real())).epsilon(1e-14));
    CHECK_THROWS_AS(frobenius_inner(a, draw_ginibre(Shape::square({3}), rng)),
                    ShapeError);
}

TEST_CASE("kronecker product matricizes to the matrix kronecker product") {
    CounterRng rng(18);
    const DenseTensor a = draw_ginibre(Shape({2}, {3}), rng);
    const DenseTensor b = draw_ginibre(Shape({2, 2}, {2}), rng);
    const Eigen::MatrixXcd want =
        Eigen::kroneckerProduct(oracles::naive_matricize(a), oracles::naive_matricize(b));
    CHECK(oracles::rel_residual(matricize(kronecker_product(a, b)), want) <= 1e-15);

    const DenseTensor scalar_id = DenseTensor::identity(Shape::square({1}));
    CHECK((matricize(kronecker_product(a, scalar_id)) - oracles::naive_matricize(a)).norm() ==
          0.0);
}

TEST_CASE("kronecker sum spectrum is the eigenvalue sum set") {
    const DenseTensor d1 = oracles::diag_tensor({1, 2});
    const DenseTensor d2 = oracles::diag_tensor({10, 20});
    auto lam = oracles::eigenvalues_hermitian(matricize(kronecker_sum(d1, d2)));
    std::sort(lam.begin(), lam.end());
    const std::vector<double> want{11, 12, 21, 22};
    REQUIRE(lam.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(lam[i] == doctest::Approx(want[i]).epsilon(1e-12));

    CounterRng rng(19);
    const Shape s = Shape::square({2});
    const DenseTensor h1 = draw_hermitian(s, rng);
    const DenseTensor h2 = draw_hermitian(s, rng);
    auto l1 = oracles::eigenvalues_hermitian(matricize(h1));
    auto l2 = oracles::eigenvalues_hermitian(matricize(h2));
    std::vector<double> sums;
    for (double x : l1) {
        for (double y : l2) sums.push_back(x + y);
    }
    std::sort(sums.begin(), sums.end());
    auto got = oracles::eigenvalues_hermitian(matricize(kronecker_sum(h1, h2)));
    std::sort(got.begin(), got.end());
    REQUIRE(got.size() == sums.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == doctest::Approx(sums[i]).epsilon(1e-10));
    }

    const DenseTensor zero = DenseTensor::zero(s);
    CHECK(frobenius_norm(kronecker_sum(zero, zero)) == 0.0);
    CHECK_THROWS_AS(kronecker_sum(draw_ginibre(Shape({2}, {3}), rng), d1), ShapeError);
}

TEST_CASE("kronecker exp and log identities") {
    CounterRng rng(20);
    const Shape s = Shape::square({2});
    for (int trial = 0; trial < 10; ++trial) {
        const DenseTensor h1 = draw_hermitian(s, rng);
        const DenseTensor h2 = draw_hermitian(s, rng);
        const DenseTensor left = kronecker_product(tensor_exp(h1), tensor_exp(h2));
        const DenseTensor right = tensor_exp(kronecker_sum(h1, h2));
        CHECK(frobenius_norm(left - right) <= 1e-9 * frobenius_norm(right));

        const DenseTensor a1 = draw_positive_definite(s, rng);
        const DenseTensor a2 = draw_positive_definite(s, rng);
        const DenseTensor id = DenseTensor::identity(s);
        const DenseTensor log_left = tensor_log(kronecker_product(a1, a2));
        const DenseTensor log_right = kronecker_product(tensor_log(a1), id) +
                                      kronecker_product(id, tensor_log(a2));
        CHECK(frobenius_norm(log_left - log_right) <=
              1e-9 * std::max(1.0, frobenius_norm(log_right)));
    }
}

TEST_CASE("arithmetic operators and hermitian part") {
    CounterRng rng(21);
    const Shape s = Shape::square({2, 2});
    const DenseTensor a = draw_ginibre(s, rng);
    const DenseTensor b = draw_ginibre(s, rng);
    CHECK(approx_equal((a + b) - b, a, 1e-14 * frobenius_norm(a)));
    CHECK(frobenius_norm(2.0 * a) == doctest::Approx(2.0 * frobenius_norm(a)));
    CHECK(frobenius_norm(cplx(0, 1) * a) == doctest::Approx(frobenius_norm(a)));

    const DenseTensor h = hermitian_part(a);
    CHECK(approx_equal(conj_transpose(h), h, 1e-14));
    CHECK(approx_equal(a, h + (a - h), 1e-14));
    CHECK_THROWS_AS(a + draw_ginibre(Shape::square({3}), rng), ShapeError);
}

TEST_CASE("at() addresses entries by multi-index and checks bounds") {
    CounterRng rng(22);
    const Shape s({2, 3}, {4});
    DenseTensor a = draw_ginibre(s, rng);
    CHECK(a.at({1, 2}, {3}) == oracles::entry(a, {1, 2}, {3}));
    a.at({0, 0}, {0}) = cplx(7, -7);
    CHECK(a[0] == cplx(7, -7));
    CHECK_THROWS_AS(a.at({2, 0}, {0}), ShapeError);
    CHECK_THROWS_AS(a.at({0, 0}, {4}), ShapeError);
    CHECK(a.all_finite());
    a[0] = cplx(std::numeric_limits<double>::quiet_NaN(), 0);
    CHECK_FALSE(a.all_finite());
}
