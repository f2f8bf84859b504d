#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tracegym/errors.hpp"
#include "tracegym/random_tensors.hpp"
#include "tracegym/rng.hpp"

using namespace tracegym;

namespace {

RandomTensorModel pauli_flip() { return RandomTensorModel::rademacher(oracles::pauli_z()); }

} // namespace

TEST_CASE("model kinds round-trip through their names") {
    for (ModelKind k : {ModelKind::gaussian_hermitian, ModelKind::bounded_spectrum,
                        ModelKind::rademacher_dilation, ModelKind::finite_mixture}) {
        CHECK(model_kind_from_string(to_string(k)) == k);
    }
    CHECK(to_string(ModelKind::gaussian_hermitian) == "gaussian-hermitian");
    CHECK_THROWS_AS(model_kind_from_string("gaussian_hermitian"), ConfigError);
}

TEST_CASE("model construction and validation") {
    CHECK_THROWS_AS(RandomTensorModel::gaussian(Shape::square({2}), 0.0), ConfigError);
    CHECK_THROWS_AS(RandomTensorModel::gaussian(Shape({2}, {3}), 1.0), ShapeError);
    CHECK_THROWS_AS(RandomTensorModel::bounded(Shape::square({2}), 2.0, 1.0), ConfigError);
    CHECK_THROWS_AS(
        RandomTensorModel::mixture({oracles::pauli_z()}, {0.5, 0.5}), ConfigError);
    CHECK_THROWS_AS(RandomTensorModel::mixture({oracles::pauli_z()}, {0.7}), ConfigError);

    const RandomTensorModel flip = pauli_flip();
    CHECK(flip.finite_support());
    CHECK(flip.support_size() == 2);
    const RandomTensorModel mix = RandomTensorModel::mixture(
        {oracles::pauli_z(), oracles::pauli_x()}, {0.25, 0.75});
    CHECK(mix.support_size() == 2);
    CHECK_FALSE(RandomTensorModel::gaussian(Shape::square({2}), 1.0).finite_support());
}

TEST_CASE("model json codec round-trips") {
    const RandomTensorModel mix = RandomTensorModel::mixture(
        {oracles::pauli_z(), oracles::pauli_x()}, {0.25, 0.75});
    const RandomTensorModel back = model_from_json(model_to_json(mix));
    CHECK(back.kind == mix.kind);
    CHECK(back.probs == mix.probs);
    REQUIRE(back.atoms.size() == 2);
    CHECK(approx_equal(back.atoms[1], oracles::pauli_x(), 0.0));

    const RandomTensorModel g = RandomTensorModel::gaussian(Shape::square({2, 2}), 0.7);
    const RandomTensorModel gback = model_from_json(model_to_json(g));
    CHECK(gback.kind == ModelKind::gaussian_hermitian);
    CHECK(gback.sigma == 0.7);
    CHECK(gback.shape == g.shape);
}

TEST_CASE("samples are hermitian, in-model, and seed-deterministic") {
    const Shape s = Shape::square({2, 2});
    for (const RandomTensorModel& m :
         {RandomTensorModel::gaussian(s, 1.3), RandomTensorModel::bounded(s, -0.5, 2.0),
          pauli_flip(),
          RandomTensorModel::mixture({oracles::pauli_z(), oracles::pauli_x()},
                                     {0.25, 0.75})}) {
        CounterRng rng(91, 7);
        const DenseTensor x = sample_model(m, rng);
        CHECK(frobenius_norm(x - conj_transpose(x)) <= 1e-12 * std::max(1.0, frobenius_norm(x)));
        CounterRng replay(91, 7);
        const DenseTensor y = sample_model(m, replay);
        for (std::int64_t i = 0; i < x.size(); ++i) CHECK(x[i] == y[i]);
    }

    CounterRng rng(92);
    const DenseTensor flip = sample_model(pauli_flip(), rng);
    const bool is_plus = approx_equal(flip, oracles::pauli_z(), 1e-15);
    const bool is_minus = approx_equal(flip, -1.0 * oracles::pauli_z(), 1e-15);
    CHECK((is_plus || is_minus));

    const RandomTensorModel bounded = RandomTensorModel::bounded(s, -0.5, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
        const auto lam = oracles::eigenvalues_hermitian(matricize(sample_model(bounded, rng)));
        for (double l : lam) {
            CHECK(l >= -0.5 - 1e-12);
            CHECK(l <= 2.0 + 1e-12);
        }
    }
}

TEST_CASE("cumulants of finite-support models are exact") {
    const TensorCumulants flip = tensor_cumulants(pauli_flip());
    CHECK(frobenius_norm(flip.phi1) <= 1e-14);
    CHECK(approx_equal(flip.phi2, DenseTensor::identity(Shape::square({2})), 1e-14));

    const RandomTensorModel atom =
        RandomTensorModel::mixture({oracles::pauli_x()}, {1.0});
    const TensorCumulants deg = tensor_cumulants(atom);
    CHECK(approx_equal(deg.phi1, oracles::pauli_x(), 1e-14));
    CHECK(frobenius_norm(deg.phi2) <= 1e-14);

    const DenseTensor d1 = oracles::diag_tensor({1.0, -2.0});
    const DenseTensor d2 = oracles::diag_tensor({3.0, 0.5});
    const TensorCumulants mix =
        tensor_cumulants(RandomTensorModel::mixture({d1, d2}, {0.25, 0.75}));
    for (int i = 0; i < 2; ++i) {
        const double a = (i == 0) ? 1.0 : -2.0;
        const double b = (i == 0) ? 3.0 : 0.5;
        const double mean = 0.25 * a + 0.75 * b;
        const double var = 0.25 * a * a + 0.75 * b * b - mean * mean;
        CHECK(mix.phi1[i * 2 + i].real() == doctest::Approx(mean).epsilon(1e-12));
        CHECK(mix.phi2[i * 2 + i].real() == doctest::Approx(var).epsilon(1e-12));
    }

    const auto lam = oracles::eigenvalues_hermitian(matricize(mix.phi2));
    for (double l : lam) CHECK(l >= -1e-8);
}

TEST_CASE("monte carlo cumulants approach the population values") {
    const Shape s = Shape::square({2});
    const RandomTensorModel bounded = RandomTensorModel::bounded(s, -1.0, 1.0);
    const TensorCumulants c = tensor_cumulants(bounded, 4096, 5);
    CHECK(frobenius_norm(c.phi1) <= 0.1);
    const auto lam = oracles::eigenvalues_hermitian(matricize(c.phi2));
    for (double l : lam) CHECK(l >= -1e-10);
}

TEST_CASE("mgf oracle evaluates scaled expectations") {
    const MgfOracle mgf(pauli_flip(), 64, 1);
    CHECK(mgf.exact());
    CHECK(mgf.lambda_abs_max() == doctest::Approx(1.0).epsilon(1e-14));

    const ScaledMgf at0 = mgf.at(cplx(0, 0));
    const Eigen::MatrixXcd m0 =
        std::exp(at0.log_scale) * oracles::naive_matricize(at0.value);
    CHECK(m0.isIdentity(1e-13));

    const ScaledMgf at1 = mgf.at(cplx(1, 0));
    const Eigen::MatrixXcd m1 =
        std::exp(at1.log_scale) * oracles::naive_matricize(at1.value);
    CHECK(m1(0, 0).real() == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
    CHECK(m1(1, 1).real() == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
    CHECK(std::abs(m1(0, 1)) <= 1e-14);

    const MgfOracle sampled(RandomTensorModel::gaussian(Shape::square({2}), 1.0), 128, 3);
    CHECK_FALSE(sampled.exact());
    const ScaledMgf g = sampled.at(cplx(0.5, 0.25));
    CHECK(g.value.all_finite());
}

TEST_CASE("dimensional constants") {
    CHECK(dim_constant(Shape::square({2}), DimConstantMode::modewise) == 3.0);
    CHECK(dim_constant(Shape::square({2, 2}), DimConstantMode::modewise) == 9.0);
    CHECK(dim_constant(Shape::square({3, 2}), DimConstantMode::modewise) == 15.0);
    CHECK(dim_constant(Shape::square({2, 2}), DimConstantMode::matricized) == 1.0);
    CHECK(to_string(DimConstantMode::modewise) == "modewise");
    CHECK(to_string(DimConstantMode::matricized) == "matricized");
}

TEST_CASE("laplace tail bound on the two-point flip model") {
    const TailBoundReport at1 = laplace_tail_bound(pauli_flip(), 1.0);
    CHECK(at1.bound == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(at1.bound <= 1.0);
    CHECK(at1.t_star > 0.0);
    CHECK(at1.c_dim == 1.0);

    const TailBoundReport low = laplace_tail_bound(pauli_flip(), -1.0);
    CHECK(low.bound == 1.0);
    CHECK(low.bound_raw >= 1.0);

    const TailBoundReport beyond = laplace_tail_bound(pauli_flip(), 2.0);
    CHECK(beyond.bound < 0.1);

    TailOptions modewise;
    modewise.mode = DimConstantMode::modewise;
    const TailBoundReport wide = laplace_tail_bound(pauli_flip(), 1.0, modewise);
    CHECK(wide.c_dim == 3.0);
    CHECK(wide.bound == 1.0);
    CHECK(wide.bound_raw >= 3.0 - 1e-9);
}

TEST_CASE("master bound for two independent flips") {
    const QuadratureScheme quad = build_quadrature(0.0, 1e-6);
    const std::vector<RandomTensorModel> models{pauli_flip(), pauli_flip()};

    const TailBoundReport rep = master_tail_bound(models, 2.0, quad);
    CHECK(rep.bound == doctest::Approx(0.5).epsilon(1e-9));

    const EmpiricalTail tail = empirical_tail(models, 2.0);
    CHECK(tail.enumerated);
    CHECK(tail.estimate == 0.5);
    CHECK(tail.cp_lower == 0.5);
    CHECK(tail.cp_upper == 0.5);
    CHECK(rep.bound + 1e-9 >= tail.estimate);

    const TailBoundReport looser = master_tail_bound(models, 1.0, quad);
    CHECK(looser.bound + 1e-9 >= rep.bound);
}

TEST_CASE("master bound collapses for commuting deterministic models") {
    const QuadratureScheme quad = build_quadrature(0.0, 1e-6);
    const DenseTensor d1 = oracles::diag_tensor({0.6, -0.2});
    const DenseTensor d2 = oracles::diag_tensor({0.3, 0.9});
    const std::vector<RandomTensorModel> models{
        RandomTensorModel::mixture({d1}, {1.0}), RandomTensorModel::mixture({d2}, {1.0})};
    const TailBoundReport joint = master_tail_bound(models, 1.2, quad);
    const TailBoundReport single =
        laplace_tail_bound(RandomTensorModel::mixture({d1 + d2}, {1.0}), 1.2);
    CHECK(joint.bound == doctest::Approx(single.bound).epsilon(1e-5));

    const TailBoundReport degenerate =
        master_tail_bound({RandomTensorModel::mixture({d1}, {1.0})}, 0.5, quad);
    const TailBoundReport lone =
        laplace_tail_bound(RandomTensorModel::mixture({d1}, {1.0}), 0.5);
    CHECK(degenerate.bound == doctest::Approx(lone.bound).epsilon(1e-6));
}

TEST_CASE("master bound dominates the enumerated tail on random flip triples") {
    CounterRng rng(93);
    const Shape s = Shape::square({2});
    const QuadratureScheme quad = build_quadrature(0.0, 1e-6);
    std::vector<RandomTensorModel> models;
    double spread = 0;
    for (int k = 0; k < 3; ++k) {
        const DenseTensor a = draw_hermitian(s, rng);
        models.push_back(RandomTensorModel::rademacher(a));
        spread += oracles::schatten_oracle(oracles::naive_matricize(a),
                                           std::numeric_limits<double>::infinity());
    }
    for (int i = 0; i <= 10; ++i) {
        const double zeta = -spread + 2.0 * spread * i / 10.0;
        const TailBoundReport rep = master_tail_bound(models, zeta, quad);
        const EmpiricalTail tail = empirical_tail(models, zeta);
        CHECK(tail.enumerated);
        CHECK(rep.bound + 1e-9 >= tail.estimate);
    }
}

TEST_CASE("empirical tails") {
    const std::vector<RandomTensorModel> models{pauli_flip(), pauli_flip()};
    CHECK(empirical_tail(models, -5.0).estimate == 1.0);
    CHECK(empirical_tail(models, 5.0).estimate == 0.0);

    const EmpiricalTail mc = empirical_tail(models, 2.0, 20000, 4, 1);
    CHECK_FALSE(mc.enumerated);
    CHECK(mc.n_trials == 20000);
    CHECK(mc.estimate == doctest::Approx(0.5).epsilon(0.05));
    CHECK(mc.cp_lower <= 0.5);
    CHECK(mc.cp_upper >= 0.5);

    const EmpiricalTail again = empirical_tail(models, 2.0, 20000, 4, 1);
    CHECK(again.estimate == mc.estimate);

    CHECK_THROWS_AS(empirical_tail({}, 1.0), ConfigError);
}

TEST_CASE("tail bound guards") {
    const QuadratureScheme quad = build_quadrature(0.0, 1e-6);
    CHECK_THROWS_AS(master_tail_bound({}, 1.0, quad), ConfigError);
    CHECK_THROWS_AS(master_tail_bound({pauli_flip()}, 1.0, build_quadrature(0.5, 1e-6)),
                    ConfigError);
    TailOptions bad;
    bad.t_min = 1.0;
    bad.t_max = 0.5;
    CHECK_THROWS_AS(laplace_tail_bound(pauli_flip(), 1.0, bad), ConfigError);
}
