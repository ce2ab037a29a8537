#include <doctest.h>

#include <limits>
#include <numbers>

#include "generators.hpp"
#include "synthcoupling/analysis.hpp"
#include "synthcoupling/model.hpp"
#include "synthcoupling/operators.hpp"

using namespace synthcoupling;
using testgen::max_abs;

namespace {

StateVector bell(const HilbertSpec& hs)
{
    Vector v = Vector::Zero(hs.dim());
    v[hs.index(0, qubit_index::up)] = 1.0 / std::sqrt(2.0);
    v[hs.index(1, qubit_index::down)] = 1.0 / std::sqrt(2.0);
    return StateVector(v, Space::composite(hs));
}

} // namespace

TEST_CASE("annihilation ladder elements")
{
    const Operator a = annihilation(3);
    CHECK(a.matrix()(0, 1) == cplx(1.0));
    CHECK(a.matrix()(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(a.matrix()(1, 0) == cplx(0.0));

    const Operator comm = commutator(a, a.adjoint());
    Matrix expected = Matrix::Zero(3, 3);
    expected.diagonal() << 1.0, 1.0, -2.0;
    CHECK(max_abs(comm.matrix() - expected) < 1e-14);

    Matrix two(2, 2);
    two << 0.0, 1.0, 0.0, 0.0;
    CHECK(max_abs(annihilation(2).matrix() - two) == 0.0);

    CHECK_THROWS_AS(annihilation(1), ConfigError);
    CHECK_THROWS_AS(HilbertSpec(1), ConfigError);
}

TEST_CASE("number operator is exactly diag(0..N-1) for every cutoff")
{
    for (int n = 2; n <= 40; ++n) {
        const Matrix m = number_operator(n).matrix();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                REQUIRE(m(i, j) == cplx(i == j ? static_cast<double>(i) : 0.0));
        const Operator a = annihilation(n);
        // sqrt(n) * sqrt(n) may differ from n in the last bit.
        REQUIRE(max_abs((a.adjoint() * a).matrix() - m) <= 4 * n * std::numeric_limits<double>::epsilon());
    }
}

TEST_CASE("qubit operators in the {+z, -z} basis")
{
    const auto q = qubit_operators();
    Vector up(2), down(2);
    up << 1.0, 0.0;
    down << 0.0, 1.0;
    CHECK((q.sigma_minus.matrix() * up - down).norm() == 0.0);
    CHECK((q.sigma_minus.matrix() * down).norm() == 0.0);
    CHECK((q.sigma_plus.matrix() * down - up).norm() == 0.0);

    Eigen::SelfAdjointEigenSolver<Matrix> es(q.sigma_z.matrix());
    CHECK(es.eigenvalues()[0] == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()[1] == doctest::Approx(1.0));

    const Vector plus_x = (up + down) / std::sqrt(2.0);
    const Vector minus_x = (up - down) / std::sqrt(2.0);
    CHECK((q.sigma_x.matrix() * plus_x - plus_x).norm() < 1e-15);
    CHECK((q.sigma_x.matrix() * minus_x + minus_x).norm() < 1e-15);
    CHECK(max_abs(q.sigma_x.matrix() - (q.sigma_plus + q.sigma_minus).matrix()) == 0.0);
}

TEST_CASE("embedding into the cavity-major composite space")
{
    const HilbertSpec hs(2);
    CHECK(max_abs(embed(Operator::identity(Space::cavity(2)), Factor::cavity, hs).matrix() -
                  Matrix::Identity(4, 4)) == 0.0);
    CHECK(max_abs(embed(Operator::identity(Space::qubit()), Factor::qubit, hs).matrix() - Matrix::Identity(4, 4)) ==
          0.0);

    const HilbertSpec big(6);
    const Operator a = embed(annihilation(6), Factor::cavity, big);
    const Operator sz = embed(qubit_operators().sigma_z, Factor::qubit, big);
    CHECK(max_abs(commutator(a, sz).matrix()) == 0.0);

    const Matrix sm = embed(qubit_operators().sigma_minus, Factor::qubit, hs).matrix();
    int nonzeros = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            nonzeros += sm(i, j) != cplx(0.0);
    CHECK(nonzeros == 2);
    CHECK(sm(1, 0) == cplx(1.0));
    CHECK(sm(3, 2) == cplx(1.0));

    CHECK_THROWS_AS(embed(annihilation(3), Factor::cavity, hs), DimensionError);
    CHECK_THROWS_AS(embed(annihilation(2), Factor::qubit, hs), DimensionError);
}

TEST_CASE("embedded factor operators multiply like the tensor product")
{
    testgen::Gen gen(11);
    const HilbertSpec hs(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Operator a(gen.matrix(5), Space::cavity(5));
        const Operator b(gen.matrix(2), Space::qubit());
        const Matrix product = (embed(a, Factor::cavity, hs) * embed(b, Factor::qubit, hs)).matrix();
        Matrix kron(10, 10);
        for (int n = 0; n < 5; ++n)
            for (int m = 0; m < 5; ++m)
                for (int p = 0; p < 2; ++p)
                    for (int q = 0; q < 2; ++q)
                        kron(hs.index(n, p), hs.index(m, q)) = a.matrix()(n, m) * b.matrix()(p, q);
        REQUIRE(max_abs(product - kron) < 1e-12);
    }
}

TEST_CASE("embedding preserves spectra with doubled multiplicity")
{
    testgen::Gen gen(12);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen.integer(2, 10);
        const HilbertSpec hs(n);
        const Matrix h = gen.hermitian(n);
        Eigen::SelfAdjointEigenSolver<Matrix> factor(h);
        Eigen::SelfAdjointEigenSolver<Matrix> full(embed(Operator(h, Space::cavity(n)), Factor::cavity, hs).matrix());
        for (int k = 0; k < n; ++k) {
            REQUIRE(full.eigenvalues()[2 * k] == doctest::Approx(factor.eigenvalues()[k]).epsilon(1e-10));
            REQUIRE(full.eigenvalues()[2 * k + 1] == doctest::Approx(factor.eigenvalues()[k]).epsilon(1e-10));
        }
        const Matrix hq = gen.hermitian(2);
        Eigen::SelfAdjointEigenSolver<Matrix> qf(hq);
        Eigen::SelfAdjointEigenSolver<Matrix> qfull(embed(Operator(hq, Space::qubit()), Factor::qubit, hs).matrix());
        for (int k = 0; k < 2 * n; ++k)
            REQUIRE(qfull.eigenvalues()[k] == doctest::Approx(qf.eigenvalues()[k / n]).epsilon(1e-10));
    }
}

TEST_CASE("matrix exponential examples")
{
    CHECK(max_abs(matrix_exponential(Matrix::Zero(6, 6)) - Matrix::Identity(6, 6)) == 0.0);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = cplx(0.0, std::numbers::pi / 2);
    d(1, 1) = cplx(0.0, -std::numbers::pi / 2);
    const Matrix e = matrix_exponential(d);
    CHECK(max_abs(e * e + Matrix::Identity(2, 2)) < 1e-14);

    const Operator u = squeeze_unitary(1.25, HilbertSpec(40));
    CHECK(max_abs(u.matrix() * u.matrix().adjoint() - Matrix::Identity(80, 80)) <= 1e-10);

    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(matrix_exponential(bad), NumericalError);
}

TEST_CASE("matrix exponential agrees with eigendecomposition for Hermitian generators")
{
    testgen::Gen gen(13);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = gen.integer(2, 16);
        Matrix h = gen.hermitian(d);
        h *= gen.uniform(0.1, 50.0) / h.operatorNorm();
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        const Vector phases = (cplx(0.0, -1.0) * es.eigenvalues().cast<cplx>()).array().exp();
        const Matrix exact = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        REQUIRE(max_abs(matrix_exponential(Matrix(cplx(0.0, -1.0) * h)) - exact) <= 1e-12 * 50);
    }
}

TEST_CASE("exp(A) exp(-A) = I")
{
    testgen::Gen gen(14);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = gen.integer(2, 20);
        // Skew-Hermitian generators up to norm 20: both factors are unitary.
        Matrix a = cplx(0.0, 1.0) * gen.hermitian(d);
        a *= gen.uniform(0.0, 20.0) / a.operatorNorm();
        REQUIRE(max_abs(matrix_exponential(a) * matrix_exponential(Matrix(-a)) - Matrix::Identity(d, d)) <= 1e-10);
        // General generators up to norm 2.
        Matrix b = gen.matrix(d);
        b *= gen.uniform(0.0, 2.0) / b.operatorNorm();
        REQUIRE(max_abs(matrix_exponential(b) * matrix_exponential(Matrix(-b)) - Matrix::Identity(d, d)) <= 1e-10);
    }
}

TEST_CASE("partial trace")
{
    testgen::Gen gen(15);
    const HilbertSpec hs(4);
    const DensityMatrix rc = gen.density(Space::cavity(4));
    const DensityMatrix rq = gen.density(Space::qubit());
    Matrix product(8, 8);
    for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m)
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    product(hs.index(n, p), hs.index(m, q)) = rc.matrix()(n, m) * rq.matrix()(p, q);
    const DensityMatrix rho(product, Space::composite(hs));
    CHECK(max_abs(partial_trace(rho, Factor::cavity).matrix() - rc.matrix()) < 1e-14);
    CHECK(max_abs(partial_trace(rho, Factor::qubit).matrix() - rq.matrix()) < 1e-14);

    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix r = gen.density(Space::composite(hs));
        REQUIRE(std::abs(partial_trace(r, Factor::cavity).trace() - r.trace()) < 1e-14);
        REQUIRE(std::abs(partial_trace(r, Factor::qubit).trace() - r.trace()) < 1e-14);
    }

    // Cat state at alpha = 1.07019: qubit eigenvalues (1 +- e^{-2|alpha|^2}) / 2.
    const DensityMatrix cat = DensityMatrix::pure(cat_target(1.07019, HilbertSpec(30)));
    Eigen::SelfAdjointEigenSolver<Matrix> es(partial_trace(cat, Factor::qubit).matrix());
    CHECK(es.eigenvalues()[0] == doctest::Approx(0.44939).epsilon(1e-5));
    CHECK(es.eigenvalues()[1] == doctest::Approx(0.55061).epsilon(1e-5));

    CHECK_THROWS_AS(partial_trace(rq, Factor::cavity), DimensionError);
}

TEST_CASE("qubit reduction is unchanged by cavity-only unitaries")
{
    testgen::Gen gen(16);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen.integer(2, 12);
        const HilbertSpec hs(n);
        const DensityMatrix rho = gen.density(Space::composite(hs));
        const Operator u = embed(Operator(gen.unitary(n), Space::cavity(n)), Factor::cavity, hs);
        const DensityMatrix moved = conjugate(u, rho);
        REQUIRE(max_abs(partial_trace(moved, Factor::qubit).matrix() - partial_trace(rho, Factor::qubit).matrix()) <=
                1e-12);
    }
}

TEST_CASE("partial transpose")
{
    testgen::Gen gen(17);
    const HilbertSpec hs(3);
    const DensityMatrix product = DensityMatrix::pure(StateVector::basis(hs, 1, qubit_index::up));
    Eigen::SelfAdjointEigenSolver<Matrix> a(partial_transpose(product).matrix());
    Eigen::SelfAdjointEigenSolver<Matrix> b(product.matrix());
    CHECK(max_abs(a.eigenvalues().cast<cplx>() - b.eigenvalues().cast<cplx>()) < 1e-14);

    const DensityMatrix b_rho = DensityMatrix::pure(bell(hs));
    Eigen::SelfAdjointEigenSolver<Matrix> pt(partial_transpose(b_rho).matrix());
    CHECK(pt.eigenvalues()[0] == doctest::Approx(-0.5));

    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho = gen.density(Space::composite(hs));
        const Operator once = partial_transpose(rho);
        REQUIRE(once.hermiticity_defect() < 1e-14);
        const DensityMatrix again(once.matrix(), rho.space());
        REQUIRE(max_abs(partial_transpose(again).matrix() - rho.matrix()) == 0.0);
    }
    CHECK_THROWS_AS(partial_transpose(product, Factor::cavity), ConfigError);
}

TEST_CASE("trace norm")
{
    testgen::Gen gen(18);
    for (int trial = 0; trial < 10; ++trial)
        REQUIRE(trace_norm(Operator(gen.density(Space::composite(HilbertSpec(3))).matrix(),
                                    Space::composite(HilbertSpec(3)))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trace_norm(qubit_operators().sigma_z) == doctest::Approx(2.0));
    CHECK(trace_norm(partial_transpose(DensityMatrix::pure(bell(HilbertSpec(2))))) == doctest::Approx(2.0));
    CHECK_THROWS_AS(trace_norm(qubit_operators().sigma_minus), NumericalError);
}

TEST_CASE("density matrix validation")
{
    const HilbertSpec hs(2);
    Matrix m = Matrix::Identity(4, 4) * 0.5;
    CHECK_THROWS_AS(validate_density(DensityMatrix(m, Space::composite(hs))), NumericalError);
    m = Matrix::Zero(4, 4);
    m(0, 0) = 1.2;
    m(1, 1) = -0.2;
    CHECK_THROWS_AS(validate_density(DensityMatrix(m, Space::composite(hs))), NumericalError);
    CHECK_NOTHROW(validate_density(DensityMatrix::maximally_mixed(Space::composite(hs))));
}
