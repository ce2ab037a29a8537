#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "synthcoupling/analysis.hpp"
#include "synthcoupling/model.hpp"

using namespace synthcoupling;
using testgen::max_abs;

namespace {

// Fock levels whose squeezed image, computed on a 4x larger space, keeps
// less than squeeze_tail_limit outside the cutoff. Only there can the
// truncated conjugation agree with the infinite-dimensional identity.
int squeeze_interior(double r, int fock_cutoff)
{
    const int big = 4 * fock_cutoff;
    const Matrix a = annihilation(big).matrix();
    const Matrix u = matrix_exponential(Matrix(0.5 * r * (a * a - a.adjoint() * a.adjoint())));
    int m = 0;
    while (m < fock_cutoff && u.col(m).tail(big - fock_cutoff).squaredNorm() < squeeze_tail_limit)
        ++m;
    return m;
}

struct FrameDefect {
    int interior_levels;
    double defect;
};

// U_S H_lab U_S^dag against H_Rabi + H_Err plus the c-number shift (Omega_c - delta_c)/2.
FrameDefect frame_identity_defect(double r, double g, double delta_q, int fock_cutoff)
{
    ModelParams p;
    p.g = g;
    p.delta_q = delta_q;
    const HilbertSpec hs(fock_cutoff);
    const FrameSnapshot snap = snapshot(r, 0.0, p);
    const Operator u = squeeze_unitary(r, hs);
    const Matrix lhs = (u * hamiltonian_lab(snap, p, hs) * u.adjoint()).matrix();
    const auto parts = hamiltonian_squeezed_parts(snap, p, hs);
    const Matrix rhs = (parts.rabi + parts.err).matrix() +
                       0.5 * (snap.omega_c_eff - p.delta_c) * Matrix::Identity(hs.dim(), hs.dim());
    const int m = squeeze_interior(r, fock_cutoff);
    const int keep = HilbertSpec::qubit_dim * m;
    return {m, max_abs(lhs.topLeftCorner(keep, keep) - rhs.topLeftCorner(keep, keep))};
}

} // namespace

TEST_CASE("squeeze parameter from drive amplitude")
{
    CHECK(r_from_lambda(0.0, 1.0) == 0.0);
    CHECK(r_from_lambda(0.986614, 1.0) == doctest::Approx(1.25).epsilon(1e-5));
    CHECK(gain_db_from_r(1.25) == doctest::Approx(10.857).epsilon(1e-4));
    CHECK(r_from_lambda(0.9998, 1.0) == doctest::Approx(2.3026).epsilon(1e-4));
    CHECK(gain_db_from_r(r_from_lambda(0.9998, 1.0)) == doctest::Approx(20.0).epsilon(1e-4));
    CHECK(r_from_gain_db(20.0) == doctest::Approx(std::log(10.0)).epsilon(1e-14));
    CHECK_THROWS_AS(r_from_lambda(1.0, 1.0), InstabilityError);
    CHECK_THROWS_AS(r_from_lambda(-1.5, 1.0), InstabilityError);
}

TEST_CASE("r and lambda round trip on [0, 3]")
{
    testgen::Gen gen(21);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = gen.uniform(0.0, 3.0);
        REQUIRE(std::abs(r_from_lambda(lambda_from_r(r, 1.0), 1.0) - r) <= 1e-12 * std::max(1.0, r));
    }
}

TEST_CASE("tanh ramp")
{
    const DriveRamp ramp{1.25, 100.0, 500.0};
    const auto start = ramp_r(0.0, ramp);
    CHECK(start.r == 0.0);
    CHECK(start.r_dot == doctest::Approx(1.25 / 200.0));
    const auto late = ramp_r(1e5, ramp);
    CHECK(late.r == doctest::Approx(1.25));
    CHECK(late.r_dot < 1e-12);
    CHECK(ramp_r(200.0, ramp).r == doctest::Approx(0.95199).epsilon(1e-5));
    CHECK(ramp_r(500.0, ramp).r == doctest::Approx(1.25 * std::tanh(2.5)));

    CHECK_THROWS_AS(DriveRamp({-0.1, 1.0, 1.0}).validate(), ConfigError);
    CHECK_THROWS_AS(DriveRamp({1.0, 0.0, 1.0}).validate(), ConfigError);
    CHECK_THROWS_AS(DriveRamp({1.0, 1.0, -1.0}).validate(), ConfigError);
}

TEST_CASE("ramp is monotone and r_dot is its derivative")
{
    testgen::Gen gen(22);
    for (int trial = 0; trial < 50; ++trial) {
        const DriveRamp ramp{gen.uniform(0.0, 2.5), gen.uniform(1.0, 200.0), 0.0};
        double previous = -1.0;
        for (int k = 0; k < 100; ++k) {
            const double t = k * ramp.tau * 0.1;
            const auto v = ramp_r(t, ramp);
            REQUIRE(v.r >= previous);
            previous = v.r;
            const double h = 1e-5 * ramp.tau;
            const double fd = (ramp_r(t + h, ramp).r - ramp_r(std::max(0.0, t - h), ramp).r) / (t + h - std::max(0.0, t - h));
            REQUIRE(v.r_dot == doctest::Approx(fd).epsilon(1e-6).scale(1e-9));
        }
    }
}

TEST_CASE("frame snapshots")
{
    ModelParams p;
    p.g = 0.1;
    const auto s0 = snapshot(0.0, 0.0, p);
    CHECK(s0.omega_c_eff == 1.0);
    CHECK(s0.g_tilde == doctest::Approx(0.05));
    CHECK(s0.lambda == 0.0);

    const auto s1 = snapshot(1.25, 0.0, p);
    CHECK(s1.omega_c_eff == doctest::Approx(0.163071).epsilon(1e-6));
    CHECK(s1.g_tilde == doctest::Approx(0.174517).epsilon(1e-6));
    CHECK(s1.lambda == doctest::Approx(std::tanh(2.5)));

    p.g = 1e-4;
    const auto s2 = snapshot(2.302585, 0.0, p);
    CHECK(s2.omega_c_eff == doctest::Approx(0.019998).epsilon(1e-5));
    CHECK(s2.g_tilde == doctest::Approx(5e-4).epsilon(1e-5));

    const DriveRamp ramp{1.25, 100.0, 500.0};
    const auto st = snapshot(100.0, p, DriveSchedule{ramp});
    CHECK(st.r == doctest::Approx(ramp_r(100.0, ramp).r));
    CHECK(st.r_dot == doctest::Approx(ramp_r(100.0, ramp).r_dot));
}

TEST_CASE("effective frequency and coupling are monotone")
{
    testgen::Gen gen(23);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = gen.uniform(0.0, 3.0);
        const double dr = gen.uniform(1e-3, 0.5);
        REQUIRE(effective_cavity_frequency(r + dr, 1.0) < effective_cavity_frequency(r, 1.0));
        REQUIRE(enhanced_coupling(r + dr, 0.1) > enhanced_coupling(r, 0.1));
        const double dc = gen.uniform(0.5, 2.0);
        REQUIRE(std::abs(effective_cavity_frequency(r, dc) * std::cosh(2.0 * r) - dc) <= 1e-12 * dc);
    }
}

TEST_CASE("parameter validation")
{
    ModelParams p;
    p.delta_c = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.delta_c = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.kappa = -1e-3;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.gamma = -1e-3;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.g = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("lab-frame Hamiltonian")
{
    ModelParams p;
    p.delta_q = 0.3;
    const HilbertSpec hs(6);
    const Matrix h0 = hamiltonian_lab(snapshot(0.0, 0.0, p), p, hs).matrix();
    for (int n = 0; n < 6; ++n) {
        CHECK(h0(hs.index(n, qubit_index::up), hs.index(n, qubit_index::up)) == cplx(n + 0.15));
        CHECK(h0(hs.index(n, qubit_index::down), hs.index(n, qubit_index::down)) == cplx(n - 0.15));
    }
    CHECK(max_abs(h0 - Matrix(h0.diagonal().asDiagonal())) == 0.0);

    p.g = 0.2;
    const auto snap = snapshot(0.7, 0.0, p);
    const Operator h = hamiltonian_lab(snap, p, hs);
    CHECK(h.hermiticity_defect() <= 1e-14);
    for (int q : {qubit_index::up, qubit_index::down})
        CHECK(h.matrix()(hs.index(2, q), hs.index(0, q)).real() ==
              doctest::Approx(-snap.lambda / 2 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(h.matrix()(hs.index(1, qubit_index::down), hs.index(0, qubit_index::up)) == cplx(0.2));
}

TEST_CASE("Hamiltonians are Hermitian")
{
    testgen::Gen gen(24);
    for (int trial = 0; trial < 30; ++trial) {
        ModelParams p;
        p.delta_q = gen.uniform(-1.0, 1.0);
        p.g = gen.uniform(0.0, 0.5);
        const auto snap = snapshot(gen.uniform(0.0, 2.0), gen.uniform(-0.1, 0.1), p);
        const HilbertSpec hs(gen.integer(2, 20));
        REQUIRE(hamiltonian_lab(snap, p, hs).hermiticity_defect() <= 1e-12);
        const auto parts = hamiltonian_squeezed_parts(snap, p, hs);
        REQUIRE(parts.rabi.hermiticity_defect() <= 1e-12);
        REQUIRE(parts.err.hermiticity_defect() <= 1e-12);
        REQUIRE(parts.da.hermiticity_defect() <= 1e-12);
    }
}

TEST_CASE("squeezed-frame parts")
{
    ModelParams p;
    p.g = 0.1;
    p.delta_q = 0.2;
    const HilbertSpec hs(10);
    CHECK(max_abs(hamiltonian_squeezed_parts(snapshot(0.8, 0.0, p), p, hs).da.matrix()) == 0.0);
    CHECK(max_abs(hamiltonian_squeezed_parts(snapshot(0.8, 0.05, p), p, hs).da.matrix()) > 0.0);

    const double e0 = hamiltonian_squeezed_parts(snapshot(0.0, 0.0, p), p, hs).err.max_abs();
    const double e2 = hamiltonian_squeezed_parts(snapshot(2.0, 0.0, p), p, hs).err.max_abs();
    CHECK(e2 / e0 == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

    const auto parts = hamiltonian_squeezed_parts(snapshot(1.25, 0.0, p), p, hs);
    const auto b = squeezed_frame_basis(hs);
    const auto snap = snapshot(1.25, 0.0, p);
    CHECK(max_abs(parts.rabi.matrix() - (snap.omega_c_eff * b.n.matrix() + p.delta_q * b.half_sz.matrix() +
                                         p.g * std::exp(1.25) * b.rabi_coupling.matrix())) < 1e-14);
}

TEST_CASE("frame identity inside the truncated space")
{
    const auto d = frame_identity_defect(0.5, 0.1, 0.2, 60);
    CHECK(d.interior_levels >= 5);
    CHECK(d.defect <= 1e-6);
    for (const auto& [r, nf] : {std::pair{0.25, 60}, std::pair{0.5, 60}, std::pair{1.0, 200}}) {
        const auto e = frame_identity_defect(r, 0.1, 0.0, nf);
        CHECK(e.interior_levels >= 5);
        CHECK(e.defect <= 1e-6);
    }
}

TEST_CASE("squeeze unitary")
{
    const HilbertSpec hs(60);
    CHECK(max_abs(squeeze_unitary(0.0, hs).matrix() - Matrix::Identity(120, 120)) == 0.0);
    const Operator u = squeeze_unitary(1.25, hs);
    CHECK(max_abs((u * squeeze_unitary(-1.25, hs)).matrix() - Matrix::Identity(120, 120)) <= 1e-10);
    CHECK(max_abs(u.matrix() * u.matrix().adjoint() - Matrix::Identity(120, 120)) <= 1e-8);

    // The squeezed vacuum at r = 1.25 needs about 110 Fock levels.
    const HilbertSpec wide(140);
    const StateVector sq = squeeze_unitary(1.25, wide) * StateVector::basis(wide, 0, qubit_index::down);
    const CompositeOperators ops(wide);
    CHECK(inner(sq, ops.n * sq).real() == doctest::Approx(2.5664).epsilon(1e-4));
    CHECK(inner(sq, ops.n * sq).real() == doctest::Approx(std::pow(std::sinh(1.25), 2)).epsilon(1e-10));

    Warnings w;
    squeeze_unitary(1.25, HilbertSpec(12), &w);
    REQUIRE(w.size() == 1);
    CHECK(w[0].code == "squeeze-cutoff");
    CHECK(w[0].value == doctest::Approx(squeezed_vacuum_tail(1.25, 12)));
    w.clear();
    squeeze_unitary(1.25, wide, &w);
    CHECK(w.empty());
}

TEST_CASE("squeezed vacuum tail matches the numerical distribution")
{
    for (double r : {0.3, 0.8, 1.25}) {
        const HilbertSpec hs(80);
        const StateVector sq = squeeze_unitary(r, hs) * StateVector::basis(hs, 0, qubit_index::down);
        for (int cutoff : {10, 16, 24, 32}) {
            double tail = 0.0;
            for (int n = cutoff - 2; n < 80; ++n)
                tail += std::norm(sq.amplitudes()[hs.index(n, qubit_index::down)]);
            REQUIRE(squeezed_vacuum_tail(r, cutoff) == doctest::Approx(tail).epsilon(1e-6).scale(1e-30));
        }
    }
}

TEST_CASE("moving states into and out of the squeezed frame")
{
    testgen::Gen gen(25);
    const HilbertSpec small(8);
    const StateVector psi = gen.state(Space::composite(small));
    CHECK((to_squeezed_frame(psi, 0.0).amplitudes() - psi.amplitudes()).norm() == 0.0);

    const HilbertSpec hs(60);
    const StateVector phi = cat_target(0.8, hs);
    CHECK((from_squeezed_frame(to_squeezed_frame(phi, 1.25), 1.25).amplitudes() - phi.amplitudes()).norm() <= 1e-9);
    const DensityMatrix rho = DensityMatrix::pure(phi);
    CHECK(max_abs(from_squeezed_frame(to_squeezed_frame(rho, 0.7), 0.7).matrix() - rho.matrix()) <= 1e-9);

    const StateVector vac = StateVector::basis(hs, 0, qubit_index::down);
    const StateVector lab = from_squeezed_frame(vac, 1.25);
    CHECK(overlap(to_squeezed_frame(lab, 1.25), vac) >= 1.0 - 1e-8);
}
