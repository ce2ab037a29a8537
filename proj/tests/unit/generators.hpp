#pragma once

// Seeded random inputs for property tests. Box-Muller on top of a 64-bit
// Mersenne Twister so the draws do not depend on the standard library's
// distribution implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "synthcoupling/operators.hpp"

namespace testgen {

using namespace synthcoupling;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0)
    {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)) % (hi - lo + 1); }

    double normal()
    {
        const double u1 = uniform(1e-300, 1.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    cplx complex_normal() { return {normal(), normal()}; }

    Matrix matrix(int d)
    {
        Matrix m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                m(i, j) = complex_normal();
        return m;
    }

    Matrix hermitian(int d)
    {
        const Matrix m = matrix(d);
        return 0.5 * (m + m.adjoint());
    }

    Matrix unitary(int d)
    {
        Eigen::HouseholderQR<Matrix> qr(matrix(d));
        return qr.householderQ();
    }

    Vector vector(int d)
    {
        Vector v(d);
        for (int i = 0; i < d; ++i)
            v[i] = complex_normal();
        return v.normalized();
    }

    StateVector state(Space space) { return StateVector(vector(space.dim()), space); }

    DensityMatrix density(Space space)
    {
        const Matrix g = matrix(space.dim());
        Matrix rho = g * g.adjoint();
        rho /= rho.trace();
        return DensityMatrix(rho, space);
    }

private:
    std::mt19937_64 engine_;
};

inline double max_abs(const Matrix& m)
{
    return m.cwiseAbs().maxCoeff();
}

} // namespace testgen
