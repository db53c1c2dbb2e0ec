#pragma once

#include <cmath>

#include "sqspec/atomic_algebra.hpp"
#include "sqspec/errors.hpp"
#include "sqspec/matrix.hpp"

namespace sqspec {

/// Atomic state. Construction checks the defining properties: Hermitian to
/// 1e-12 entrywise, unit trace to 1e-12, eigenvalues above -1e-10.
class DensityMatrix {
public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kEigenvalueFloor = -1e-10;

    static DensityMatrix from_matrix(const SquareMatrix<2>& m) {
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                if (std::abs(m(i, j) - std::conj(m(j, i))) > kHermitianTol) {
                    throw Error(ErrorCode::InvalidDensityMatrix, "matrix is not Hermitian");
                }
            }
        }
        if (std::abs(m.trace() - Complex(1.0)) > kTraceTol) {
            throw Error(ErrorCode::InvalidDensityMatrix, "trace differs from one");
        }
        if (min_eigenvalue(m) < kEigenvalueFloor) {
            throw Error(ErrorCode::InvalidDensityMatrix, "matrix has a negative eigenvalue");
        }
        return DensityMatrix(m);
    }

    /// diag(upper, 1 - upper); upper must lie in [0, 1].
    static DensityMatrix diagonal(double upper_population) {
        SquareMatrix<2> m;
        m(0, 0) = upper_population;
        m(1, 1) = 1.0 - upper_population;
        return from_matrix(m);
    }

    static DensityMatrix pure_upper() { return diagonal(1.0); }
    static DensityMatrix pure_lower() { return diagonal(0.0); }

    const SquareMatrix<2>& matrix() const { return matrix_; }

    /// Occupation of the upper level |a>.
    double upper_population() const { return matrix_(0, 0).real(); }
    double lower_population() const { return matrix_(1, 1).real(); }

    /// Smaller eigenvalue of the Hermitian part of m.
    static double min_eigenvalue(const SquareMatrix<2>& m) {
        const double d00 = m(0, 0).real();
        const double d11 = m(1, 1).real();
        const Complex off = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
        const double mean = 0.5 * (d00 + d11);
        const double radius = std::sqrt(0.25 * (d00 - d11) * (d00 - d11) + std::norm(off));
        return mean - radius;
    }

private:
    explicit DensityMatrix(const SquareMatrix<2>& m) : matrix_(m) {}

    SquareMatrix<2> matrix_;
};

/// Tr(A rho).
inline Complex expectation(const AtomOperator& op, const DensityMatrix& rho) {
    return (op * rho.matrix()).trace();
}

}  // namespace sqspec
