#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>

#include "sqspec/errors.hpp"

namespace sqspec {

using Complex = std::complex<double>;

namespace detail {

// std::conj(double) would promote to complex; keep real scalars real.
template <typename Scalar>
constexpr Scalar conjugate(const Scalar& x) {
    if constexpr (std::is_floating_point_v<Scalar>) {
        return x;
    } else {
        return std::conj(x);
    }
}

}  // namespace detail

/// Dense square matrix of fixed dimension, row-major storage. Everything is a
/// value; arithmetic returns fresh matrices.
template <std::size_t Dim, typename Scalar = Complex>
class SquareMatrix {
public:
    static constexpr std::size_t dim = Dim;

    constexpr SquareMatrix() : entries_{} {}

    static constexpr SquareMatrix zero() { return SquareMatrix{}; }

    static constexpr SquareMatrix identity() {
        SquareMatrix m;
        for (std::size_t i = 0; i < Dim; ++i) m(i, i) = Scalar(1);
        return m;
    }

    constexpr Scalar& operator()(std::size_t row, std::size_t col) {
        return entries_[row * Dim + col];
    }
    constexpr const Scalar& operator()(std::size_t row, std::size_t col) const {
        return entries_[row * Dim + col];
    }

    SquareMatrix& operator+=(const SquareMatrix& other) {
        for (std::size_t k = 0; k < Dim * Dim; ++k) entries_[k] += other.entries_[k];
        return *this;
    }
    SquareMatrix& operator-=(const SquareMatrix& other) {
        for (std::size_t k = 0; k < Dim * Dim; ++k) entries_[k] -= other.entries_[k];
        return *this;
    }
    SquareMatrix& operator*=(const Scalar& factor) {
        for (auto& e : entries_) e *= factor;
        return *this;
    }

    friend SquareMatrix operator+(SquareMatrix lhs, const SquareMatrix& rhs) { return lhs += rhs; }
    friend SquareMatrix operator-(SquareMatrix lhs, const SquareMatrix& rhs) { return lhs -= rhs; }
    friend SquareMatrix operator*(SquareMatrix lhs, const Scalar& factor) { return lhs *= factor; }
    friend SquareMatrix operator*(const Scalar& factor, SquareMatrix rhs) { return rhs *= factor; }

    friend SquareMatrix operator-(const SquareMatrix& m) {
        SquareMatrix out;
        for (std::size_t k = 0; k < Dim * Dim; ++k) out.entries_[k] = -m.entries_[k];
        return out;
    }

    friend SquareMatrix operator*(const SquareMatrix& lhs, const SquareMatrix& rhs) {
        SquareMatrix out;
        for (std::size_t i = 0; i < Dim; ++i) {
            for (std::size_t k = 0; k < Dim; ++k) {
                const Scalar a = lhs(i, k);
                if (a == Scalar(0)) continue;
                for (std::size_t j = 0; j < Dim; ++j) out(i, j) += a * rhs(k, j);
            }
        }
        return out;
    }

    SquareMatrix transpose() const {
        SquareMatrix out;
        for (std::size_t i = 0; i < Dim; ++i)
            for (std::size_t j = 0; j < Dim; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    /// Conjugate transpose.
    SquareMatrix adjoint() const {
        SquareMatrix out;
        for (std::size_t i = 0; i < Dim; ++i)
            for (std::size_t j = 0; j < Dim; ++j) out(j, i) = detail::conjugate((*this)(i, j));
        return out;
    }

    Scalar trace() const {
        Scalar t{};
        for (std::size_t i = 0; i < Dim; ++i) t += (*this)(i, i);
        return t;
    }

    /// Largest entry magnitude (entrywise max norm).
    double max_abs() const {
        double m = 0.0;
        for (const auto& e : entries_) m = std::max(m, std::abs(e));
        return m;
    }

    /// Maximum absolute row sum (operator infinity norm).
    double inf_norm() const {
        double best = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < Dim; ++j) row += std::abs((*this)(i, j));
            best = std::max(best, row);
        }
        return best;
    }

private:
    std::array<Scalar, Dim * Dim> entries_;
};

template <std::size_t Dim, typename Scalar = Complex>
using Vector = std::array<Scalar, Dim>;

template <std::size_t Dim, typename Scalar>
Vector<Dim, Scalar> operator*(const SquareMatrix<Dim, Scalar>& m, const Vector<Dim, Scalar>& v) {
    Vector<Dim, Scalar> out{};
    for (std::size_t i = 0; i < Dim; ++i) {
        Scalar acc{};
        for (std::size_t j = 0; j < Dim; ++j) acc += m(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

/// Kronecker product; index blocks follow the left factor.
template <std::size_t DimA, std::size_t DimB, typename Scalar>
SquareMatrix<DimA * DimB, Scalar> kron(const SquareMatrix<DimA, Scalar>& a,
                                       const SquareMatrix<DimB, Scalar>& b) {
    SquareMatrix<DimA * DimB, Scalar> out;
    for (std::size_t ia = 0; ia < DimA; ++ia)
        for (std::size_t ja = 0; ja < DimA; ++ja)
            for (std::size_t ib = 0; ib < DimB; ++ib)
                for (std::size_t jb = 0; jb < DimB; ++jb)
                    out(ia * DimB + ib, ja * DimB + jb) = a(ia, ja) * b(ib, jb);
    return out;
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
/// Throws SingularSystem when no usable pivot remains.
template <std::size_t Dim, typename Scalar>
Vector<Dim, Scalar> solve_linear(SquareMatrix<Dim, Scalar> a, Vector<Dim, Scalar> b) {
    for (std::size_t col = 0; col < Dim; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a(col, col));
        for (std::size_t row = col + 1; row < Dim; ++row) {
            const double cand = std::abs(a(row, col));
            if (cand > best) {
                best = cand;
                pivot = row;
            }
        }
        if (best < 1e-300) {
            throw Error(ErrorCode::SingularSystem, "linear solve found no usable pivot");
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < Dim; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        const Scalar inv = Scalar(1) / a(col, col);
        for (std::size_t row = col + 1; row < Dim; ++row) {
            const Scalar factor = a(row, col) * inv;
            if (factor == Scalar(0)) continue;
            a(row, col) = Scalar(0);
            for (std::size_t j = col + 1; j < Dim; ++j) a(row, j) -= factor * a(col, j);
            b[row] -= factor * b[col];
        }
    }
    Vector<Dim, Scalar> x{};
    for (std::size_t i = Dim; i-- > 0;) {
        Scalar acc = b[i];
        for (std::size_t j = i + 1; j < Dim; ++j) acc -= a(i, j) * x[j];
        x[i] = acc / a(i, i);
    }
    return x;
}

/// Matrix exponential by scaling and squaring around a fixed-order Taylor
/// polynomial. The argument is halved until its norm is at most 1/2, the
/// order-20 polynomial is evaluated by Horner's rule, and the halvings are
/// undone by repeated squaring. At order 20 the truncation error of the
/// scaled polynomial is below 1e-26, so accuracy is set by the squarings.
template <std::size_t Dim, typename Scalar>
SquareMatrix<Dim, Scalar> expm(const SquareMatrix<Dim, Scalar>& arg) {
    constexpr int kTaylorOrder = 20;
    constexpr double kScaleThreshold = 0.5;

    const double norm = arg.inf_norm();
    int squarings = 0;
    if (norm > kScaleThreshold) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / kScaleThreshold)));
    }
    SquareMatrix<Dim, Scalar> scaled = arg;
    scaled *= Scalar(std::ldexp(1.0, -squarings));

    const auto eye = SquareMatrix<Dim, Scalar>::identity();
    SquareMatrix<Dim, Scalar> result = eye;
    for (int k = kTaylorOrder; k >= 1; --k) {
        result = eye + scaled * result * Scalar(1.0 / k);
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

}  // namespace sqspec
