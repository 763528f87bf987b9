#include "lsmkit/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace lsm {

CMatrix CMatrix::adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t c = 0; c < cols_; ++c)
        for (std::size_t r = 0; r < rows_; ++r) out(c, r) = std::conj((*this)(r, c));
    return out;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const cplx& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

CVector matvec(const CMatrix& a, std::span<const cplx> x) {
    CVector y(a.rows(), cplx{0.0, 0.0});
    for (std::size_t c = 0; c < a.cols(); ++c) {
        const cplx xc = x[c];
        auto col = a.col(c);
        for (std::size_t r = 0; r < a.rows(); ++r) y[r] += col[r] * xc;
    }
    return y;
}

CVector matvec_adjoint(const CMatrix& a, std::span<const cplx> x) {
    CVector y(a.cols());
    for (std::size_t c = 0; c < a.cols(); ++c) y[c] = cdot(a.col(c), x);
    return y;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx bkj = b(k, j);
            if (bkj == cplx{0.0, 0.0}) continue;
            auto acol = a.col(k);
            auto ocol = out.col(j);
            for (std::size_t r = 0; r < a.rows(); ++r) ocol[r] += acol[r] * bkj;
        }
    }
    return out;
}

LuFactors lu_factor(CMatrix a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw NumericalError("lu_factor: matrix must be square");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            const double m = std::abs(a(r, k));
            if (m > best) {
                best = m;
                piv = r;
            }
        }
        if (best == 0.0)
            throw NumericalError("lu_factor: singular system at column " + std::to_string(k));
        if (piv != k) {
            std::swap(perm[k], perm[piv]);
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
        }
        const cplx inv_pivot = 1.0 / a(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const cplx l = a(r, k) * inv_pivot;
            a(r, k) = l;
            if (l == cplx{0.0, 0.0}) continue;
            for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= l * a(k, c);
        }
    }
    return {std::move(a), std::move(perm)};
}

CVector lu_solve(const LuFactors& f, CVector b) {
    const std::size_t n = f.lu.rows();
    if (b.size() != n) throw NumericalError("lu_solve: dimension mismatch");
    CVector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = b[f.perm[i]];
    // forward substitution (unit lower)
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) y[i] -= f.lu(i, j) * y[j];
    // back substitution
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) y[i] -= f.lu(i, j) * y[j];
        y[i] /= f.lu(i, i);
    }
    return y;
}

} // namespace lsm
