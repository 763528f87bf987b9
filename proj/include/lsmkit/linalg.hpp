#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "lsmkit/util.hpp"

namespace lsm {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

// Dense complex matrix, column-major. Column j is contiguous, which is what
// both the scattering-matrix layout (one column per transmitter) and the
// one-sided Jacobi SVD want.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

    std::span<cplx> col(std::size_t c) { return {data_.data() + c * rows_, rows_}; }
    std::span<const cplx> col(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }

    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }

    CMatrix adjoint() const;

    double frobenius_norm() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

// <a, b> with the conjugate on the first argument: a^H b.
cplx cdot(std::span<const cplx> a, std::span<const cplx> b);

double norm2(std::span<const cplx> v);

CVector matvec(const CMatrix& a, std::span<const cplx> x);

// y = A^H x
CVector matvec_adjoint(const CMatrix& a, std::span<const cplx> x);

CMatrix matmul(const CMatrix& a, const CMatrix& b);

// Dense LU with partial pivoting. Factorization is reusable across
// right-hand sides (one factorization per MoM system, many transmitters).
struct LuFactors {
    CMatrix lu;
    std::vector<std::size_t> perm;
};

// Throws NumericalError on a (numerically) singular pivot.
LuFactors lu_factor(CMatrix a);

CVector lu_solve(const LuFactors& f, CVector b);

} // namespace lsm
