#pragma once

#include <span>
#include <string>
#include <vector>

#include "lsmkit/linalg.hpp"

namespace lsm {

// Thin SVD, singular values descending. Columns of u/v are orthonormal;
// the phase of each pair is fixed so the largest-magnitude entry of u_n is
// real and positive, which makes decompositions reproducible.
struct SvdResult {
    CMatrix u;                  // m x r
    std::vector<double> sigma;  // r, descending, >= 0
    CMatrix v;                  // n x r

    std::size_t rank_eps(double rel_tol = 1e-12) const;
};

// One-sided Jacobi on the shorter dimension. Deterministic cyclic sweeps;
// throws NumericalError if the sweep cap is hit before convergence.
SvdResult svd(const CMatrix& a);

// Tikhonov filter-factor solution: sum_n sigma/(sigma^2 + alpha^2) <b,u_n> v_n.
CVector tikhonov_solve(const SvdResult& s, std::span<const cplx> b, double alpha);

// ||A g - b|| for the Tikhonov solution at alpha, evaluated from the SVD alone
// (includes the component of b outside the range of A).
double tikhonov_residual_norm(const SvdResult& s, std::span<const cplx> b, double alpha);

struct LCurvePoint {
    double alpha = 0.0;
    double residual_norm = 0.0;
    double solution_norm = 0.0;
    double curvature = 0.0;
};

struct LCurveResult {
    double alpha = 0.0;
    bool degenerate = false; // no corner found; alpha is the fallback
    std::vector<LCurvePoint> curve;

    std::string to_csv() const; // alpha,residual_norm,solution_norm,curvature
};

// Maximum-curvature corner of (log residual, log solution) over the candidate
// grid. Candidates must be positive and ascending; at least 8 spanning >= 6
// decades. Degenerate curves fall back to the alpha closest to sigma_max*1e-4.
LCurveResult l_curve_alpha(const SvdResult& s, std::span<const cplx> b,
                           std::span<const double> alpha_grid);

// Log-spaced grid helper for the CLI and tests.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

} // namespace lsm
