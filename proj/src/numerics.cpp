#include "lsmkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lsm {
namespace {

constexpr double kJacobiTol = 1e-13;
constexpr int kMaxSweeps = 64;

// One-sided Jacobi on an m x n matrix with m >= n: orthogonalizes columns of
// w in place, accumulating the right rotations into v.
void jacobi_orthogonalize(CMatrix& w, CMatrix& v) {
    const std::size_t n = w.cols();
    std::vector<double> colsq(n);
    auto refresh = [&] {
        for (std::size_t j = 0; j < n; ++j) colsq[j] = std::real(cdot(w.col(j), w.col(j)));
    };
    refresh();

    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        // Columns whose norm has collapsed to roundoff of the largest column
        // are numerically zero; rotating against them livelocks on
        // rank-deficient input.
        double max_colsq = 0.0;
        for (double v : colsq) max_colsq = std::max(max_colsq, v);
        const double zero_floor = max_colsq * 1e-30;

        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double app = colsq[p], aqq = colsq[q];
                if (app <= zero_floor || aqq <= zero_floor) continue;
                auto wp = w.col(p), wq = w.col(q);
                const cplx apq = cdot(wp, wq);
                const double mag = std::abs(apq);
                if (mag <= kJacobiTol * std::sqrt(app * aqq)) continue;
                rotated = true;

                const cplx phase = apq / mag; // e^{i phi}
                const double zeta = (aqq - app) / (2.0 * mag);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const cplx qscale = std::conj(phase); // de-phases column q

                auto vp = v.col(p), vq = v.col(q);
                for (std::size_t i = 0; i < w.rows(); ++i) {
                    const cplx xi = wp[i], yi = qscale * wq[i];
                    wp[i] = c * xi - s * yi;
                    wq[i] = s * xi + c * yi;
                }
                for (std::size_t i = 0; i < v.rows(); ++i) {
                    const cplx xi = vp[i], yi = qscale * vq[i];
                    vp[i] = c * xi - s * yi;
                    vq[i] = s * xi + c * yi;
                }
                colsq[p] = c * c * app + s * s * aqq - 2.0 * c * s * mag;
                colsq[q] = s * s * app + c * c * aqq + 2.0 * c * s * mag;
            }
        }
        if (!rotated) return;
        refresh(); // cached norms drift over a sweep
    }
    throw NumericalError("svd: Jacobi sweeps did not converge after " +
                         std::to_string(kMaxSweeps) + " sweeps (n=" + std::to_string(n) + ")");
}

} // namespace

std::size_t SvdResult::rank_eps(double rel_tol) const {
    if (sigma.empty() || sigma.front() == 0.0) return 0;
    std::size_t r = 0;
    for (double s : sigma)
        if (s > rel_tol * sigma.front()) ++r;
    return r;
}

SvdResult svd(const CMatrix& a) {
    for (const cplx& x : a.data())
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            throw NumericalError("svd: non-finite entry in input");

    if (a.rows() < a.cols()) {
        SvdResult t = svd(a.adjoint());
        return {std::move(t.v), std::move(t.sigma), std::move(t.u)};
    }

    const std::size_t m = a.rows(), n = a.cols();
    CMatrix w = a;
    CMatrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    jacobi_orthogonalize(w, v);

    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) sig[j] = norm2(w.col(j));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

    SvdResult out;
    out.u = CMatrix(m, n);
    out.v = CMatrix(n, n);
    out.sigma.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = sig[src];
        auto wc = w.col(src);
        auto vc = v.col(src);
        auto uc = out.u.col(j);
        auto oc = out.v.col(j);
        if (sig[src] > 0.0) {
            const double inv = 1.0 / sig[src];
            for (std::size_t i = 0; i < m; ++i) uc[i] = wc[i] * inv;
        }
        for (std::size_t i = 0; i < n; ++i) oc[i] = vc[i];

        // Phase convention: largest-magnitude entry of u_j real positive.
        std::size_t imax = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double mag = std::abs(uc[i]);
            if (mag > best) {
                best = mag;
                imax = i;
            }
        }
        if (best > 0.0) {
            const cplx rot = std::conj(uc[imax]) / best;
            for (std::size_t i = 0; i < m; ++i) uc[i] *= rot;
            for (std::size_t i = 0; i < n; ++i) oc[i] *= rot;
        }
    }
    return out;
}

CVector tikhonov_solve(const SvdResult& s, std::span<const cplx> b, double alpha) {
    if (b.size() != s.u.rows()) throw NumericalError("tikhonov_solve: dimension mismatch");
    if (!(alpha > 0.0)) throw std::invalid_argument("tikhonov_solve: alpha must be > 0");
    const std::size_t r = s.sigma.size();
    CVector g(s.v.rows(), cplx{0.0, 0.0});
    for (std::size_t j = 0; j < r; ++j) {
        const double sj = s.sigma[j];
        if (sj == 0.0) continue;
        const cplx beta = cdot(s.u.col(j), b);
        const cplx coef = (sj / (sj * sj + alpha * alpha)) * beta;
        auto vc = s.v.col(j);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += coef * vc[i];
    }
    return g;
}

double tikhonov_residual_norm(const SvdResult& s, std::span<const cplx> b, double alpha) {
    if (b.size() != s.u.rows()) throw NumericalError("tikhonov_residual_norm: dimension mismatch");
    double in_range = 0.0, proj_sq = 0.0;
    for (std::size_t j = 0; j < s.sigma.size(); ++j) {
        const double sj = s.sigma[j];
        const double beta_sq = std::norm(cdot(s.u.col(j), b));
        proj_sq += beta_sq;
        const double filt = alpha * alpha / (sj * sj + alpha * alpha);
        in_range += filt * filt * beta_sq;
    }
    double b_sq = 0.0;
    for (const cplx& x : b) b_sq += std::norm(x);
    const double out_of_range = std::max(0.0, b_sq - proj_sq);
    return std::sqrt(in_range + out_of_range);
}

std::string LCurveResult::to_csv() const {
    std::ostringstream ss;
    ss << "alpha,residual_norm,solution_norm,curvature\n";
    ss.precision(17);
    for (const auto& p : curve)
        ss << p.alpha << ',' << p.residual_norm << ',' << p.solution_norm << ',' << p.curvature
           << '\n';
    return ss.str();
}

LCurveResult l_curve_alpha(const SvdResult& s, std::span<const cplx> b,
                           std::span<const double> alpha_grid) {
    if (alpha_grid.size() < 8)
        throw ValidationError("l_curve_alpha: need at least 8 alpha candidates");
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        if (!(alpha_grid[i] > 0.0)) throw ValidationError("l_curve_alpha: alphas must be > 0");
        if (i > 0 && alpha_grid[i] <= alpha_grid[i - 1])
            throw ValidationError("l_curve_alpha: alphas must be strictly ascending");
    }
    if (alpha_grid.back() / alpha_grid.front() < 1e6)
        throw ValidationError("l_curve_alpha: grid must span at least 6 decades");

    LCurveResult res;
    res.curve.resize(alpha_grid.size());
    std::vector<double> lr(alpha_grid.size()), ls(alpha_grid.size()), lt(alpha_grid.size());
    bool finite_logs = true;
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        auto& pt = res.curve[i];
        pt.alpha = alpha_grid[i];
        pt.residual_norm = tikhonov_residual_norm(s, b, pt.alpha);
        pt.solution_norm = norm2(tikhonov_solve(s, b, pt.alpha));
        lr[i] = std::log(pt.residual_norm);
        ls[i] = std::log(pt.solution_norm);
        lt[i] = std::log(pt.alpha);
        if (!std::isfinite(lr[i]) || !std::isfinite(ls[i])) finite_logs = false;
    }

    // Residuals below the numerical consistency floor (sqrt(eps) scale of the
    // SVD residual formula, with margin) are roundoff plateaus; a corner there
    // would be a floating-point artifact, not a feature of the problem.
    double b_norm = 0.0;
    for (const cplx& x : b) b_norm += std::norm(x);
    const double residual_floor = 1e-6 * std::sqrt(b_norm);

    double best_kappa = 0.0;
    std::size_t best = 0;
    bool found = false;
    if (finite_logs) {
        for (std::size_t i = 1; i + 1 < alpha_grid.size(); ++i) {
            if (res.curve[i].residual_norm < residual_floor) continue;
            const double h1 = lt[i] - lt[i - 1], h2 = lt[i + 1] - lt[i];
            const double denom = h1 * h2 * (h1 + h2);
            const double xd = (lr[i + 1] * h1 * h1 - lr[i - 1] * h2 * h2 +
                               lr[i] * (h2 * h2 - h1 * h1)) / denom;
            const double yd = (ls[i + 1] * h1 * h1 - ls[i - 1] * h2 * h2 +
                               ls[i] * (h2 * h2 - h1 * h1)) / denom;
            const double xdd = 2.0 * (lr[i - 1] * h2 + lr[i + 1] * h1 - lr[i] * (h1 + h2)) / denom;
            const double ydd = 2.0 * (ls[i - 1] * h2 + ls[i + 1] * h1 - ls[i] * (h1 + h2)) / denom;
            const double speed = std::pow(xd * xd + yd * yd, 1.5);
            if (speed == 0.0) continue;
            const double kappa = (xd * ydd - xdd * yd) / speed;
            res.curve[i].curvature = kappa;
            if (std::isfinite(kappa) && kappa > best_kappa) {
                best_kappa = kappa;
                best = i;
                found = true;
            }
        }
    }

    if (found) {
        res.alpha = alpha_grid[best];
        return res;
    }

    // Monotone / degenerate curve: no convex corner. Fall back near
    // sigma_max * 1e-4.
    res.degenerate = true;
    const double target = (s.sigma.empty() ? 1e-4 : s.sigma.front() * 1e-4);
    std::size_t pick = 0;
    double bestdist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        const double d = std::abs(std::log(alpha_grid[i]) - std::log(target));
        if (d < bestdist) {
            bestdist = d;
            pick = i;
        }
    }
    res.alpha = alpha_grid[pick];
    return res;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                    static_cast<double>(count - 1));
    return out;
}

} // namespace lsm
