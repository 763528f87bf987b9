#include "lsmkit/inversion.hpp"

#include <cmath>
#include <mutex>

namespace lsm {

const char* method_name(Method m) {
    switch (m) {
        case Method::LsmSingle: return "LSM_single";
        case Method::MlsmParallel: return "MLSM_parallel";
        case Method::MfMlsm: return "MF_MLSM";
    }
    return "?";
}

const char* mf_mode_name(MfMode m) {
    switch (m) {
        case MfMode::Filtered: return "filtered";
        case MfMode::Stacked: return "stacked";
        case MfMode::PhaseCorrected: return "phase_corrected";
    }
    return "?";
}

namespace {

double capped_inverse_sq(const CVector& g, double cap) {
    double n2 = 0.0;
    for (const cplx& v : g) n2 += std::norm(v);
    if (n2 <= 0.0) return 0.0; // zero-projected data marks nothing
    return std::min(cap, 1.0 / n2);
}

bool dataset_is_zero(const ScatteringDataset& ds, std::size_t f_index) {
    for (const cplx& v : ds.matrices[f_index].data())
        if (v != cplx{0.0, 0.0}) return false;
    return true;
}

} // namespace

InversionContext::InversionContext(const ScatteringDataset& dataset, const AntennaRing& ring,
                                   const DoiGrid& grid, double indicator_cap)
    : dataset_(&dataset), grid_(grid), cap_(indicator_cap) {
    dataset.check_consistent();
    rx_positions_.reserve(dataset.aperture.rx_indices.size());
    for (std::size_t idx : dataset.aperture.rx_indices) {
        if (idx >= ring.count)
            throw ValidationError("inversion: dataset receiver index outside the ring");
        rx_positions_.push_back(ring.position(idx));
    }
    svds_.reserve(dataset.n_freq());
    for (std::size_t k = 0; k < dataset.n_freq(); ++k) svds_.push_back(svd(dataset.matrices[k]));
}

CVector InversionContext::greens(std::size_t pixel, std::size_t f_index) const {
    return greens_vector(grid_.pixel_center(pixel), rx_positions_,
                         dataset_->frequencies[f_index]);
}

PixelSolve lsm_single(const InversionContext& ctx, std::size_t f_index, std::size_t pixel,
                      double alpha) {
    if (f_index >= ctx.dataset().n_freq())
        throw ValidationError("lsm_single: frequency index out of range");
    PixelSolve out;
    out.pixel = pixel;
    out.f_index = f_index;
    const CVector rhs = ctx.greens(pixel, f_index);
    const SvdResult& s = ctx.svd_at(f_index);
    if (s.sigma.empty() || s.sigma.front() == 0.0) {
        // F_k = 0: no data, no scatterer anywhere.
        out.g.assign(ctx.dataset().n_tx, cplx{0.0, 0.0});
        out.residual_norm = norm2(rhs);
        return out;
    }
    out.g = tikhonov_solve(s, rhs, alpha);
    out.residual_norm = tikhonov_residual_norm(s, rhs, alpha);
    return out;
}

double mlsm_parallel(const InversionContext& ctx, std::size_t pixel, double alpha) {
    const double cap = ctx.indicator_cap();
    double sum = 0.0;
    for (std::size_t k = 0; k < ctx.dataset().n_freq(); ++k) {
        const PixelSolve ps = lsm_single(ctx, k, pixel, alpha);
        sum += capped_inverse_sq(ps.g, cap);
    }
    return std::min(cap, std::sqrt(sum));
}

MatchedFilterRow matched_filter_row(const InversionContext& ctx, std::size_t f_index,
                                    std::size_t pixel) {
    MatchedFilterRow out;
    const CVector g = ctx.greens(pixel, f_index);
    out.row = matvec_adjoint(ctx.dataset().matrices[f_index], g);
    double gain = 0.0;
    for (const cplx& v : g) gain += std::norm(v);
    out.gain = gain;
    return out;
}

namespace {

// Matched filter per frequency, then the parallel combination: each filtered
// equation (row_k / gain_k) g = 1 is a 1 x N_Tx system whose Tikhonov
// solution norm is y/(y^2 + alpha^2) with y = ||row_k|| / gain_k (the closed
// form of the generic SVD path, asserted equal in the tests).
double mf_mlsm_filtered(const InversionContext& ctx, std::size_t pixel, double alpha) {
    const ScatteringDataset& ds = ctx.dataset();
    const double cap = ctx.indicator_cap();
    double sum = 0.0;
    for (std::size_t k = 0; k < ds.n_freq(); ++k) {
        const MatchedFilterRow mf = matched_filter_row(ctx, k, pixel);
        if (mf.gain <= 0.0) continue;
        double row_sq = 0.0;
        for (const cplx& v : mf.row) row_sq += std::norm(v);
        const double y = std::sqrt(row_sq) / mf.gain;
        if (y <= 0.0) continue; // zero filtered data marks nothing
        const double g_norm = y / (y * y + alpha * alpha);
        sum += std::min(cap, 1.0 / (g_norm * g_norm));
    }
    return std::min(cap, std::sqrt(sum));
}

double mf_mlsm_stacked(const InversionContext& ctx, std::size_t pixel, double alpha) {
    const ScatteringDataset& ds = ctx.dataset();
    CMatrix m(ds.n_freq(), ds.n_tx);
    for (std::size_t k = 0; k < ds.n_freq(); ++k) {
        const MatchedFilterRow mf = matched_filter_row(ctx, k, pixel);
        const double inv_gain = mf.gain > 0.0 ? 1.0 / mf.gain : 0.0;
        for (std::size_t c = 0; c < ds.n_tx; ++c) m(k, c) = mf.row[c] * inv_gain;
    }
    if (m.frobenius_norm() == 0.0) return 0.0;
    const CVector ones(ds.n_freq(), cplx{1.0, 0.0});
    const CVector g = tikhonov_solve(svd(m), ones, alpha);
    return capped_inverse_sq(g, ctx.indicator_cap());
}

// Alternative reading of the matched filter: remove the pixel-to-receiver
// propagation phase e^{-j 2 pi d f_k / c} from data and Green's vector, then
// combine per-frequency solutions the plain parallel way. Kept for
// comparison; the correction is a row-wise unitary that cancels inside the
// Tikhonov solve, so this coincides numerically with plain MLSM.
double mf_mlsm_phase_corrected(const InversionContext& ctx, std::size_t pixel, double alpha) {
    const ScatteringDataset& ds = ctx.dataset();
    const double cap = ctx.indicator_cap();
    const Point2 px = ctx.grid().pixel_center(pixel);
    double sum = 0.0;
    for (std::size_t k = 0; k < ds.n_freq(); ++k) {
        if (dataset_is_zero(ds, k)) continue;
        const double kw = wavenumber(ds.frequencies[k]);
        CVector rhs = ctx.greens(pixel, k);
        CMatrix corrected = ds.matrices[k];
        for (std::size_t r = 0; r < corrected.rows(); ++r) {
            const double d = distance(ctx.rx_position(r), px);
            const cplx phase{std::cos(kw * d), std::sin(kw * d)}; // e^{+j k d}
            rhs[r] *= phase;
            for (std::size_t c = 0; c < corrected.cols(); ++c) corrected(r, c) *= phase;
        }
        const CVector g = tikhonov_solve(svd(corrected), rhs, alpha);
        sum += capped_inverse_sq(g, cap);
    }
    return std::min(cap, std::sqrt(sum));
}

} // namespace

double mf_mlsm(const InversionContext& ctx, std::size_t pixel, double alpha, MfMode mode) {
    switch (mode) {
        case MfMode::Filtered: return mf_mlsm_filtered(ctx, pixel, alpha);
        case MfMode::Stacked: return mf_mlsm_stacked(ctx, pixel, alpha);
        case MfMode::PhaseCorrected: return mf_mlsm_phase_corrected(ctx, pixel, alpha);
    }
    return 0.0;
}

double select_alpha_l_curve(const InversionContext& ctx, Method method,
                            std::span<const double> alpha_grid, MfMode mode) {
    const DoiGrid& grid = ctx.grid();
    const std::size_t center =
        (grid.side_pixels / 2) * grid.side_pixels + grid.side_pixels / 2;

    if (method == Method::MfMlsm && mode != MfMode::PhaseCorrected) {
        const ScatteringDataset& ds = ctx.dataset();
        if (mode == MfMode::Stacked) {
            CMatrix m(ds.n_freq(), ds.n_tx);
            for (std::size_t k = 0; k < ds.n_freq(); ++k) {
                const MatchedFilterRow mf = matched_filter_row(ctx, k, center);
                const double inv_gain = mf.gain > 0.0 ? 1.0 / mf.gain : 0.0;
                for (std::size_t c = 0; c < ds.n_tx; ++c) m(k, c) = mf.row[c] * inv_gain;
            }
            const CVector ones(ds.n_freq(), cplx{1.0, 0.0});
            return l_curve_alpha(svd(m), ones, alpha_grid).alpha;
        }
        // Filtered: corner of each 1 x N_Tx row system, combined geometrically.
        double log_sum = 0.0;
        std::size_t used = 0;
        for (std::size_t k = 0; k < ds.n_freq(); ++k) {
            const MatchedFilterRow mf = matched_filter_row(ctx, k, center);
            if (mf.gain <= 0.0) continue;
            CMatrix m(1, ds.n_tx);
            for (std::size_t c = 0; c < ds.n_tx; ++c) m(0, c) = mf.row[c] / mf.gain;
            if (m.frobenius_norm() == 0.0) continue;
            const CVector one(1, cplx{1.0, 0.0});
            log_sum += std::log(l_curve_alpha(svd(m), one, alpha_grid).alpha);
            ++used;
        }
        if (used == 0) throw NumericalError("select_alpha_l_curve: dataset is entirely zero");
        return std::exp(log_sum / static_cast<double>(used));
    }

    double log_sum = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < ctx.dataset().n_freq(); ++k) {
        if (dataset_is_zero(ctx.dataset(), k)) continue;
        const CVector rhs = ctx.greens(center, k);
        log_sum += std::log(l_curve_alpha(ctx.svd_at(k), rhs, alpha_grid).alpha);
        ++used;
        if (method == Method::LsmSingle) break;
    }
    if (used == 0) throw NumericalError("select_alpha_l_curve: dataset is entirely zero");
    return std::exp(log_sum / static_cast<double>(used));
}

IndicatorMap run_method(const ScatteringDataset& dataset, const SceneConfig& scene, Method method,
                        double alpha, const RunOptions& options) {
    dataset.check_consistent();
    if (method == Method::LsmSingle && options.f_index >= dataset.n_freq())
        throw ValidationError("run_method: f_index out of range");

    const InversionContext ctx(dataset, scene.ring, scene.grid, options.indicator_cap);

    IndicatorMap map;
    map.values.assign(scene.grid.pixel_count(), 0.0);
    map.side = scene.grid.side_pixels;
    map.method = method;
    map.mf_mode = options.mf_mode;
    map.alpha = alpha;
    map.frequencies = dataset.frequencies;
    map.aperture = dataset.aperture;
    map.snr_db = dataset.snr_db;
    map.seed = dataset.seed;

    std::mutex err_mutex;
    std::vector<std::string> failures;

    parallel_for(
        map.values.size(),
        [&](std::size_t p) {
            {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (options.fail_fast && !failures.empty()) return;
            }
            try {
                double v = 0.0;
                switch (method) {
                    case Method::LsmSingle: {
                        const PixelSolve ps = lsm_single(ctx, options.f_index, p, alpha);
                        v = capped_inverse_sq(ps.g, options.indicator_cap);
                        break;
                    }
                    case Method::MlsmParallel:
                        v = mlsm_parallel(ctx, p, alpha);
                        break;
                    case Method::MfMlsm:
                        v = mf_mlsm(ctx, p, alpha, options.mf_mode);
                        break;
                }
                map.values[p] = v;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                failures.push_back("pixel " + std::to_string(p) + ": " + e.what());
            }
        },
        options.threads);

    if (!failures.empty()) {
        std::string msg = "run_method: " + std::to_string(failures.size()) + " pixel failure(s):";
        for (std::size_t i = 0; i < failures.size() && i < 5; ++i) msg += "\n  " + failures[i];
        throw NumericalError(msg);
    }

    for (double v : map.values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw NumericalError("run_method: non-finite indicator produced");
    return map;
}

} // namespace lsm
