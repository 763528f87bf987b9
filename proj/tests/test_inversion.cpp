#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lsmkit/inversion.hpp"
#include "lsmkit/metrics.hpp"

using namespace lsm;

TEST_SUITE_BEGIN("inversion");

namespace {

// Small scene for map-level tests that do not need the full 46x46 grid.
SceneConfig small_scene() {
    SceneConfig s = SceneConfig::reference_default();
    s.grid.side_pixels = 18;
    s.frequencies = {1e9, 2e9, 3e9};
    return s;
}

const ScatteringDataset& default_dataset() {
    static const ScatteringDataset ds =
        synthesize_dataset(SceneConfig::reference_default(), ForwardSolver::Series);
    return ds;
}

const InversionContext& default_context() {
    static const InversionContext ctx(default_dataset(), SceneConfig::reference_default().ring,
                                      SceneConfig::reference_default().grid);
    return ctx;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

} // namespace

TEST_CASE("zero data yields an all-zero map, not a capped one") {
    SceneConfig scene = small_scene();
    scene.scatterers[0].eps_r = 1.0; // no contrast, F = 0
    const auto ds = synthesize_dataset(scene, ForwardSolver::Series);
    const auto map = run_method(ds, scene, Method::MlsmParallel, 1e-2);
    for (double v : map.values) CHECK(v == 0.0);
    const auto map_mf = run_method(ds, scene, Method::MfMlsm, 1e-6);
    for (double v : map_mf.values) CHECK(v == 0.0);
}

TEST_CASE("lsm filter-factor scaling: 2F and 2alpha halve g exactly") {
    const SceneConfig scene = SceneConfig::reference_default();
    ScatteringDataset ds = default_dataset();
    const InversionContext ctx(ds, scene.ring, scene.grid);

    ScatteringDataset ds2 = ds;
    for (auto& m : ds2.matrices)
        for (auto& v : m.data()) v *= 2.0;
    const InversionContext ctx2(ds2, scene.ring, scene.grid);

    const std::size_t pixel = 23 * 46 + 23;
    const double alpha = 1e-2;
    const PixelSolve a = lsm_single(ctx, 0, pixel, alpha);
    const PixelSolve b = lsm_single(ctx2, 0, pixel, 2.0 * alpha);
    const double na = norm2(a.g), nb = norm2(b.g);
    CHECK(std::abs(nb - 0.5 * na) < 1e-12 * na);
}

TEST_CASE("single-frequency interior indicators dominate the exterior") {
    const SceneConfig scene = SceneConfig::reference_default();
    const InversionContext& ctx = default_context();
    const auto truth = ground_truth_mask(scene.grid, scene.scatterers);
    const double r = scene.scatterers[0].radius;

    double sum_in = 0.0, sum_out = 0.0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t p = 0; p < truth.size(); ++p) {
        const Point2 c = scene.grid.pixel_center(p);
        const double d = norm(c - scene.scatterers[0].center);
        if (truth[p]) {
            const PixelSolve ps = lsm_single(ctx, 0, p, 1e-4);
            sum_in += 1.0 / (norm2(ps.g) * norm2(ps.g));
            ++n_in;
        } else if (d > r + 0.05) {
            const PixelSolve ps = lsm_single(ctx, 0, p, 1e-4);
            sum_out += 1.0 / (norm2(ps.g) * norm2(ps.g));
            ++n_out;
        }
    }
    CHECK(sum_in / static_cast<double>(n_in) > sum_out / static_cast<double>(n_out));
}

TEST_CASE("mlsm with one frequency reduces to the inverse norm") {
    SceneConfig scene = SceneConfig::reference_default();
    scene.frequencies = {2e9};
    const auto ds = synthesize_dataset(scene, ForwardSolver::Series);
    const InversionContext ctx(ds, scene.ring, scene.grid);
    const std::size_t pixel = 10 * 46 + 30;
    const double ip = mlsm_parallel(ctx, pixel, 1e-2);
    const PixelSolve ps = lsm_single(ctx, 0, pixel, 1e-2);
    CHECK(std::abs(ip - 1.0 / norm2(ps.g)) < 1e-12 * ip);
}

TEST_CASE("mlsm over a duplicated frequency scales by sqrt(2)") {
    SceneConfig scene = SceneConfig::reference_default();
    scene.frequencies = {2e9};
    auto ds = synthesize_dataset(scene, ForwardSolver::Series);
    const InversionContext single_ctx(ds, scene.ring, scene.grid);
    const std::size_t pixel = 17 * 46 + 20;
    const double ip1 = mlsm_parallel(single_ctx, pixel, 1e-2);

    ScatteringDataset doubled = ds;
    doubled.matrices.push_back(ds.matrices[0]);
    doubled.frequencies.push_back(ds.frequencies[0]);
    const InversionContext dctx(doubled, scene.ring, scene.grid);
    const double ip2 = mlsm_parallel(dctx, pixel, 1e-2);
    CHECK(std::abs(ip2 - std::sqrt(2.0) * ip1) < 1e-9 * ip2);
}

TEST_CASE("matched filter: greens column returns its own gain") {
    const SceneConfig scene = SceneConfig::reference_default();
    ScatteringDataset ds;
    ds.frequencies = {1e9};
    ds.aperture = scene.aperture;
    ds.n_tx = 1;
    const std::size_t pixel = 20 * 46 + 25;
    const CVector g =
        greens_vector(scene.grid.pixel_center(pixel), scene.aperture, scene.ring, 1e9);
    CMatrix m(g.size(), 1);
    for (std::size_t i = 0; i < g.size(); ++i) m(i, 0) = g[i];
    ds.matrices.push_back(m);

    const InversionContext ctx(ds, scene.ring, scene.grid);
    const MatchedFilterRow mf = matched_filter_row(ctx, 0, pixel);
    REQUIRE(mf.row.size() == 1);
    CHECK(std::abs(mf.row[0] - cplx{mf.gain, 0.0}) < 1e-12 * mf.gain);
}

TEST_CASE("matched filter on noise obeys Cauchy-Schwarz per column") {
    const SceneConfig scene = SceneConfig::reference_default();
    ScatteringDataset noise_ds;
    noise_ds.frequencies = {1e9};
    noise_ds.aperture = scene.aperture;
    noise_ds.n_tx = 50;
    CMatrix m(50, 50);
    std::mt19937_64 rng(9001);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& v : m.data()) v = cplx{dist(rng), dist(rng)} * 1e-3;
    noise_ds.matrices.push_back(m);

    const InversionContext ctx(noise_ds, scene.ring, scene.grid);
    const std::size_t pixel = 11 * 46 + 13;
    const CVector g =
        greens_vector(scene.grid.pixel_center(pixel), scene.aperture, scene.ring, 1e9);
    const double g_norm = norm2(g);
    const MatchedFilterRow mf = matched_filter_row(ctx, 0, pixel);

    cplx mean = 0.0;
    for (std::size_t c = 0; c < 50; ++c) {
        CHECK(std::abs(mf.row[c]) <= g_norm * norm2(m.col(c)) * (1.0 + 1e-12));
        mean += mf.row[c];
    }
    mean /= 50.0;
    // zero-mean noise: the filtered mean sits far below the C-S bound
    CHECK(std::abs(mean) < 0.2 * g_norm * norm2(m.col(0)));
}

TEST_CASE("matched filter peaks at the true pixel for a point target") {
    const SceneConfig scene = SceneConfig::reference_default();
    std::mt19937_64 rng(31337);
    const std::size_t side = scene.grid.side_pixels;

    for (int trial = 0; trial < 4; ++trial) {
        const std::size_t qi = 8 + rng() % 30, qj = 8 + rng() % 30;
        const std::size_t q = qj * side + qi;

        // dataset = outer product G(q) x incident-at-q: a point scatterer.
        ScatteringDataset ds;
        ds.frequencies = {2e9, 6e9};
        ds.aperture = scene.aperture;
        ds.n_tx = scene.ring.count;
        for (double f : ds.frequencies) {
            const CVector g =
                greens_vector(scene.grid.pixel_center(q), scene.aperture, scene.ring, f);
            const Point2 pq = scene.grid.pixel_center(q);
            CMatrix m(g.size(), ds.n_tx);
            for (std::size_t tx = 0; tx < ds.n_tx; ++tx) {
                const Point2 txp = scene.ring.position(tx);
                const cplx drive =
                    incident_field(txp, std::span<const Point2>{&pq, 1}, f)[0];
                for (std::size_t r = 0; r < g.size(); ++r) m(r, tx) = g[r] * drive;
            }
            ds.matrices.push_back(m);
        }

        const InversionContext ctx(ds, scene.ring, scene.grid);
        for (std::size_t k = 0; k < ds.n_freq(); ++k) {
            const double peak = norm2(matched_filter_row(ctx, k, q).row);
            for (std::size_t pj = 0; pj < side; pj += 3) {
                for (std::size_t pi = 0; pi < side; pi += 3) {
                    const std::size_t p = pj * side + pi;
                    const double sep = std::hypot(static_cast<double>(pi) - static_cast<double>(qi),
                                                  static_cast<double>(pj) - static_cast<double>(qj));
                    if (sep < 2.0) continue;
                    CHECK(norm2(matched_filter_row(ctx, k, p).row) < peak);
                }
            }
        }
    }
}

TEST_CASE("mf-mlsm with a single frequency stays finite and positive") {
    SceneConfig scene = small_scene();
    scene.frequencies = {2e9};
    const auto ds = synthesize_dataset(scene, ForwardSolver::Series);
    const InversionContext ctx(ds, scene.ring, scene.grid);
    const double v = mf_mlsm(ctx, ctx.grid().pixel_count() / 2, 1e-6);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
}

TEST_CASE("mf stacking is per-frequency local") {
    const SceneConfig scene = small_scene();
    const auto ds = synthesize_dataset(scene, ForwardSolver::Series);
    const InversionContext ctx(ds, scene.ring, scene.grid);
    const std::size_t pixel = 5 * scene.grid.side_pixels + 9;
    const MatchedFilterRow before = matched_filter_row(ctx, 0, pixel);

    ScatteringDataset trimmed = ds;
    trimmed.matrices.pop_back();
    trimmed.frequencies.pop_back();
    const InversionContext tctx(trimmed, scene.ring, scene.grid);
    const MatchedFilterRow after = matched_filter_row(tctx, 0, pixel);
    CHECK(before.gain == after.gain);
    for (std::size_t i = 0; i < before.row.size(); ++i) CHECK(before.row[i] == after.row[i]);
}

TEST_CASE("stacked solve is invariant to a common phase on any row") {
    const SceneConfig scene = SceneConfig::reference_default();
    const InversionContext& ctx = default_context();
    const std::size_t pixel = 22 * 46 + 24;
    const ScatteringDataset& ds = ctx.dataset();

    CMatrix m(ds.n_freq(), ds.n_tx);
    for (std::size_t k = 0; k < ds.n_freq(); ++k) {
        const MatchedFilterRow mf = matched_filter_row(ctx, k, pixel);
        for (std::size_t c = 0; c < ds.n_tx; ++c) m(k, c) = mf.row[c] / mf.gain;
    }
    CVector b(ds.n_freq(), cplx{1.0, 0.0});
    const double n0 = norm2(tikhonov_solve(svd(m), b, 1e-6));

    const cplx rot = std::polar(1.0, 0.7);
    for (std::size_t c = 0; c < ds.n_tx; ++c) m(3, c) *= rot;
    b[3] *= rot;
    const double n1 = norm2(tikhonov_solve(svd(m), b, 1e-6));
    CHECK(std::abs(n1 - n0) < 1e-9 * n0);
}

TEST_CASE("run_method maps are deterministic across thread counts") {
    const SceneConfig scene = small_scene();
    const auto ds = synthesize_dataset(scene, ForwardSolver::Series);

    RunOptions opt1;
    opt1.threads = 1;
    RunOptions opt2;
    opt2.threads = 2;
    const auto a = run_method(ds, scene, Method::MfMlsm, 1e-6, opt1);
    const auto b = run_method(ds, scene, Method::MfMlsm, 1e-6, opt2);
    const auto c = run_method(ds, scene, Method::MfMlsm, 1e-6, opt2);
    CHECK(a.values == b.values);
    CHECK(b.values == c.values);
}

TEST_CASE("mf-mlsm differs from mlsm, phase-corrected mode does not") {
    const SceneConfig scene = small_scene();
    auto ds = synthesize_dataset(scene, ForwardSolver::Series);
    ds = add_awgn(ds, 27.0, 7);

    const auto mlsm = run_method(ds, scene, Method::MlsmParallel, 1e-2);
    const auto mf = run_method(ds, scene, Method::MfMlsm, 1e-2);
    CHECK(rel_l2(mf.values, mlsm.values) > 0.01);

    // The per-receiver phase correction is a row-unitary and cancels in the
    // least-squares solve; it must reproduce plain MLSM.
    RunOptions opt;
    opt.mf_mode = MfMode::PhaseCorrected;
    const auto pc = run_method(ds, scene, Method::MfMlsm, 1e-2, opt);
    CHECK(rel_l2(pc.values, mlsm.values) < 1e-9);
}

TEST_CASE("noiseless full-ring mlsm ranks the disk first (jaccard)") {
    const SceneConfig scene = SceneConfig::reference_default();
    const auto map = run_method(default_dataset(), scene, Method::MlsmParallel, 1e-4);
    const auto truth = ground_truth_mask(scene.grid, scene.scatterers);
    const auto n_truth =
        static_cast<std::size_t>(std::count(truth.begin(), truth.end(), std::uint8_t{1}));

    std::vector<std::size_t> order(map.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_truth),
                      order.end(),
                      [&](std::size_t a, std::size_t b) { return map.values[a] > map.values[b]; });

    std::size_t inter = 0;
    for (std::size_t i = 0; i < n_truth; ++i) inter += truth[order[i]];
    const double jaccard =
        static_cast<double>(inter) / static_cast<double>(2 * n_truth - inter);
    CHECK(jaccard >= 0.8);
}

TEST_CASE("interior dominance holds for every method") {
    const SceneConfig scene = SceneConfig::reference_default();
    const auto truth = ground_truth_mask(scene.grid, scene.scatterers);
    const double r = scene.scatterers[0].radius;

    RunOptions opt;
    for (auto [method, alpha] : {std::pair<Method, double>{Method::LsmSingle, 1e-4},
                                 {Method::MlsmParallel, 1e-3},
                                 {Method::MfMlsm, 1e-6}}) {
        const auto map = run_method(default_dataset(), scene, method, alpha, opt);
        std::vector<double> inside, outside;
        for (std::size_t p = 0; p < truth.size(); ++p) {
            const double d = norm(scene.grid.pixel_center(p) - scene.scatterers[0].center);
            if (truth[p])
                inside.push_back(map.values[p]);
            else if (d > r + 0.1)
                outside.push_back(map.values[p]);
        }
        CHECK(median(inside) > median(outside));
        for (double v : map.values) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
            CHECK(v <= opt.indicator_cap);
        }
    }
}

TEST_CASE("shared svd equals per-pixel recomputation") {
    const SceneConfig scene = SceneConfig::reference_default();
    const InversionContext& shared = default_context();
    for (std::size_t pixel : {std::size_t{100}, std::size_t{1058}, std::size_t{2000}}) {
        const InversionContext fresh(default_dataset(), scene.ring, scene.grid);
        const PixelSolve a = lsm_single(shared, 2, pixel, 1e-2);
        const PixelSolve b = lsm_single(fresh, 2, pixel, 1e-2);
        REQUIRE(a.g.size() == b.g.size());
        for (std::size_t i = 0; i < a.g.size(); ++i) CHECK(std::abs(a.g[i] - b.g[i]) < 1e-12);
    }
}

TEST_CASE("l-curve alpha for the 180/27dB scenario is near the reported value") {
    SceneConfig scene = SceneConfig::reference_default();
    scene.aperture = ApertureSelection::from_degrees(180.0, scene.ring.count);
    auto ds = restrict_aperture(default_dataset(), scene.aperture);
    ds = add_awgn(ds, 27.0, scene.rng_seed);
    const InversionContext ctx(ds, scene.ring, scene.grid);
    const auto grid = log_spaced(1e-8, 1e2, 44);
    const double alpha = select_alpha_l_curve(ctx, Method::MlsmParallel, grid);
    // The corner must sit in the meaningful regularization range for this
    // data scale: above the smallest candidates, well below sigma_max.
    CHECK(alpha >= 1e-6);
    CHECK(alpha <= 1e-2);
    CHECK(alpha < ctx.svd_at(0).sigma.front());
}

TEST_CASE("filtered mf closed form equals the generic svd route") {
    const SceneConfig scene = SceneConfig::reference_default();
    const InversionContext& ctx = default_context();
    const ScatteringDataset& ds = ctx.dataset();
    const double alpha = 1e-6;
    for (std::size_t pixel : {std::size_t{23 * 46 + 23}, std::size_t{8 * 46 + 37}}) {
        double sum = 0.0;
        for (std::size_t k = 0; k < ds.n_freq(); ++k) {
            const MatchedFilterRow mf = matched_filter_row(ctx, k, pixel);
            CMatrix row(1, ds.n_tx);
            for (std::size_t c = 0; c < ds.n_tx; ++c) row(0, c) = mf.row[c] / mf.gain;
            const CVector one(1, cplx{1.0, 0.0});
            const CVector g = tikhonov_solve(svd(row), one, alpha);
            const double n = norm2(g);
            sum += 1.0 / (n * n);
        }
        const double generic = std::sqrt(sum);
        const double closed = mf_mlsm(ctx, pixel, alpha, MfMode::Filtered);
        CHECK(std::abs(closed - generic) < 1e-9 * generic);
    }
}

TEST_SUITE_END();
