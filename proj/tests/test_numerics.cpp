#include "doctest.h"

#include <cmath>
#include <random>

#include "lsmkit/numerics.hpp"
#include "oracle_linalg.hpp"

using namespace lsm;

TEST_SUITE_BEGIN("numerics");

namespace {

CMatrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CMatrix a(m, n);
    for (auto& v : a.data()) v = {dist(rng), dist(rng)};
    return a;
}

CVector random_vector(std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CVector b(m);
    for (auto& v : b) v = {dist(rng), dist(rng)};
    return b;
}

double reconstruction_error(const CMatrix& a, const SvdResult& s) {
    CMatrix sv = s.v.adjoint(); // r x n
    for (std::size_t j = 0; j < sv.cols(); ++j)
        for (std::size_t i = 0; i < sv.rows(); ++i) sv(i, j) *= s.sigma[i];
    CMatrix rec = matmul(s.u, sv);
    double err = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) err += std::norm(rec.data()[i] - a.data()[i]);
    return std::sqrt(err);
}

double orthonormality_defect(const CMatrix& q) {
    double worst = 0.0;
    for (std::size_t i = 0; i < q.cols(); ++i)
        for (std::size_t j = 0; j < q.cols(); ++j) {
            const cplx d = cdot(q.col(i), q.col(j)) - (i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0});
            worst = std::max(worst, std::abs(d));
        }
    return worst;
}

} // namespace

TEST_CASE("svd of the identity") {
    CMatrix a(3, 3);
    for (int i = 0; i < 3; ++i) a(i, i) = 1.0;
    const auto s = svd(a);
    REQUIRE(s.sigma.size() == 3);
    for (double v : s.sigma) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("svd of an embedded permuted diagonal") {
    // rows/cols permuted diag(3,4): singular values must come back sorted.
    CMatrix a(2, 2);
    a(0, 1) = 3.0;
    a(1, 0) = 4.0;
    const auto s = svd(a);
    CHECK(std::abs(s.sigma[0] - 4.0) < 1e-12);
    CHECK(std::abs(s.sigma[1] - 3.0) < 1e-12);
}

TEST_CASE("svd singular values match the Hermitian eigen-oracle on 25x50") {
    const CMatrix a = random_matrix(25, 50, 42);
    const auto s = svd(a);

    // oracle: eigenvalues of A A^H (25x25), descending.
    const std::size_t m = a.rows();
    std::vector<cplx> gram(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            cplx acc = 0.0;
            for (std::size_t c = 0; c < a.cols(); ++c) acc += a(i, c) * std::conj(a(j, c));
            gram[i * m + j] = acc;
        }
    const auto eig = oracle::hermitian_eigenvalues(std::move(gram), m);

    REQUIRE(s.sigma.size() == 25);
    for (std::size_t i = 0; i < 25; ++i) {
        const double expect = std::sqrt(std::max(0.0, eig[i]));
        CHECK(std::abs(s.sigma[i] - expect) / expect < 1e-9);
    }
}

TEST_CASE("svd invariants: reconstruction and orthonormality") {
    for (auto [m, n, seed] : {std::tuple<std::size_t, std::size_t, std::uint64_t>{40, 25, 1},
                              {25, 40, 2},
                              {120, 80, 3},
                              {400, 400, 4}}) {
        const CMatrix a = random_matrix(m, n, seed);
        const auto s = svd(a);
        CHECK(reconstruction_error(a, s) <= 1e-10 * a.frobenius_norm());
        CHECK(orthonormality_defect(s.u) <= 1e-10);
        CHECK(orthonormality_defect(s.v) <= 1e-10);
        for (std::size_t i = 0; i + 1 < s.sigma.size(); ++i) {
            CHECK(s.sigma[i] >= s.sigma[i + 1]);
            CHECK(s.sigma[i + 1] >= 0.0);
        }
    }
}

TEST_CASE("svd phase convention is deterministic") {
    const CMatrix a = random_matrix(12, 9, 77);
    const auto s1 = svd(a);
    const auto s2 = svd(a);
    for (std::size_t i = 0; i < s1.u.data().size(); ++i)
        CHECK(s1.u.data()[i] == s2.u.data()[i]);
    for (std::size_t j = 0; j < s1.u.cols(); ++j) {
        auto col = s1.u.col(j);
        double best = 0.0;
        cplx top = 0.0;
        for (const cplx& v : col)
            if (std::abs(v) > best) {
                best = std::abs(v);
                top = v;
            }
        CHECK(std::abs(top.imag()) < 1e-12 * best);
        CHECK(top.real() > 0.0);
    }
}

TEST_CASE("svd rejects non-finite input") {
    CMatrix a(2, 2);
    a(0, 0) = {std::nan(""), 0.0};
    CHECK_THROWS_AS(svd(a), NumericalError);
}

TEST_CASE("tikhonov on the identity recovers b as alpha -> 0") {
    CMatrix a(3, 3);
    for (int i = 0; i < 3; ++i) a(i, i) = 1.0;
    const auto s = svd(a);
    const CVector b = random_vector(3, 5);
    const double alpha = 1e-4;
    const auto g = tikhonov_solve(s, b, alpha);
    double rel = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) rel += std::norm(g[i] - b[i]);
    rel = std::sqrt(rel) / norm2(b);
    CHECK(rel <= 2.0 * alpha * alpha);
}

TEST_CASE("tikhonov closed form for diag(2)") {
    CMatrix a(1, 1);
    a(0, 0) = 2.0;
    const auto s = svd(a);
    const CVector b{cplx{1.0, 0.0}};
    const auto g = tikhonov_solve(s, b, 1.0);
    CHECK(std::abs(g[0] - cplx{0.4, 0.0}) < 1e-14);
}

TEST_CASE("tikhonov matches the normal-equations oracle") {
    const CMatrix a = random_matrix(20, 20, 11);
    const CVector b = random_vector(20, 12);
    const auto s = svd(a);
    const auto g = tikhonov_solve(s, b, 1e-3);
    const auto g_ref = oracle::tikhonov_normal_equations(a, b, 1e-3);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        num += std::norm(g[i] - g_ref[i]);
        den += std::norm(g_ref[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-9);
}

TEST_CASE("tikhonov equivalence holds on rectangular systems too") {
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{30, 18}, {18, 30}, {100, 100}}) {
        const CMatrix a = random_matrix(m, n, 100 + m + n);
        const CVector b = random_vector(m, 200 + m);
        const auto g = tikhonov_solve(svd(a), b, 3e-2);
        const auto g_ref = oracle::tikhonov_normal_equations(a, b, 3e-2);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            num += std::norm(g[i] - g_ref[i]);
            den += std::norm(g_ref[i]);
        }
        CHECK(std::sqrt(num / den) < 1e-9);
    }
}

TEST_CASE("filter-factor and residual monotonicity in alpha") {
    const CMatrix a = random_matrix(30, 30, 21);
    const CVector b = random_vector(30, 22);
    const auto s = svd(a);
    double prev_sol = std::numeric_limits<double>::infinity();
    double prev_res = 0.0;
    for (double alpha : log_spaced(1e-8, 1e2, 40)) {
        const double sol = norm2(tikhonov_solve(s, b, alpha));
        const double res = tikhonov_residual_norm(s, b, alpha);
        CHECK(sol <= prev_sol * (1.0 + 1e-12));
        CHECK(res >= prev_res * (1.0 - 1e-12));
        prev_sol = sol;
        prev_res = res;
    }
}

TEST_CASE("scaling covariance of svd and tikhonov") {
    const CMatrix a = random_matrix(14, 10, 31);
    const CVector b = random_vector(14, 32);
    const cplx c{1.3, -2.1};
    const double cmag = std::abs(c);

    CMatrix ca = a;
    for (auto& v : ca.data()) v *= c;

    const auto s = svd(a);
    const auto cs = svd(ca);
    for (std::size_t i = 0; i < s.sigma.size(); ++i)
        CHECK(std::abs(cs.sigma[i] - cmag * s.sigma[i]) < 1e-10 * cmag * s.sigma.front());

    const double alpha = 7e-2;
    const auto g = tikhonov_solve(s, b, alpha);
    const auto gc = tikhonov_solve(cs, b, cmag * alpha);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(gc[i] - g[i] / c) < 1e-10);
}

TEST_CASE("l-curve finds the corner between signal and noise clusters") {
    // sigma: six signal values in [0.5, 1], four at the 1e-6 noise floor.
    const std::size_t n = 10;
    CMatrix a(n, n);
    const double sig[n] = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 1e-6, 1e-6, 1e-6, 1e-6};
    for (std::size_t i = 0; i < n; ++i) a(i, i) = sig[i];

    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 1e-3);
    CVector b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = sig[i] + cplx{noise(rng), noise(rng)};

    const auto s = svd(a);
    const auto grid = log_spaced(1e-9, 1e1, 60);
    const auto res = l_curve_alpha(s, b, grid);
    CHECK(!res.degenerate);
    CHECK(res.alpha > 1e-6);
    CHECK(res.alpha < 0.5);
    CHECK(res.curve.size() == grid.size());
}

TEST_CASE("l-curve on a noiseless consistent system has no corner") {
    const CMatrix a = random_matrix(15, 15, 51);
    CVector g_true = random_vector(15, 52);
    const CVector b = matvec(a, g_true);
    const auto res = l_curve_alpha(svd(a), b, log_spaced(1e-10, 1e0, 40));
    // Either the smallest candidate wins or the fallback fires.
    CHECK((res.degenerate || res.alpha <= 1e-9 * 1.0001));
}

TEST_CASE("l-curve validates its grid") {
    const CMatrix a = random_matrix(5, 5, 61);
    const CVector b = random_vector(5, 62);
    const auto s = svd(a);
    const auto short_grid = log_spaced(1e-6, 1e0, 5);
    CHECK_THROWS_AS(l_curve_alpha(s, b, short_grid), ValidationError);
    const auto narrow = log_spaced(1e-3, 1e0, 12);
    CHECK_THROWS_AS(l_curve_alpha(s, b, narrow), ValidationError);
}

TEST_CASE("l-curve csv export") {
    const CMatrix a = random_matrix(6, 6, 71);
    const CVector b = random_vector(6, 72);
    const auto res = l_curve_alpha(svd(a), b, log_spaced(1e-8, 1e0, 12));
    const std::string csv = res.to_csv();
    CHECK(csv.rfind("alpha,residual_norm,solution_norm,curvature\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13); // header + 12 points
}

TEST_SUITE_END();
