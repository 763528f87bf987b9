#include "lsmkit/forward.hpp"

#include <cmath>
#include <mutex>
#include <random>

#include "lsmkit/specfun.hpp"

namespace lsm {

namespace {

cplx line_source(double k, double dist) {
    const cplx h = specfun::hankel2(0, k * dist);
    return cplx{0.0, -0.25} * h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

void ScatteringDataset::check_consistent() const {
    if (matrices.size() != frequencies.size())
        throw ValidationError("dataset: matrix count != frequency count");
    for (const CMatrix& m : matrices) {
        if (m.rows() != n_rx() || m.cols() != n_tx)
            throw ValidationError("dataset: matrix shape drift");
    }
}

CVector incident_field(Point2 tx, std::span<const Point2> points, double f) {
    const double k = wavenumber(f);
    CVector out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = distance(points[i], tx);
        if (d < 1e-12)
            throw ValidationError("incident_field: evaluation point coincides with the source");
        out[i] = line_source(k, d);
    }
    return out;
}

CVector greens_vector(Point2 pixel, std::span<const Point2> rx_positions, double f) {
    const double k = wavenumber(f);
    CVector out(rx_positions.size());
    for (std::size_t i = 0; i < rx_positions.size(); ++i)
        out[i] = line_source(k, distance(rx_positions[i], pixel));
    return out;
}

CVector greens_vector(Point2 pixel, const ApertureSelection& aperture, const AntennaRing& ring,
                      double f) {
    std::vector<Point2> pos;
    pos.reserve(aperture.rx_indices.size());
    for (std::size_t idx : aperture.rx_indices) pos.push_back(ring.position(idx));
    return greens_vector(pixel, pos, f);
}

ScatteringDataset synthesize_dataset(const SceneConfig& scene, ForwardSolver solver,
                                     double mom_cell_size) {
    ScatteringDataset ds;
    ds.frequencies = scene.frequencies;
    ds.aperture = scene.aperture;
    ds.n_tx = scene.ring.count;
    ds.seed = 0; // a seed belongs to a noise realization; add_awgn sets it
    ds.geometry_hash = scene.geometry_hash();

    double cell = mom_cell_size;
    if (solver == ForwardSolver::Mom && cell <= 0.0)
        cell = kSpeedOfLight / scene.frequencies.back() / 10.0;

    // frequencies are independent solves; output slots are disjoint
    ds.matrices.resize(scene.frequencies.size());
    std::exception_ptr first_error;
    std::mutex error_mutex;
    parallel_for(scene.frequencies.size(), [&](std::size_t k) {
        try {
            const double f = scene.frequencies[k];
            ds.matrices[k] = solver == ForwardSolver::Series ? solve_cylinder_series(scene, f)
                                                             : solve_mom(scene, f, cell);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    });
    if (first_error) std::rethrow_exception(first_error);
    ds.check_consistent();
    return ds;
}

ScatteringDataset add_awgn(const ScatteringDataset& dataset, double snr_db, std::uint64_t seed) {
    if (dataset.noise_applied)
        throw ValidationError("add_awgn: dataset already carries a noise realization");
    if (std::isinf(snr_db) && snr_db > 0) return dataset; // no-noise flag

    ScatteringDataset out = dataset;
    out.noise_applied = true;
    out.snr_db = snr_db;
    out.seed = seed;

    for (std::size_t kidx = 0; kidx < out.matrices.size(); ++kidx) {
        CMatrix& m = out.matrices[kidx];
        if (m.data().empty()) continue;
        double power = 0.0;
        for (const cplx& v : m.data()) power += std::norm(v);
        power /= static_cast<double>(m.data().size());
        const double sigma_n = std::sqrt(power * std::pow(10.0, -snr_db / 10.0));

        // Substream per (seed, frequency index); Box-Muller over mt19937_64
        // keeps realizations identical across platforms.
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(kidx + 1)));
        auto uniform = [&rng] {
            return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
        };
        for (cplx& v : m.data()) {
            const double u1 = uniform();
            const double u2 = uniform();
            const double r = sigma_n * std::sqrt(-std::log(u1));
            v += cplx{r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
        }
    }
    return out;
}

ScatteringDataset csi_background_subtract(const ScatteringDataset& total_csi,
                                          const ScatteringDataset& background_csi) {
    total_csi.check_consistent();
    background_csi.check_consistent();
    if (total_csi.frequencies != background_csi.frequencies)
        throw ValidationError("csi_background_subtract: frequency lists differ");
    if (total_csi.n_rx() != background_csi.n_rx() || total_csi.n_tx != background_csi.n_tx)
        throw ValidationError("csi_background_subtract: shapes differ");

    ScatteringDataset out = total_csi;
    for (std::size_t k = 0; k < out.matrices.size(); ++k) {
        auto& dst = out.matrices[k].data();
        const auto& sub = background_csi.matrices[k].data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= sub[i];
    }
    return out;
}

ScatteringDataset restrict_aperture(const ScatteringDataset& dataset,
                                    const ApertureSelection& target) {
    dataset.check_consistent();
    std::vector<std::size_t> rows;
    rows.reserve(target.rx_indices.size());
    for (std::size_t want : target.rx_indices) {
        bool found = false;
        for (std::size_t r = 0; r < dataset.aperture.rx_indices.size(); ++r) {
            if (dataset.aperture.rx_indices[r] == want) {
                rows.push_back(r);
                found = true;
                break;
            }
        }
        if (!found)
            throw ValidationError("restrict_aperture: receiver " + std::to_string(want) +
                                  " not present in the dataset");
    }

    ScatteringDataset out = dataset;
    out.aperture = target;
    for (CMatrix& m : out.matrices) {
        CMatrix cut(rows.size(), m.cols());
        for (std::size_t c = 0; c < m.cols(); ++c)
            for (std::size_t r = 0; r < rows.size(); ++r) cut(r, c) = m(rows[r], c);
        m = std::move(cut);
    }
    out.check_consistent();
    return out;
}

} // namespace lsm
