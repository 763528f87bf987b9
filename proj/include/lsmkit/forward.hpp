#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lsmkit/linalg.hpp"
#include "lsmkit/scene.hpp"

namespace lsm {

// Scattered-field data for one experiment: one N_Rx x N_Tx complex matrix per
// frequency, column n = field at all selected receivers due to transmitter n.
struct ScatteringDataset {
    std::vector<CMatrix> matrices;
    std::vector<double> frequencies;   // Hz, matches matrices
    ApertureSelection aperture;        // receiver rows present in the matrices
    std::size_t n_tx = 0;
    bool noise_applied = false;
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
    std::uint64_t geometry_hash = 0;

    std::size_t n_rx() const { return aperture.rx_indices.size(); }
    std::size_t n_freq() const { return frequencies.size(); }
    void check_consistent() const; // throws ValidationError on shape drift
};

// Unit-amplitude 2D line source: (-j/4) H0^(2)(k |point - tx|) at each point.
CVector incident_field(Point2 tx, std::span<const Point2> points, double f);

// Green's vector from a pixel to the aperture's receivers (same kernel).
CVector greens_vector(Point2 pixel, const ApertureSelection& aperture, const AntennaRing& ring,
                      double f);
CVector greens_vector(Point2 pixel, std::span<const Point2> rx_positions, double f);

// Analytic scattered field of one homogeneous lossless dielectric cylinder
// under line-source incidence (cylindrical-harmonic expansion, truncated at
// ceil(k a) + 15). Receivers = scene aperture, transmitters = full ring.
CMatrix solve_cylinder_series(const SceneConfig& scene, double f);

// Method-of-moments solve on equivalent-circular cells covering the scatterer
// support (cell centers inside a disk). Dense LU, one factorization shared by
// all transmitters.
CMatrix solve_mom(const SceneConfig& scene, double f, double cell_size);

// First-order Born approximation on the same cells; used as a weak-contrast
// cross-check of the MoM path.
CMatrix solve_born(const SceneConfig& scene, double f, double cell_size);

enum class ForwardSolver { Series, Mom };

// Synthesizes the noiseless dataset for every scene frequency.
// mom_cell_size = 0 picks lambda_min/10 (free-space wavelength at the highest
// frequency), the inverse-crime-free default.
ScatteringDataset synthesize_dataset(const SceneConfig& scene, ForwardSolver solver,
                                     double mom_cell_size = 0.0);

// Adds i.i.d. circularly-symmetric complex Gaussian noise per frequency with
// entry variance P_k * 10^(-snr/10), P_k = mean |F_k|^2. Infinite snr_db is
// the no-noise flag and returns the dataset unchanged. Noise substreams are
// derived from (seed, frequency index), so results do not depend on
// evaluation order. Throws if the dataset is already noisy.
ScatteringDataset add_awgn(const ScatteringDataset& dataset, double snr_db, std::uint64_t seed);

// Entrywise total - background; how raw CSI becomes the scattered data the
// inversion consumes.
ScatteringDataset csi_background_subtract(const ScatteringDataset& total_csi,
                                          const ScatteringDataset& background_csi);

// Row selection for a narrower aperture; target indices must be a subset of
// the dataset's receivers. This is how one canonical full-ring dataset serves
// every aperture study with a shared noise realization.
ScatteringDataset restrict_aperture(const ScatteringDataset& dataset,
                                    const ApertureSelection& target);

namespace mom {

struct CellGrid {
    std::vector<Point2> centers;
    std::vector<cplx> chi;       // contrast per cell
    double cell_size = 0.0;
    double radius_equiv = 0.0;   // equivalent circle radius, cell/sqrt(pi)
};

CellGrid build_cells(const std::vector<Scatterer>& scatterers, double cell_size, double f);

// Cell-integrated Green's function over the equivalent disk of radius a:
//   off-diagonal: (-j/4) (2 pi a / k) J1(k a) H0^(2)(k rho)
//   self term:    (-j/4) [(2 pi a / k) H1^(2)(k a) - 4 j / k^2]
cplx cell_integral_offdiag(double k, double a, double rho);
cplx cell_integral_self(double k, double a);

} // namespace mom

} // namespace lsm
