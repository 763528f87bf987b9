#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsmkit/forward.hpp"
#include "lsmkit/numerics.hpp"
#include "lsmkit/scene.hpp"

namespace lsm {

enum class Method { LsmSingle, MlsmParallel, MfMlsm };

// How multi-frequency information is combined in MF-MLSM.
//   Filtered (default): apply the matched filter per frequency, solve each
//     1 x N_Tx filtered equation by Tikhonov, combine like the parallel
//     indicator. This is the reading that reproduces the reference results.
//   Stacked: one coherent N_f x N_Tx system from the gain-normalized rows,
//     RHS = ones. Kept for comparison; its conditioning degrades at the true
//     pixel, which inverts the indicator there.
//   PhaseCorrected: pre-rotate per-receiver propagation phases, then plain
//     parallel combination. A row-unitary, so it coincides with MLSM.
enum class MfMode { Filtered, Stacked, PhaseCorrected };

const char* method_name(Method m);
const char* mf_mode_name(MfMode m);

// Solution of the far-field equation at one pixel (one frequency for LSM).
struct PixelSolve {
    CVector g;
    double residual_norm = 0.0;
    std::size_t pixel = 0;
    std::optional<std::size_t> f_index;
};

struct IndicatorMap {
    std::vector<double> values; // nonnegative, row-major over the DOI grid
    std::size_t side = 0;
    Method method = Method::MlsmParallel;
    MfMode mf_mode = MfMode::Filtered;
    double alpha = 0.0;
    std::vector<double> frequencies;
    ApertureSelection aperture;
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
};

struct RunOptions {
    MfMode mf_mode = MfMode::Filtered;
    unsigned threads = 0;              // 0 = hardware concurrency
    double indicator_cap = 1e12;
    std::size_t f_index = 0;           // frequency used by Method::LsmSingle
    bool fail_fast = true;
};

// Shared per-dataset precomputation: receiver positions and the
// per-frequency SVDs of F_k (pixel-independent, reused across all pixels).
class InversionContext {
public:
    InversionContext(const ScatteringDataset& dataset, const AntennaRing& ring,
                     const DoiGrid& grid, double indicator_cap = 1e12);

    const ScatteringDataset& dataset() const { return *dataset_; }
    const DoiGrid& grid() const { return grid_; }
    const SvdResult& svd_at(std::size_t f_index) const { return svds_[f_index]; }
    Point2 rx_position(std::size_t row) const { return rx_positions_[row]; }
    double indicator_cap() const { return cap_; }

    CVector greens(std::size_t pixel, std::size_t f_index) const;

private:
    const ScatteringDataset* dataset_;
    DoiGrid grid_;
    std::vector<Point2> rx_positions_;
    std::vector<SvdResult> svds_;
    double cap_;
};

// Tikhonov solve of F_k g = G(pixel) at one frequency (the far-field
// equation); the single-frequency indicator is ||g||^-2.
PixelSolve lsm_single(const InversionContext& ctx, std::size_t f_index, std::size_t pixel,
                      double alpha);

// Parallel multi-frequency indicator (sum of ||g_k||^-2, square-rooted).
double mlsm_parallel(const InversionContext& ctx, std::size_t pixel, double alpha);

struct MatchedFilterRow {
    CVector row;       // G(pixel)^H F_k, length N_Tx
    double gain = 0.0; // ||G(pixel)||^2
};

MatchedFilterRow matched_filter_row(const InversionContext& ctx, std::size_t f_index,
                                    std::size_t pixel);

// Matched-filtering-enhanced indicator: stacks the gain-normalized filtered
// rows of all frequencies into one system M g = 1 and returns ||g||^-2.
double mf_mlsm(const InversionContext& ctx, std::size_t pixel, double alpha,
               MfMode mode = MfMode::Filtered);

// Evaluates the chosen method at every DOI pixel. Pixel computations are
// pure and run in parallel; output is identical regardless of thread count.
IndicatorMap run_method(const ScatteringDataset& dataset, const SceneConfig& scene, Method method,
                        double alpha, const RunOptions& options = {});

// L-curve alpha for a whole configuration, evaluated at the DOI-center pixel:
// geometric mean of the per-frequency corners for LSM/MLSM, the corner of the
// stacked matched-filter system for MF-MLSM.
double select_alpha_l_curve(const InversionContext& ctx, Method method,
                            std::span<const double> alpha_grid,
                            MfMode mode = MfMode::Filtered);

} // namespace lsm
