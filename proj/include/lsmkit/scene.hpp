#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsmkit/geometry.hpp"
#include "lsmkit/util.hpp"

namespace lsm {

// Square imaging region centered at the origin, sampled on a uniform pixel
// grid. Pixel p = j*side + i sits at (-hw + (i+0.5)d, -hw + (j+0.5)d).
struct DoiGrid {
    double half_width = 0.375; // meters
    std::size_t side_pixels = 46;

    double delta() const { return 2.0 * half_width / static_cast<double>(side_pixels); }
    std::size_t pixel_count() const { return side_pixels * side_pixels; }
    Point2 pixel_center(std::size_t i, std::size_t j) const {
        const double d = delta();
        return {-half_width + (static_cast<double>(i) + 0.5) * d,
                -half_width + (static_cast<double>(j) + 0.5) * d};
    }
    Point2 pixel_center(std::size_t p) const {
        return pixel_center(p % side_pixels, p / side_pixels);
    }
    std::vector<Point2> pixel_centers() const;
};

// Antennas uniformly spaced on a circle, antenna m at angle 2*pi*m/count.
struct AntennaRing {
    double radius = 6.0; // meters
    std::size_t count = 50;

    double slot_degrees() const { return 360.0 / static_cast<double>(count); }
    Point2 position(std::size_t m) const {
        const double a = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(count);
        return {radius * std::cos(a), radius * std::sin(a)};
    }
    std::vector<Point2> positions() const;
};

// Contiguous arc of receive antennas. Every antenna owns a 360/count slot,
// so n antennas span n * 360/count degrees (13 -> 93.6, 20 -> 144, 25 -> 180
// on the default 50-ring).
struct ApertureSelection {
    std::vector<std::size_t> rx_indices;

    double degrees(std::size_t ring_count) const {
        return static_cast<double>(rx_indices.size()) * 360.0 / static_cast<double>(ring_count);
    }
    static ApertureSelection arc(std::size_t n_rx, std::size_t ring_count, std::size_t start = 0);
    static ApertureSelection full(std::size_t ring_count) { return arc(ring_count, ring_count); }
    // Resolves a preset span in degrees (must be a whole number of slots).
    static ApertureSelection from_degrees(double degrees, std::size_t ring_count,
                                          std::size_t start = 0);
};

struct Scatterer {
    Point2 center{0.0, 0.0};
    double radius = 0.15; // meters
    double eps_r = 2.0;   // relative permittivity
    double sigma = 0.0;   // conductivity, S/m
};

struct AlphaPolicy {
    enum class Mode { Fixed, LCurve };
    Mode mode = Mode::Fixed;
    double value = 1e-2; // used when fixed
};

struct SceneConfig {
    DoiGrid grid;
    AntennaRing ring;
    ApertureSelection aperture = ApertureSelection::full(50);
    std::vector<Scatterer> scatterers{Scatterer{}};
    std::vector<double> frequencies; // Hz, strictly increasing
    std::optional<double> snr_db;    // absent = noiseless
    std::uint64_t rng_seed = 424242;
    AlphaPolicy alpha_policy;

    // Reference setup: 0.75 m DOI at 46x46, 50-antenna ring at 6 m,
    // one centered 0.15 m cylinder, 1..8 GHz, noiseless.
    static SceneConfig reference_default();

    std::string to_json_string(int indent = 2) const;
    static SceneConfig from_json_string(const std::string& text);

    // Hash over grid + ring + scatterers + frequencies (not aperture, seed
    // or noise), recorded in dataset sidecars so loaded data can be checked
    // against the scene it was synthesized for.
    std::uint64_t geometry_hash() const;
};

// Contrast chi = eps_r + j sigma/(eps0 omega) - 1 at frequency f.
std::complex<double> contrast(const Scatterer& s, double f);

// True where the pixel center lies strictly inside any scatterer disk.
std::vector<std::uint8_t> ground_truth_mask(const DoiGrid& grid,
                                            const std::vector<Scatterer>& scatterers);

// One message per violated invariant; empty means valid.
std::vector<std::string> validate(const SceneConfig& config);

// Non-fatal advisories (far-field sanity).
std::vector<std::string> scene_warnings(const SceneConfig& config);

// Throws ValidationError listing every violation.
SceneConfig validated(SceneConfig config);

} // namespace lsm
