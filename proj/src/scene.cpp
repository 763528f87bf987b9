#include "lsmkit/scene.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "lsmkit/util.hpp"

namespace lsm {

using nlohmann::json;

std::vector<Point2> DoiGrid::pixel_centers() const {
    std::vector<Point2> out;
    out.reserve(pixel_count());
    for (std::size_t j = 0; j < side_pixels; ++j)
        for (std::size_t i = 0; i < side_pixels; ++i) out.push_back(pixel_center(i, j));
    return out;
}

std::vector<Point2> AntennaRing::positions() const {
    std::vector<Point2> out;
    out.reserve(count);
    for (std::size_t m = 0; m < count; ++m) out.push_back(position(m));
    return out;
}

ApertureSelection ApertureSelection::arc(std::size_t n_rx, std::size_t ring_count,
                                         std::size_t start) {
    ApertureSelection sel;
    sel.rx_indices.reserve(n_rx);
    for (std::size_t i = 0; i < n_rx; ++i) sel.rx_indices.push_back((start + i) % ring_count);
    return sel;
}

ApertureSelection ApertureSelection::from_degrees(double degrees, std::size_t ring_count,
                                                  std::size_t start) {
    const double slot = 360.0 / static_cast<double>(ring_count);
    const double n_real = degrees / slot;
    const auto n = static_cast<std::size_t>(std::llround(n_real));
    if (n < 1 || n > ring_count || std::abs(n_real - static_cast<double>(n)) > 1e-9)
        throw ValidationError("aperture: " + std::to_string(degrees) +
                              " deg is not a whole number of " + std::to_string(slot) +
                              " deg slots");
    return arc(n, ring_count, start);
}

SceneConfig SceneConfig::reference_default() {
    SceneConfig c;
    c.aperture = ApertureSelection::full(c.ring.count);
    c.frequencies.clear();
    for (int g = 1; g <= 8; ++g) c.frequencies.push_back(1e9 * g);
    return c;
}

std::complex<double> contrast(const Scatterer& s, double f) {
    if (!(f > 0.0)) throw ValidationError("contrast: frequency must be > 0");
    const double omega = 2.0 * kPi * f;
    return {s.eps_r - 1.0, s.sigma / (kVacuumPermittivity * omega)};
}

std::vector<std::uint8_t> ground_truth_mask(const DoiGrid& grid,
                                            const std::vector<Scatterer>& scatterers) {
    std::vector<std::uint8_t> mask(grid.pixel_count(), 0);
    for (std::size_t p = 0; p < mask.size(); ++p) {
        const Point2 c = grid.pixel_center(p);
        for (const Scatterer& s : scatterers) {
            if (distance(c, s.center) < s.radius) {
                mask[p] = 1;
                break;
            }
        }
    }
    return mask;
}

std::vector<std::string> validate(const SceneConfig& config) {
    std::vector<std::string> errors;
    auto fail = [&](std::string msg) { errors.push_back(std::move(msg)); };

    if (!(config.grid.half_width > 0.0)) fail("grid: half_width must be > 0");
    if (config.grid.side_pixels < 2) fail("grid: side_pixels must be >= 2");

    if (!(config.ring.radius > 0.0)) fail("ring: radius must be > 0");
    if (config.ring.count < 3) fail("ring: need at least 3 antennas");

    const auto& rx = config.aperture.rx_indices;
    if (rx.empty()) {
        fail("aperture: empty receiver selection");
    } else {
        if (rx.size() > config.ring.count) fail("aperture: more receivers than antennas");
        for (std::size_t i = 0; i < rx.size(); ++i) {
            if (rx[i] >= config.ring.count) {
                fail("aperture: index " + std::to_string(rx[i]) + " outside ring");
                break;
            }
            if (i > 0 && rx[i] != (rx[i - 1] + 1) % config.ring.count) {
                fail("aperture: receiver indices must form a contiguous ascending arc");
                break;
            }
        }
    }

    if (config.scatterers.empty()) fail("scatterers: need at least one");
    for (std::size_t i = 0; i < config.scatterers.size(); ++i) {
        const Scatterer& s = config.scatterers[i];
        const std::string tag = "scatterer[" + std::to_string(i) + "]: ";
        if (!(s.radius > 0.0)) fail(tag + "radius must be > 0");
        if (s.eps_r < 1.0) fail(tag + "eps_r must be >= 1");
        if (s.sigma < 0.0) fail(tag + "sigma must be >= 0");
        const double hw = config.grid.half_width;
        if (std::abs(s.center.x) + s.radius >= hw || std::abs(s.center.y) + s.radius >= hw)
            fail(tag + "disk must lie strictly inside the DOI");
    }

    if (config.frequencies.empty()) fail("frequencies: empty frequency list");
    for (std::size_t i = 0; i < config.frequencies.size(); ++i) {
        if (!(config.frequencies[i] > 0.0)) {
            fail("frequencies: all must be > 0");
            break;
        }
        if (i > 0 && config.frequencies[i] <= config.frequencies[i - 1]) {
            fail("frequencies: must be strictly increasing");
            break;
        }
    }

    if (config.snr_db && !std::isfinite(*config.snr_db)) fail("snr_db: must be finite");

    if (config.alpha_policy.mode == AlphaPolicy::Mode::Fixed && !(config.alpha_policy.value > 0.0))
        fail("alpha_policy: fixed value must be > 0");

    return errors;
}

std::vector<std::string> scene_warnings(const SceneConfig& config) {
    std::vector<std::string> warnings;
    const double diagonal = 2.0 * config.grid.half_width * std::sqrt(2.0);
    if (config.ring.radius <= 2.0 * diagonal)
        warnings.push_back("ring radius " + std::to_string(config.ring.radius) +
                           " m is not in the far field of the DOI (need > " +
                           std::to_string(2.0 * diagonal) + " m)");
    return warnings;
}

SceneConfig validated(SceneConfig config) {
    auto errors = validate(config);
    if (!errors.empty()) {
        std::ostringstream ss;
        ss << "invalid scene config (" << errors.size() << " problem(s)):";
        for (const auto& e : errors) ss << "\n  - " << e;
        throw ValidationError(ss.str(), std::move(errors));
    }
    return config;
}

namespace {

json aperture_to_json(const ApertureSelection& a) {
    return json{{"rx_indices", a.rx_indices}};
}

ApertureSelection aperture_from_json(const json& j, std::size_t ring_count) {
    ApertureSelection sel;
    if (j.contains("rx_indices")) {
        sel.rx_indices = j.at("rx_indices").get<std::vector<std::size_t>>();
    } else if (j.contains("degrees")) {
        sel = ApertureSelection::from_degrees(j.at("degrees").get<double>(), ring_count,
                                              j.value("start_index", std::size_t{0}));
    } else {
        throw ValidationError("aperture: need either rx_indices or degrees");
    }
    return sel;
}

} // namespace

std::string SceneConfig::to_json_string(int indent) const {
    json scat = json::array();
    for (const Scatterer& s : scatterers)
        scat.push_back({{"center_m", {s.center.x, s.center.y}},
                        {"radius_m", s.radius},
                        {"eps_r", s.eps_r},
                        {"sigma_s_per_m", s.sigma}});
    json j{
        {"grid", {{"half_width_m", grid.half_width}, {"side_pixels", grid.side_pixels}}},
        {"ring", {{"radius_m", ring.radius}, {"antenna_count", ring.count}}},
        {"aperture", aperture_to_json(aperture)},
        {"scatterers", scat},
        {"frequencies_hz", frequencies},
        {"rng_seed", rng_seed},
        {"alpha_policy",
         {{"mode", alpha_policy.mode == AlphaPolicy::Mode::Fixed ? "fixed" : "l_curve"},
          {"value", alpha_policy.value}}},
    };
    if (snr_db) j["snr_db"] = *snr_db;
    return j.dump(indent);
}

SceneConfig SceneConfig::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scene json parse error: ") + e.what());
    }
    try {
        SceneConfig c = SceneConfig::reference_default();
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            c.grid.half_width = g.value("half_width_m", c.grid.half_width);
            c.grid.side_pixels = g.value("side_pixels", c.grid.side_pixels);
        }
        if (j.contains("ring")) {
            const auto& r = j.at("ring");
            c.ring.radius = r.value("radius_m", c.ring.radius);
            c.ring.count = r.value("antenna_count", c.ring.count);
        }
        c.aperture = j.contains("aperture") ? aperture_from_json(j.at("aperture"), c.ring.count)
                                            : ApertureSelection::full(c.ring.count);
        if (j.contains("scatterers")) {
            c.scatterers.clear();
            for (const auto& js : j.at("scatterers")) {
                Scatterer s;
                if (js.contains("center_m")) {
                    s.center.x = js.at("center_m").at(0).get<double>();
                    s.center.y = js.at("center_m").at(1).get<double>();
                }
                s.radius = js.value("radius_m", s.radius);
                s.eps_r = js.value("eps_r", s.eps_r);
                s.sigma = js.value("sigma_s_per_m", s.sigma);
                c.scatterers.push_back(s);
            }
        }
        if (j.contains("frequencies_hz"))
            c.frequencies = j.at("frequencies_hz").get<std::vector<double>>();
        if (j.contains("snr_db") && !j.at("snr_db").is_null())
            c.snr_db = j.at("snr_db").get<double>();
        if (j.contains("rng_seed")) c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        if (j.contains("alpha_policy")) {
            const auto& a = j.at("alpha_policy");
            const std::string mode = a.value("mode", "fixed");
            if (mode == "fixed")
                c.alpha_policy.mode = AlphaPolicy::Mode::Fixed;
            else if (mode == "l_curve")
                c.alpha_policy.mode = AlphaPolicy::Mode::LCurve;
            else
                throw ValidationError("alpha_policy: unknown mode '" + mode + "'");
            c.alpha_policy.value = a.value("value", c.alpha_policy.value);
        }
        return c;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scene json field error: ") + e.what());
    }
}

std::uint64_t SceneConfig::geometry_hash() const {
    // aperture is a view on the data, not scene geometry, so it stays out:
    // one full-ring dataset must match every aperture study of its scene
    std::ostringstream ss;
    ss.precision(17);
    ss << grid.half_width << '|' << grid.side_pixels << '|' << ring.radius << '|' << ring.count
       << '|';
    for (const auto& s : scatterers)
        ss << s.center.x << ',' << s.center.y << ',' << s.radius << ',' << s.eps_r << ','
           << s.sigma << ';';
    ss << '|';
    for (double f : frequencies) ss << f << ',';
    return fnv1a(ss.str());
}

} // namespace lsm
