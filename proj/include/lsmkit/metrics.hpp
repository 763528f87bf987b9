#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lsmkit/inversion.hpp"

namespace lsm {

struct Normalized {
    std::vector<double> values; // in [0,1]
    bool constant_input = false; // true -> all zeros, caller may warn
};

// (v - min) / (max - min); a constant map normalizes to all zeros.
Normalized normalize(std::span<const double> values);
Normalized normalize(const IndicatorMap& map);

struct ThresholdPolicy {
    enum class Kind { Fixed, Otsu };
    Kind kind = Kind::Otsu;
    double tau = 0.5; // used when fixed

    // "otsu" or "fixed:<tau>"
    static ThresholdPolicy parse(const std::string& text);
    std::string describe() const;
};

// Maximum between-class variance over a 256-bin histogram of normalized
// values; returns the threshold in [0,1].
double otsu_threshold(std::span<const double> normalized);

struct BinarizedMap {
    std::vector<std::uint8_t> mask; // 1 where value >= tau
    double tau = 0.0;
};

BinarizedMap binarize(std::span<const double> normalized, const ThresholdPolicy& policy);

struct ReconstructionReport {
    double coverage_percent = 0.0;        // 100 * |binary AND truth| / |truth|
    std::size_t true_positive_pixels = 0; // |binary AND truth|
    std::size_t false_positive_pixels = 0;
    std::size_t truth_pixels = 0;
    double threshold_used = 0.0;
    std::string method;
    std::string scenario;

    static std::string csv_header();
    std::string to_csv_row() const;
    std::string to_json() const;
};

ReconstructionReport coverage(std::span<const std::uint8_t> binary,
                              std::span<const std::uint8_t> truth);

} // namespace lsm
