#include "lsmkit/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace lsm {

Normalized normalize(std::span<const double> values) {
    Normalized out;
    out.values.assign(values.begin(), values.end());
    if (values.empty()) {
        out.constant_input = true;
        return out;
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        out.constant_input = true;
        return out;
    }
    const double inv = 1.0 / (hi - lo);
    for (double& v : out.values) v = (v - lo) * inv;
    return out;
}

Normalized normalize(const IndicatorMap& map) { return normalize(std::span{map.values}); }

ThresholdPolicy ThresholdPolicy::parse(const std::string& text) {
    ThresholdPolicy p;
    if (text == "otsu") {
        p.kind = Kind::Otsu;
        return p;
    }
    if (text.rfind("fixed:", 0) == 0) {
        p.kind = Kind::Fixed;
        try {
            p.tau = std::stod(text.substr(6));
        } catch (...) {
            throw ValidationError("threshold: cannot parse '" + text + "'");
        }
        if (!(p.tau >= 0.0) || !(p.tau <= 1.0))
            throw ValidationError("threshold: fixed tau must lie in [0,1]");
        return p;
    }
    throw ValidationError("threshold: expected 'otsu' or 'fixed:<tau>', got '" + text + "'");
}

std::string ThresholdPolicy::describe() const {
    if (kind == Kind::Otsu) return "otsu";
    std::ostringstream ss;
    ss << "fixed:" << tau;
    return ss.str();
}

double otsu_threshold(std::span<const double> normalized) {
    constexpr int kBins = 256;
    std::array<std::size_t, kBins> hist{};
    for (double v : normalized) {
        int b = static_cast<int>(v * kBins);
        b = std::clamp(b, 0, kBins - 1);
        ++hist[static_cast<std::size_t>(b)];
    }
    const double total = static_cast<double>(normalized.size());
    double sum_all = 0.0;
    for (int b = 0; b < kBins; ++b) sum_all += b * static_cast<double>(hist[b]);

    double best_var = -1.0;
    int best_t = 0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < kBins - 1; ++t) {
        w0 += static_cast<double>(hist[t]);
        if (w0 == 0.0) continue;
        const double w1 = total - w0;
        if (w1 == 0.0) break;
        sum0 += t * static_cast<double>(hist[t]);
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return static_cast<double>(best_t + 1) / kBins;
}

BinarizedMap binarize(std::span<const double> normalized, const ThresholdPolicy& policy) {
    BinarizedMap out;
    out.tau = policy.kind == ThresholdPolicy::Kind::Otsu ? otsu_threshold(normalized) : policy.tau;
    out.mask.resize(normalized.size());
    for (std::size_t i = 0; i < normalized.size(); ++i)
        out.mask[i] = normalized[i] >= out.tau ? 1 : 0;
    return out;
}

ReconstructionReport coverage(std::span<const std::uint8_t> binary,
                              std::span<const std::uint8_t> truth) {
    if (binary.size() != truth.size())
        throw ValidationError("coverage: map and ground truth shapes differ");
    ReconstructionReport r;
    for (std::size_t i = 0; i < binary.size(); ++i) {
        r.truth_pixels += truth[i] ? 1 : 0;
        if (binary[i] && truth[i]) ++r.true_positive_pixels;
        if (binary[i] && !truth[i]) ++r.false_positive_pixels;
    }
    if (r.truth_pixels > 0)
        r.coverage_percent = 100.0 * static_cast<double>(r.true_positive_pixels) /
                             static_cast<double>(r.truth_pixels);
    return r;
}

std::string ReconstructionReport::csv_header() {
    return "scenario,method,coverage_percent,true_positive_pixels,false_positive_pixels,"
           "truth_pixels,threshold_used";
}

std::string ReconstructionReport::to_csv_row() const {
    std::ostringstream ss;
    ss.precision(10);
    ss << scenario << ',' << method << ',' << coverage_percent << ',' << true_positive_pixels
       << ',' << false_positive_pixels << ',' << truth_pixels << ',' << threshold_used;
    return ss.str();
}

std::string ReconstructionReport::to_json() const {
    std::ostringstream ss;
    ss.precision(10);
    ss << "{\"scenario\":\"" << scenario << "\",\"method\":\"" << method
       << "\",\"coverage_percent\":" << coverage_percent
       << ",\"true_positive_pixels\":" << true_positive_pixels
       << ",\"false_positive_pixels\":" << false_positive_pixels
       << ",\"truth_pixels\":" << truth_pixels << ",\"threshold_used\":" << threshold_used << "}";
    return ss.str();
}

} // namespace lsm
