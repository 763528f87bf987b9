#include "lsmkit/dataset_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "json.hpp"
#include "lsmkit/metrics.hpp"

namespace lsm {

namespace {

constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    Reader(const std::string& bytes, std::string name) : bytes_(bytes), name_(std::move(name)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes_[pos_ + i]);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes_[pos_ + i]);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(bytes_[pos_++]);
    }
    std::string raw(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool exhausted() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > bytes_.size())
            throw ValidationError(name_ + ": truncated LSMD file");
    }
    const std::string& bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

} // namespace

void save_dataset(const std::filesystem::path& base, const ScatteringDataset& dataset) {
    dataset.check_consistent();

    std::string bin;
    bin.reserve(64 + dataset.n_freq() * dataset.n_rx() * dataset.n_tx * 16);
    bin += "LSMD";
    put_u32(bin, kVersion);
    put_u32(bin, static_cast<std::uint32_t>(dataset.n_freq()));
    put_u32(bin, static_cast<std::uint32_t>(dataset.n_rx()));
    put_u32(bin, static_cast<std::uint32_t>(dataset.n_tx));
    put_u64(bin, dataset.seed);
    bin.push_back(dataset.noise_applied ? 1 : 0);
    put_f64(bin, dataset.snr_db.value_or(0.0));
    for (const CMatrix& m : dataset.matrices) {
        for (const cplx& v : m.data()) { // column-major storage = tx-major order
            put_f64(bin, v.real());
            put_f64(bin, v.imag());
        }
    }

    std::filesystem::path bin_path = base;
    bin_path += ".lsmd";
    atomic_write_file(bin_path, bin);

    nlohmann::json meta{
        {"format", "LSMD"},
        {"version", kVersion},
        {"frequencies_hz", dataset.frequencies},
        {"rx_indices", dataset.aperture.rx_indices},
        {"n_tx", dataset.n_tx},
        {"noise_applied", dataset.noise_applied},
        {"seed", dataset.seed},
        {"geometry_hash", dataset.geometry_hash},
    };
    if (dataset.snr_db) meta["snr_db"] = *dataset.snr_db;
    std::filesystem::path meta_path = base;
    meta_path += ".json";
    atomic_write_file(meta_path, meta.dump(2) + "\n");
}

ScatteringDataset load_dataset(const std::filesystem::path& base,
                               const std::optional<ApertureSelection>& aperture) {
    std::filesystem::path bin_path = base, meta_path = base;
    bin_path += ".lsmd";
    meta_path += ".json";

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_file(meta_path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(meta_path.string() + ": bad sidecar: " + e.what());
    }

    const std::string bytes = read_file(bin_path);
    Reader r(bytes, bin_path.string());
    if (r.raw(4) != "LSMD") throw ValidationError(bin_path.string() + ": bad magic");
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw ValidationError(bin_path.string() + ": unsupported version " +
                              std::to_string(version));

    ScatteringDataset ds;
    const std::uint32_t n_freq = r.u32();
    const std::uint32_t n_rx = r.u32();
    const std::uint32_t n_tx = r.u32();
    ds.n_tx = n_tx;
    ds.seed = r.u64();
    ds.noise_applied = r.u8() != 0;
    const double snr = r.f64();

    try {
        ds.frequencies = meta.at("frequencies_hz").get<std::vector<double>>();
        ds.aperture.rx_indices = meta.at("rx_indices").get<std::vector<std::size_t>>();
        ds.geometry_hash = meta.value("geometry_hash", std::uint64_t{0});
        if (meta.contains("snr_db")) ds.snr_db = meta.at("snr_db").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(meta_path.string() + ": sidecar field error: " + e.what());
    }
    if (ds.noise_applied && !ds.snr_db) ds.snr_db = snr;
    if (ds.frequencies.size() != n_freq)
        throw ValidationError(base.string() + ": sidecar frequency count disagrees with binary");
    if (ds.aperture.rx_indices.size() != n_rx)
        throw ValidationError(base.string() + ": sidecar receiver count disagrees with binary");

    ds.matrices.reserve(n_freq);
    for (std::uint32_t k = 0; k < n_freq; ++k) {
        CMatrix m(n_rx, n_tx);
        for (cplx& v : m.data()) {
            const double re = r.f64();
            const double im = r.f64();
            v = {re, im};
        }
        ds.matrices.push_back(std::move(m));
    }
    if (!r.exhausted()) throw ValidationError(bin_path.string() + ": trailing bytes");
    ds.check_consistent();

    if (aperture) return restrict_aperture(ds, *aperture);
    return ds;
}

void write_indicator_csv(const std::filesystem::path& path, const IndicatorMap& map) {
    std::ostringstream ss;
    ss.precision(17);
    const std::size_t side = map.side;
    for (std::size_t row = 0; row < side; ++row) {
        const std::size_t j = side - 1 - row; // row 0 = top of DOI
        for (std::size_t i = 0; i < side; ++i) {
            if (i) ss << ',';
            ss << map.values[j * side + i];
        }
        ss << '\n';
    }
    atomic_write_file(path, ss.str());
}

void write_indicator_pgm(const std::filesystem::path& path, const IndicatorMap& map) {
    const Normalized norm = normalize(map);
    const std::size_t side = map.side;
    std::string out = "P5\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
    out.reserve(out.size() + side * side);
    for (std::size_t row = 0; row < side; ++row) {
        const std::size_t j = side - 1 - row;
        for (std::size_t i = 0; i < side; ++i) {
            const double v = norm.values[j * side + i];
            out.push_back(static_cast<char>(
                static_cast<unsigned char>(std::lround(255.0 * v))));
        }
    }
    atomic_write_file(path, out);
}

void write_indicator_json(const std::filesystem::path& path, const IndicatorMap& map) {
    double lo = 0.0, hi = 0.0;
    if (!map.values.empty()) {
        lo = *std::min_element(map.values.begin(), map.values.end());
        hi = *std::max_element(map.values.begin(), map.values.end());
    }
    nlohmann::json j{
        {"method", method_name(map.method)},
        {"mf_mode", mf_mode_name(map.mf_mode)},
        {"alpha", map.alpha},
        {"frequencies_hz", map.frequencies},
        {"rx_indices", map.aperture.rx_indices},
        {"side_pixels", map.side},
        {"seed", map.seed},
        {"value_min", lo},
        {"value_max", hi},
    };
    if (map.snr_db) j["snr_db"] = *map.snr_db;
    atomic_write_file(path, j.dump(2) + "\n");
}

} // namespace lsm
