#include "mgi/measurement_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "mgi/config.hpp"

namespace mgi {

namespace {

constexpr char kMagic[8] = {'M', 'G', 'I', 'M', 'E', 'A', 'S', '1'};

void put_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(std::istream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw IoError("read_measurement: truncated header in " + path);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64_le(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64_le(std::istream& in, const std::string& path) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw IoError("read_measurement: truncated payload in " + path);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

// Per-arm detector grid as (rows, cols).
std::pair<int, int> detector_dims(const DetectorGeometry& g) {
    if (g.placement == DetectorPlacement::sliding)
        return {g.grid.height, g.grid.width};
    const int d = g.detector_linear_size;
    return {(g.grid.height + d - 1) / d, (g.grid.width + d - 1) / d};
}

}  // namespace

void write_measurement(const std::string& path, const Measurement& meas,
                       const DetectorGeometry& geometry) {
    auto [rows, cols] = detector_dims(geometry);
    const Index expected = static_cast<Index>(meas.config.arms) * rows * cols;
    if (meas.xi.size() != expected)
        throw InvalidInputError("write_measurement: payload size mismatch");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_measurement: cannot open " + path);
    out.write(kMagic, sizeof kMagic);
    put_u32_le(out, static_cast<std::uint32_t>(meas.config.arms));
    put_u32_le(out, static_cast<std::uint32_t>(rows));
    put_u32_le(out, static_cast<std::uint32_t>(cols));
    for (Index i = 0; i < meas.xi.size(); ++i) put_f64_le(out, meas.xi(i));
    if (!out) throw IoError("write_measurement: write failed for " + path);
}

Measurement read_measurement(const std::string& path, GridShape* detector_grid,
                             int* arms_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_measurement: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw IoError("read_measurement: bad magic in " + path);

    const std::uint32_t arms = get_u32_le(in, path);
    const std::uint32_t rows = get_u32_le(in, path);
    const std::uint32_t cols = get_u32_le(in, path);
    if (arms == 0 || rows == 0 || cols == 0)
        throw IoError("read_measurement: degenerate dimensions in " + path);

    Measurement meas;
    meas.config.arms = static_cast<int>(arms);
    meas.xi.resize(static_cast<Index>(arms) * rows * cols);
    for (Index i = 0; i < meas.xi.size(); ++i) meas.xi(i) = get_f64_le(in, path);
    if (detector_grid) *detector_grid = {static_cast<int>(cols), static_cast<int>(rows)};
    if (arms_out) *arms_out = static_cast<int>(arms);
    return meas;
}

void write_measurement_meta(const std::string& path, const Measurement& meas,
                            const DetectorGeometry& geometry) {
    std::ofstream out(path);
    if (!out) throw IoError("write_measurement_meta: cannot open " + path);
    out << "# acquisition metadata\n";
    out << "width = " << geometry.grid.width << "\n";
    out << "height = " << geometry.grid.height << "\n";
    out << "detector_size = " << geometry.detector_linear_size << "\n";
    out << "placement = "
        << (geometry.placement == DetectorPlacement::sliding ? "sliding" : "tiled")
        << "\n";
    out << "arms = " << meas.config.arms << "\n";
    out.precision(17);
    out << "photons = " << meas.config.photons_per_pixel << "\n";
    out << "noise_photons = " << meas.config.noise_photons_per_pixel << "\n";
    out << "p_acc = " << meas.config.p_acc << "\n";
    out << "correlator_samples = " << meas.config.correlator_samples << "\n";
    out << "seed = " << meas.config.seed << "\n";
    out << "noise_mode = "
        << (meas.config.noise_mode == NoiseMode::gaussian ? "gaussian" : "poisson")
        << "\n";
    out << "fingerprint = " << meas.model_fingerprint << "\n";
    if (!out) throw IoError("write_measurement_meta: write failed for " + path);
}

MeasurementMeta read_measurement_meta(const std::string& path) {
    KeyValueConfig cfg = KeyValueConfig::from_file(path);
    cfg.restrict_keys({"width", "height", "detector_size", "placement", "arms",
                       "photons", "noise_photons", "p_acc", "correlator_samples",
                       "seed", "noise_mode", "fingerprint"});
    MeasurementMeta meta;
    meta.geometry.grid.width = cfg.get_int("width");
    meta.geometry.grid.height = cfg.get_int("height");
    meta.geometry.detector_linear_size = cfg.get_int("detector_size");
    const std::string placement = cfg.get_string("placement");
    if (placement == "sliding")
        meta.geometry.placement = DetectorPlacement::sliding;
    else if (placement == "tiled")
        meta.geometry.placement = DetectorPlacement::tiled;
    else
        throw ConfigError("read_measurement_meta: unknown placement " + placement);
    meta.config.arms = cfg.get_int("arms");
    meta.config.photons_per_pixel = cfg.get_double("photons");
    meta.config.noise_photons_per_pixel = cfg.get_double("noise_photons");
    meta.config.p_acc = cfg.get_double("p_acc");
    meta.config.correlator_samples = cfg.get_double("correlator_samples");
    meta.config.seed = cfg.get_uint64("seed");
    const std::string mode = cfg.get_string("noise_mode");
    if (mode == "gaussian")
        meta.config.noise_mode = NoiseMode::gaussian;
    else if (mode == "poisson")
        meta.config.noise_mode = NoiseMode::poisson;
    else
        throw ConfigError("read_measurement_meta: unknown noise_mode " + mode);
    meta.model_fingerprint = cfg.get_uint64("fingerprint");
    return meta;
}

}  // namespace mgi
