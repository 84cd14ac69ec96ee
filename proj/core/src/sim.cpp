#include "mgi/sim.hpp"

#include <cmath>
#include <random>

#include "mgi/image_io.hpp"

namespace mgi {

void AcquisitionConfig::validate() const {
    if (!(photons_per_pixel >= 0.0))
        throw InvalidInputError("AcquisitionConfig: photons_per_pixel must be >= 0");
    if (!(noise_photons_per_pixel >= 0.0))
        throw InvalidInputError("AcquisitionConfig: noise_photons_per_pixel must be >= 0");
    if (!(p_acc >= 0.0 && p_acc <= 1.0))
        throw InvalidInputError("AcquisitionConfig: p_acc must be in [0, 1]");
    if (!(correlator_samples >= 1.0))
        throw InvalidInputError("AcquisitionConfig: correlator_samples must be >= 1");
    if (arms != 1 && arms != 3)
        throw InvalidInputError("AcquisitionConfig: arms must be 1 or 3");
}

ObjectImage gen_constant(GridShape grid, double value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw InvalidInputError("gen_constant: value must be in [0, 1]");
    return ObjectImage{grid, Vector::Constant(grid.size(), value)};
}

ObjectImage gen_two_slit(GridShape grid, int bar_width, int gap, int bar_height) {
    if (bar_height < 0) bar_height = grid.height / 2;
    if (bar_width < 1 || gap < 1 || bar_height < 1)
        throw InvalidInputError("gen_two_slit: bar dimensions must be positive");
    const int total_w = 2 * bar_width + gap;
    if (total_w > grid.width || bar_height > grid.height)
        throw InvalidInputError("gen_two_slit: bars do not fit on the grid");

    const int x0 = (grid.width - total_w) / 2;
    const int y0 = (grid.height - bar_height) / 2;
    Vector v = Vector::Zero(grid.size());
    for (int y = y0; y < y0 + bar_height; ++y) {
        for (int x = x0; x < x0 + bar_width; ++x) v(y * grid.width + x) = 1.0;
        for (int x = x0 + bar_width + gap; x < x0 + total_w; ++x)
            v(y * grid.width + x) = 1.0;
    }
    return ObjectImage{grid, v};
}

ObjectImage gen_from_bitmap(const std::string& path, GridShape grid) {
    PgmImage src = read_pgm(path);
    Vector v(grid.size());
    for (int y = 0; y < grid.height; ++y) {
        const int sy = static_cast<int>((y + 0.5) * src.grid.height / grid.height);
        for (int x = 0; x < grid.width; ++x) {
            const int sx = static_cast<int>((x + 0.5) * src.grid.width / grid.width);
            v(y * grid.width + x) = src.values(sy * src.grid.width + sx);
        }
    }
    return ObjectImage{grid, v};
}

double noise_photon_term(double rate, int arms, double p_acc) {
    if (!(rate >= 0.0)) throw InvalidInputError("noise_photon_term: rate must be >= 0");
    if (!(p_acc >= 0.0 && p_acc <= 1.0))
        throw InvalidInputError("noise_photon_term: p_acc must be in [0, 1]");
    return arms > 1 ? rate * p_acc : rate;
}

SensingModel build_calibrated_model(const DetectorGeometry& geometry,
                                    const AcquisitionConfig& cfg) {
    cfg.validate();
    geometry.validate();
    const double d2 = static_cast<double>(geometry.detector_linear_size) *
                      geometry.detector_linear_size;
    const double budget = cfg.photons_per_pixel;
    const double mu = budget * d2;  // interior detector mean for f = 1

    // Unit gain keeps the model usable in the noiseless (budget 0) regime.
    const double gain = budget > 0.0 ? budget : 1.0;
    // Count noise averages down over the correlation samples; the mean does not.
    const double samples = cfg.correlator_samples;
    // Shared source-brightness fluctuations hit every arm the same way,
    // including a single-arm ordinary acquisition drawing on the same source.
    const double kappa = mu > 0.0 ? budget / d2 / samples : 0.0;

    // Noise photons land per pixel; a detector integrates d^2 of them.
    const double stray = noise_photon_term(cfg.noise_photons_per_pixel, cfg.arms,
                                           cfg.p_acc) * d2;
    const double var = std::max((mu + stray) / samples, 1e-12);

    const Index rows = geometry.positions() * cfg.arms;
    return SensingModel(geometry, std::vector<double>(cfg.arms, gain),
                        /*pixel_area=*/1.0, std::vector<double>(cfg.arms, kappa),
                        Vector::Constant(rows, var));
}

namespace {

// One explicit 64-bit seed, one stream per acquisition. The generator is
// std::mt19937_64 with std::normal_distribution / std::poisson_distribution;
// reproducibility is per-platform, distributional properties are portable.
struct NoiseStream {
    std::mt19937_64 rng;
    std::normal_distribution<double> gauss{0.0, 1.0};

    explicit NoiseStream(std::uint64_t seed) : rng(seed) {}

    double normal() { return gauss(rng); }
    double poisson(double mean) {
        if (mean <= 0.0) return 0.0;
        return static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
    }
};

}  // namespace

Measurement simulate_gi(const ObjectImage& f_true, const SensingModel& model,
                        const AcquisitionConfig& cfg) {
    cfg.validate();
    if (!f_true.valid() || f_true.grid != model.geometry().grid)
        throw InvalidInputError("simulate_gi: object does not match model grid");

    Measurement meas;
    meas.config = cfg;
    meas.model_fingerprint = model.fingerprint();
    Vector mean = model.apply_A(f_true.values);

    if (cfg.photons_per_pixel == 0.0 && cfg.noise_mode == NoiseMode::gaussian) {
        meas.xi = mean;
        return meas;
    }

    LowRankPlusDiag sigma = model.sigma_nu(f_true);
    NoiseStream stream(cfg.seed);
    const Index rows = mean.size();

    if (cfg.noise_mode == NoiseMode::gaussian) {
        Vector nu = Vector::Zero(rows);
        for (Index r = 0; r < sigma.factors.cols(); ++r)
            nu += sigma.factors.col(r) * stream.normal();
        for (Index i = 0; i < rows; ++i)
            nu(i) += std::sqrt(sigma.diag(i)) * stream.normal();
        meas.xi = mean + nu;
    } else {
        // Photon-counting mode: the GI correlation term modulates the Poisson
        // intensity through one shared factor. Each detector output is a
        // gain-rescaled Poisson draw, c * Poisson(intensity / c) with
        // c = sigma'_i / intensity, which matches the model's first two
        // moments exactly (mean = intensity, variance = sigma'_i).
        const double shared = sigma.factors.cols() > 0 ? stream.normal() : 0.0;
        meas.xi.resize(rows);
        for (Index i = 0; i < rows; ++i) {
            double intensity = mean(i);
            if (sigma.factors.cols() > 0) intensity += sigma.factors(i, 0) * shared;
            if (intensity <= 0.0) {
                meas.xi(i) = 0.0;
                continue;
            }
            const double c = sigma.diag(i) / intensity;
            meas.xi(i) = c * stream.poisson(intensity / c);
        }
    }
    return meas;
}

Measurement simulate_ordinary(const ObjectImage& f_true, const AcquisitionConfig& cfg,
                              const DetectorGeometry& detector) {
    AcquisitionConfig single = cfg;
    single.arms = 1;
    SensingModel model = build_calibrated_model(detector, single);
    return simulate_gi(f_true, model, single);
}

}  // namespace mgi
