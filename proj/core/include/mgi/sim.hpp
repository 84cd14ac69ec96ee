#ifndef MGI_SIM_HPP
#define MGI_SIM_HPP

#include <cstdint>
#include <string>

#include "mgi/sensing.hpp"
#include "mgi/types.hpp"

namespace mgi {

enum class NoiseMode { gaussian, poisson };

struct AcquisitionConfig {
    double photons_per_pixel = 1.0;
    double noise_photons_per_pixel = 0.0;
    double p_acc = 0.1;  // coincidence-window acceptance probability
    // Correlation samples (pump pulses) averaged into each detector output;
    // scales all count noise down by 1/samples while the mean stays put.
    double correlator_samples = 1000.0;
    std::uint64_t seed = 0;
    NoiseMode noise_mode = NoiseMode::gaussian;
    int arms = 3;  // 3 for GI, 1 for the ordinary-image baseline

    void validate() const;
};

struct Measurement {
    Vector xi;
    AcquisitionConfig config;
    std::uint64_t model_fingerprint = 0;
};

// Test objects.
ObjectImage gen_constant(GridShape grid, double value);
ObjectImage gen_two_slit(GridShape grid, int bar_width = 8, int gap = 12,
                         int bar_height = -1);
ObjectImage gen_from_bitmap(const std::string& path, GridShape grid);

// Additive per-detector noise variance from stray photons: GI arms keep only
// the fraction passing the coincidence window, the ordinary image the full rate.
double noise_photon_term(double rate, int arms, double p_acc);

// Calibrated measurement model for a photon budget: arm gain is chosen so an
// interior detector reads photons_per_pixel * d^2 counts for a fully
// transparent object, the GI covariance scale makes that reading's correlation
// variance equal to its mean, and sigma_prime carries a worst-case shot-noise
// diagonal plus the noise-photon term.
SensingModel build_calibrated_model(const DetectorGeometry& geometry,
                                    const AcquisitionConfig& cfg);

Measurement simulate_gi(const ObjectImage& f_true, const SensingModel& model,
                        const AcquisitionConfig& cfg);

// Single-arm direct image: detector response plus shot noise plus the full
// noise-photon rate (no correlator suppression).
Measurement simulate_ordinary(const ObjectImage& f_true, const AcquisitionConfig& cfg,
                              const DetectorGeometry& detector);

}  // namespace mgi

#endif
