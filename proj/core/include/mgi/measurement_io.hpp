#ifndef MGI_MEASUREMENT_IO_HPP
#define MGI_MEASUREMENT_IO_HPP

#include <string>

#include "mgi/sim.hpp"

namespace mgi {

// Measurement binary layout, bit-exact across platforms:
//   8-byte magic "MGIMEAS1",
//   three little-endian uint32: arms, detector rows, detector cols,
//   payload: arms * rows * cols little-endian 64-bit floats.
void write_measurement(const std::string& path, const Measurement& meas,
                       const DetectorGeometry& geometry);
Measurement read_measurement(const std::string& path, GridShape* detector_grid = nullptr,
                             int* arms = nullptr);

// Companion metadata (acquisition parameters and model fingerprint) as flat
// key = value text next to the binary; reconstruction uses it to rebuild the
// matching model and refuse mismatched inputs.
void write_measurement_meta(const std::string& path, const Measurement& meas,
                            const DetectorGeometry& geometry);
struct MeasurementMeta {
    AcquisitionConfig config;
    DetectorGeometry geometry;
    std::uint64_t model_fingerprint = 0;
};
MeasurementMeta read_measurement_meta(const std::string& path);

}  // namespace mgi

#endif
