#ifndef MGI_SENSING_HPP
#define MGI_SENSING_HPP

#include <array>
#include <cstdint>
#include <optional>

#include "mgi/linalg.hpp"
#include "mgi/types.hpp"

namespace mgi {

enum class DetectorPlacement { sliding, tiled };

struct DetectorGeometry {
    GridShape grid;
    int detector_linear_size = 3;
    DetectorPlacement placement = DetectorPlacement::sliding;

    // Number of detector positions (rows of B).
    Index positions() const;
    void validate() const;
};

// Detector matrix B: row p sums pixel contributions inside detector footprint
// p (box response, cropped at the image border). Sliding placement puts one
// detector position at every pixel, giving a square matrix; the footprint of
// row p is the d x d window with origin p, i.e. the detector centered at
// p + (d-1)/2.
Matrix build_detector_matrix(const DetectorGeometry& geometry);
SparseMatrix build_detector_matrix_sparse(const DetectorGeometry& geometry);

// Assembled measurement model: A = stacked [B_j C_j] with C_j a scalar
// multiple of the identity (arm gain times pixel area), noise covariance
// Sigma_nu(f) = g g^T + diag(sigma_prime) with g the stacked per-arm vectors
// sqrt(kappa_j) B_j f, and ideal-device matrix U (identity unless set).
class SensingModel {
  public:
    SensingModel(DetectorGeometry geometry, std::vector<double> arm_scales,
                 double pixel_area, std::vector<double> cov_scales,
                 Vector sigma_prime);

    int arms() const { return static_cast<int>(arm_scales_.size()); }
    Index n() const { return geometry_.grid.size(); }
    Index m() const { return arms() * geometry_.positions(); }
    const DetectorGeometry& geometry() const { return geometry_; }
    const std::vector<double>& arm_scales() const { return arm_scales_; }
    const std::vector<double>& cov_scales() const { return cov_scales_; }
    double pixel_area() const { return pixel_area_; }
    const Vector& sigma_prime() const { return sigma_prime_; }
    double sigma_prime_floor() const { return sigma_prime_floor_; }

    void set_ideal_device(Matrix u);
    bool has_custom_ideal_device() const { return ideal_device_.has_value(); }
    // Materializes U (identity by default).
    Matrix ideal_device() const;
    Vector apply_ideal_device(const Vector& v) const;
    Index ideal_rows() const;

    Vector apply_A(const Vector& f) const;
    Vector apply_At(const Vector& v) const;
    Matrix dense_A() const;

    LowRankPlusDiag sigma_nu(const ObjectImage& f_assumed) const;

    // A^T Sigma_nu(f)^{-1} A, assembled without materializing Sigma_nu.
    Matrix normal_matrix(const ObjectImage& f_assumed) const;

    ObjectImage worst_case_f() const;

    // FNV-1a hash over the structural parameters; used to match measurement
    // files to the model they were simulated with.
    std::uint64_t fingerprint() const;

  private:
    DetectorGeometry geometry_;
    std::vector<double> arm_scales_;
    double pixel_area_;
    std::vector<double> cov_scales_;
    Vector sigma_prime_;
    double sigma_prime_floor_;
    std::optional<Matrix> ideal_device_;
    SparseMatrix detector_;  // shared across arms
};

inline LowRankPlusDiag build_sigma_nu(const SensingModel& model,
                                      const ObjectImage& f_assumed) {
    return model.sigma_nu(f_assumed);
}

Matrix build_A(const DetectorGeometry& geometry, const std::vector<double>& arm_scales,
               double pixel_area);

ObjectImage worst_case_f(const SensingModel& model);

struct EstimabilityReport {
    bool ok = false;
    int deficiency = 0;     // dimension of the violated subspace
    double score = 0.0;     // ||U (I - A^- A)|| / ||U||
};

EstimabilityReport check_estimability(const Matrix& a, const Matrix& u);
EstimabilityReport check_estimability(const SensingModel& model);

}  // namespace mgi

#endif
