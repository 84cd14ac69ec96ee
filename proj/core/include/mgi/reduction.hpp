#ifndef MGI_REDUCTION_HPP
#define MGI_REDUCTION_HPP

#include <Eigen/Cholesky>
#include <optional>

#include "mgi/linalg.hpp"
#include "mgi/sensing.hpp"
#include "mgi/sim.hpp"
#include "mgi/transforms.hpp"

namespace mgi {

struct ReductionEstimate {
    Vector estimate;
    Matrix covariance;        // Sigma_{R* xi}
    double worst_case_mse = 0.0;  // trace of the covariance
    int iterations_used = 0;
    bool converged = true;
};

struct PipelineConfig {
    SparsityBasis basis;
    double lambda = 0.0;
    double fixed_point_tol = 1e-8;
    int fixed_point_max_iter = 500;
    double projection_tol = 1e-8;
    int projection_max_iter = 10000;

    PipelineConfig(SparsityBasis b, double l) : basis(std::move(b)), lambda(l) {
        if (l < 0.0) throw InvalidInputError("PipelineConfig: lambda must be >= 0");
    }
};

// Worst-case precomputation shared across seeds and lambda sweeps: the normal
// matrix M = A^T Sigma_nu(1)^{-1} A, its factorization, the estimate
// covariance, and the noise-covariance inverse.
class ReductionContext {
  public:
    explicit ReductionContext(SensingModel model);

    const SensingModel& model() const { return model_; }
    const Matrix& normal_matrix() const { return normal_; }
    const Matrix& covariance() const { return covariance_; }
    double worst_case_mse() const { return covariance_.trace(); }
    const WoodburyInverse& noise_inverse() const { return noise_inv_; }

    // R* xi = U (A^T Sigma^{-1} A)^- A^T Sigma^{-1} xi.
    Vector reduce(const Vector& xi) const;
    // Solves M x = rhs (pseudoinverse path when M is rank-deficient).
    Vector normal_solve(const Vector& rhs) const;

    // Sigma_{R* xi}^{-1} as an operator, regularized if the covariance is
    // singular; the Lipschitz bound is cached for the box projection.
    const LinearOperator& mahalanobis_metric() const { return metric_; }

  private:
    SensingModel model_;
    WoodburyInverse noise_inv_;
    Matrix normal_;
    Matrix covariance_;
    std::optional<Eigen::LLT<Matrix>> normal_llt_;
    Matrix normal_pinv_;  // only when the LLT fails
    Matrix metric_matrix_;
    LinearOperator metric_;
};

ReductionEstimate linear_reduction(const Measurement& xi, const SensingModel& model,
                                   const LowRankPlusDiag& sigma);
ReductionEstimate linear_reduction(const ReductionContext& ctx, const Measurement& xi);

// Box-constrained refinement by fixed-point iteration of the augmented-device
// reduction followed by Mahalanobis projection onto [box_lo, box_hi].
ReductionEstimate constrained_reduction(const ReductionContext& ctx,
                                        const Measurement& xi, const Vector& box_lo,
                                        const Vector& box_hi,
                                        const PipelineConfig& cfg);

// T^{-1} of the hard-thresholded coefficients: component i is zeroed when
// |(T u)_i| < lambda * sigma_i with sigma from component_std(basis, sigma).
Vector threshold_in_basis(const Vector& u, const Matrix& sigma,
                          const SparsityBasis& basis, double lambda);
Vector threshold_with_std(const Vector& u, const Vector& component_std,
                          const SparsityBasis& basis, double lambda);

struct PipelineResult {
    ReductionEstimate linear;
    Vector constrained;
    Vector thresholded;
    Vector final_image;
    int fixed_point_iterations = 0;
    bool converged = true;
    double worst_case_mse = 0.0;
};

PipelineResult run_pipeline(const ReductionContext& ctx, const Measurement& xi,
                            const PipelineConfig& cfg);
PipelineResult run_pipeline(const Measurement& xi, const SensingModel& model,
                            const PipelineConfig& cfg);

struct ImageMetrics {
    double mse = 0.0;
    double psnr = 0.0;  // +infinity when mse == 0
};

ImageMetrics compute_metrics(const Vector& estimate, const ObjectImage& truth);

}  // namespace mgi

#endif
