#include "mgi/reduction.hpp"

#include <cmath>
#include <limits>

namespace mgi {

namespace {

double power_iteration_bound(const Matrix& m) {
    Vector v = Vector::Ones(m.rows());
    for (Index i = 0; i < v.size(); ++i) v(i) += 0.01 * std::sin(static_cast<double>(i + 1));
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        Vector w = m * v;
        const double norm = w.norm();
        if (norm == 0.0) return 1.0;
        const double next = v.dot(w);
        v = w / norm;
        if (it > 5 && std::abs(next - lambda) <= 1e-10 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::abs(lambda) * 1.05;
}

}  // namespace

ReductionContext::ReductionContext(SensingModel model)
    : model_(std::move(model)),
      noise_inv_(invert_low_rank_plus_diag(model_.sigma_nu(model_.worst_case_f()))) {
    EstimabilityReport est = check_estimability(model_);
    if (!est.ok)
        throw NumericalError("reduction: estimation impossible, deficient subspace of dim " +
                             std::to_string(est.deficiency));

    normal_ = model_.normal_matrix(model_.worst_case_f());
    normal_llt_.emplace(normal_);
    bool spd = normal_llt_->info() == Eigen::Success;
    if (!spd) {
        normal_llt_.reset();
        normal_pinv_ = pseudoinverse(normal_);
    }

    const Index n = model_.n();
    if (!model_.has_custom_ideal_device()) {
        covariance_ = spd ? normal_llt_->solve(Matrix::Identity(n, n))
                          : normal_pinv_;
        metric_matrix_ = normal_;
    } else {
        Matrix u = model_.ideal_device();
        Matrix minv_ut = spd ? normal_llt_->solve(Matrix(u.transpose()))
                             : Matrix(normal_pinv_ * u.transpose());
        covariance_ = u * minv_ut;
        Eigen::LLT<Matrix> cov_llt(covariance_);
        if (cov_llt.info() != Eigen::Success) {
            // Singular estimate covariance: regularize before inversion.
            const double eps = 1e-10 * covariance_.trace() /
                               static_cast<double>(covariance_.rows());
            Matrix reg = covariance_ +
                         eps * Matrix::Identity(covariance_.rows(), covariance_.cols());
            cov_llt.compute(reg);
            if (cov_llt.info() != Eigen::Success)
                throw SingularCovarianceError(
                    "reduction: estimate covariance not invertible after regularization");
        }
        metric_matrix_ = cov_llt.solve(Matrix::Identity(covariance_.rows(),
                                                        covariance_.cols()));
    }

    metric_ = LinearOperator::from_matrix(metric_matrix_);
    metric_.lipschitz = power_iteration_bound(metric_matrix_);
}

Vector ReductionContext::normal_solve(const Vector& rhs) const {
    return normal_llt_ ? Vector(normal_llt_->solve(rhs)) : Vector(normal_pinv_ * rhs);
}

Vector ReductionContext::reduce(const Vector& xi) const {
    if (xi.size() != model_.m())
        throw InvalidInputError("reduce: measurement length mismatch");
    Vector t = noise_inv_.apply(xi);
    Vector s = model_.apply_At(t);
    return model_.apply_ideal_device(normal_solve(s));
}

ReductionEstimate linear_reduction(const ReductionContext& ctx, const Measurement& xi) {
    ReductionEstimate est;
    est.estimate = ctx.reduce(xi.xi);
    est.covariance = ctx.covariance();
    est.worst_case_mse = ctx.worst_case_mse();
    return est;
}

ReductionEstimate linear_reduction(const Measurement& xi, const SensingModel& model,
                                   const LowRankPlusDiag& sigma) {
    EstimabilityReport est_report = check_estimability(model);
    if (!est_report.ok)
        throw NumericalError("linear_reduction: estimation impossible, deficiency " +
                             std::to_string(est_report.deficiency));
    WoodburyInverse w = invert_low_rank_plus_diag(sigma);
    Matrix a = model.dense_A();
    Matrix m = a.transpose() * w.apply(a);
    Matrix u = model.ideal_device();

    Eigen::LLT<Matrix> llt(m);
    Matrix minv_ut;
    if (llt.info() == Eigen::Success)
        minv_ut = llt.solve(Matrix(u.transpose()));
    else
        minv_ut = pseudoinverse(m) * u.transpose();

    ReductionEstimate est;
    est.covariance = u * minv_ut;
    est.worst_case_mse = est.covariance.trace();
    est.estimate = minv_ut.transpose() * (a.transpose() * w.apply(xi.xi));
    return est;
}

namespace {

struct FixedPointOutcome {
    Vector point;
    int iterations = 0;
    bool converged = false;
};

// Fixed-point iteration of u <- Pi(R~ (xi, u)) for the augmented device
// (A; U) with block-diagonal noise covariance diag(Sigma_nu, Sigma_{R* xi}).
// With U = I the augmented reduction collapses to (u0 + u) / 2.
FixedPointOutcome constrained_fixed_point(const ReductionContext& ctx,
                                          const Vector& xi, const Vector& u0,
                                          const Vector& lo, const Vector& hi,
                                          const PipelineConfig& cfg) {
    const LinearOperator& metric = ctx.mahalanobis_metric();
    const bool identity_u = !ctx.model().has_custom_ideal_device();

    std::optional<Eigen::LLT<Matrix>> aug_llt;
    Matrix ut_metric;
    Vector b;
    if (!identity_u) {
        Matrix u = ctx.model().ideal_device();
        Matrix metric_dense = Matrix::Identity(u.rows(), u.rows());
        // metric as dense matrix (Sigma_R^{-1}); rebuilt via operator columns.
        for (Index j = 0; j < metric_dense.cols(); ++j)
            metric_dense.col(j) = metric.apply(Matrix::Identity(u.rows(), u.rows()).col(j));
        ut_metric = u.transpose() * metric_dense;
        Matrix aug = ctx.normal_matrix() + ut_metric * u;
        aug_llt.emplace(aug);
        if (aug_llt->info() != Eigen::Success)
            throw SingularCovarianceError("constrained_reduction: augmented system singular");
        b = ctx.model().apply_At(ctx.noise_inverse().apply(xi));
    }

    auto map = [&](const Vector& u_cur) -> Vector {
        if (identity_u) return 0.5 * (u0 + u_cur);
        return ctx.model().ideal_device() * aug_llt->solve(b + ut_metric.transpose().eval() *
                                                           u_cur);
    };

    FixedPointOutcome out;
    bool projections_ok = true;
    BoxProjectionResult proj = project_box(u0, metric, lo, hi, cfg.projection_tol,
                                           cfg.projection_max_iter);
    projections_ok = projections_ok && proj.converged;
    Vector u_cur = proj.point;

    for (int it = 0; it < cfg.fixed_point_max_iter; ++it) {
        proj = project_box(map(u_cur), metric, lo, hi, cfg.projection_tol,
                           cfg.projection_max_iter);
        projections_ok = projections_ok && proj.converged;
        const double change = (proj.point - u_cur).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, proj.point.cwiseAbs().maxCoeff());
        u_cur = proj.point;
        if (change <= cfg.fixed_point_tol * scale) {
            out.point = u_cur;
            out.iterations = it + 1;
            out.converged = projections_ok;
            return out;
        }
    }
    out.point = u_cur;
    out.iterations = cfg.fixed_point_max_iter;
    out.converged = false;
    return out;
}

}  // namespace

ReductionEstimate constrained_reduction(const ReductionContext& ctx,
                                        const Measurement& xi, const Vector& box_lo,
                                        const Vector& box_hi,
                                        const PipelineConfig& cfg) {
    Vector u0 = ctx.reduce(xi.xi);
    FixedPointOutcome out = constrained_fixed_point(ctx, xi.xi, u0, box_lo, box_hi, cfg);
    ReductionEstimate est;
    est.estimate = std::move(out.point);
    est.covariance = ctx.covariance();
    est.worst_case_mse = ctx.worst_case_mse();
    est.iterations_used = out.iterations;
    est.converged = out.converged;
    return est;
}

Vector threshold_with_std(const Vector& u, const Vector& component_std,
                          const SparsityBasis& basis, double lambda) {
    if (component_std.size() != u.size())
        throw InvalidInputError("threshold_with_std: size mismatch");
    if (lambda < 0.0) throw InvalidInputError("threshold_with_std: lambda must be >= 0");
    Vector c = basis.forward(u);
    for (Index i = 0; i < c.size(); ++i)
        if (std::abs(c(i)) < lambda * component_std(i)) c(i) = 0.0;
    return basis.inverse(c);
}

Vector threshold_in_basis(const Vector& u, const Matrix& sigma,
                          const SparsityBasis& basis, double lambda) {
    return threshold_with_std(u, basis.component_std(sigma), basis, lambda);
}

PipelineResult run_pipeline(const ReductionContext& ctx, const Measurement& xi,
                            const PipelineConfig& cfg) {
    PipelineResult res;
    res.worst_case_mse = ctx.worst_case_mse();

    res.linear = linear_reduction(ctx, xi);

    const Index n = ctx.model().ideal_rows();
    Vector lo = Vector::Zero(n);
    Vector hi = Vector::Ones(n);

    FixedPointOutcome fp = constrained_fixed_point(ctx, xi.xi, res.linear.estimate, lo,
                                                   hi, cfg);
    res.constrained = fp.point;
    res.fixed_point_iterations = fp.iterations;

    if (cfg.lambda > 0.0) {
        Vector csd = cfg.basis.component_std(ctx.covariance());
        res.thresholded = threshold_with_std(res.constrained, csd, cfg.basis, cfg.lambda);
    } else {
        res.thresholded = res.constrained;
    }

    BoxProjectionResult proj = project_box(res.thresholded, ctx.mahalanobis_metric(), lo,
                                           hi, cfg.projection_tol,
                                           cfg.projection_max_iter);
    res.final_image = proj.point;
    res.converged = fp.converged && proj.converged;
    return res;
}

PipelineResult run_pipeline(const Measurement& xi, const SensingModel& model,
                            const PipelineConfig& cfg) {
    ReductionContext ctx(model);
    return run_pipeline(ctx, xi, cfg);
}

ImageMetrics compute_metrics(const Vector& estimate, const ObjectImage& truth) {
    if (estimate.size() != truth.grid.size())
        throw InvalidInputError("compute_metrics: grid mismatch");
    ImageMetrics m;
    m.mse = (estimate - truth.values).squaredNorm() / static_cast<double>(estimate.size());
    m.psnr = m.mse > 0.0 ? 10.0 * std::log10(1.0 / m.mse)
                         : std::numeric_limits<double>::infinity();
    return m;
}

}  // namespace mgi
