#include "mgi/sensing.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace mgi {

Index DetectorGeometry::positions() const {
    if (placement == DetectorPlacement::sliding) return grid.size();
    const int d = detector_linear_size;
    const Index tx = (grid.width + d - 1) / d;
    const Index ty = (grid.height + d - 1) / d;
    return tx * ty;
}

void DetectorGeometry::validate() const {
    if (grid.width < 1 || grid.height < 1)
        throw InvalidInputError("DetectorGeometry: grid dimensions must be >= 1");
    if (detector_linear_size < 1)
        throw InvalidInputError("DetectorGeometry: detector_linear_size must be >= 1");
}

SparseMatrix build_detector_matrix_sparse(const DetectorGeometry& geometry) {
    geometry.validate();
    const int w = geometry.grid.width;
    const int h = geometry.grid.height;
    const int d = geometry.detector_linear_size;
    std::vector<Eigen::Triplet<double>> entries;

    if (geometry.placement == DetectorPlacement::sliding) {
        // One detector position per pixel: row p sums the d x d window whose
        // origin is pixel p (detector centered at p + (d-1)/2), cropped at the
        // far image border. Anchoring at the window origin keeps B triangular
        // with a unit diagonal, hence non-degenerate at every grid size; a
        // center-anchored clipped box is exactly singular whenever a grid side
        // is congruent to 2 mod 3.
        entries.reserve(static_cast<size_t>(w) * h * d * d);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const Index row = static_cast<Index>(y) * w + x;
                for (int dy = 0; dy < d; ++dy) {
                    const int yy = y + dy;
                    if (yy >= h) break;
                    for (int dx = 0; dx < d; ++dx) {
                        const int xx = x + dx;
                        if (xx >= w) break;
                        entries.emplace_back(row, static_cast<Index>(yy) * w + xx, 1.0);
                    }
                }
            }
        }
    } else {
        // Non-overlapping tiles; edge tiles are cropped to the image.
        const int tx = (w + d - 1) / d;
        const int ty = (h + d - 1) / d;
        for (int by = 0; by < ty; ++by) {
            for (int bx = 0; bx < tx; ++bx) {
                const Index row = static_cast<Index>(by) * tx + bx;
                for (int yy = by * d; yy < std::min((by + 1) * d, h); ++yy)
                    for (int xx = bx * d; xx < std::min((bx + 1) * d, w); ++xx)
                        entries.emplace_back(row, static_cast<Index>(yy) * w + xx, 1.0);
            }
        }
    }

    SparseMatrix b(geometry.positions(), geometry.grid.size());
    b.setFromTriplets(entries.begin(), entries.end());
    b.makeCompressed();
    return b;
}

Matrix build_detector_matrix(const DetectorGeometry& geometry) {
    return Matrix(build_detector_matrix_sparse(geometry));
}

SensingModel::SensingModel(DetectorGeometry geometry, std::vector<double> arm_scales,
                           double pixel_area, std::vector<double> cov_scales,
                           Vector sigma_prime)
    : geometry_(geometry),
      arm_scales_(std::move(arm_scales)),
      pixel_area_(pixel_area),
      cov_scales_(std::move(cov_scales)),
      sigma_prime_(std::move(sigma_prime)) {
    geometry_.validate();
    if (arm_scales_.empty()) throw InvalidInputError("SensingModel: need at least one arm");
    if (cov_scales_.size() != arm_scales_.size())
        throw InvalidInputError("SensingModel: cov_scales size mismatch");
    for (double s : arm_scales_)
        if (!(s > 0.0)) throw InvalidInputError("SensingModel: arm scales must be positive");
    for (double k : cov_scales_)
        if (!(k >= 0.0)) throw InvalidInputError("SensingModel: cov scales must be >= 0");
    if (!(pixel_area_ > 0.0))
        throw InvalidInputError("SensingModel: pixel_area must be positive");
    detector_ = build_detector_matrix_sparse(geometry_);
    if (sigma_prime_.size() != m())
        throw InvalidInputError("SensingModel: sigma_prime length must equal 3n rows");
    if (sigma_prime_.size() == 0 || sigma_prime_.minCoeff() <= 0.0)
        throw SingularCovarianceError("SensingModel: sigma_prime entries must be positive");

    // Floor at 1e-9 of the mean worst-case GI diagonal, so the covariance
    // stays invertible for dark objects.
    Vector ones = Vector::Ones(n());
    Vector bf = detector_ * ones;
    double mean_gi_diag = 0.0;
    for (size_t j = 0; j < cov_scales_.size(); ++j)
        mean_gi_diag += cov_scales_[j] * bf.squaredNorm();
    mean_gi_diag /= static_cast<double>(m());
    sigma_prime_floor_ = 1e-9 * mean_gi_diag;
    if (sigma_prime_.minCoeff() < sigma_prime_floor_)
        throw SingularCovarianceError("SensingModel: sigma_prime below floor");
}

void SensingModel::set_ideal_device(Matrix u) {
    if (u.cols() != n())
        throw InvalidInputError("SensingModel: ideal device must have n columns");
    ideal_device_ = std::move(u);
}

Matrix SensingModel::ideal_device() const {
    if (ideal_device_) return *ideal_device_;
    return Matrix::Identity(n(), n());
}

Vector SensingModel::apply_ideal_device(const Vector& v) const {
    if (ideal_device_) return *ideal_device_ * v;
    return v;
}

Index SensingModel::ideal_rows() const {
    return ideal_device_ ? ideal_device_->rows() : n();
}

Vector SensingModel::apply_A(const Vector& f) const {
    if (f.size() != n()) throw InvalidInputError("apply_A: size mismatch");
    const Index p = geometry_.positions();
    Vector bf = detector_ * f;
    Vector out(m());
    for (int j = 0; j < arms(); ++j)
        out.segment(j * p, p) = (arm_scales_[j] * pixel_area_) * bf;
    return out;
}

Vector SensingModel::apply_At(const Vector& v) const {
    if (v.size() != m()) throw InvalidInputError("apply_At: size mismatch");
    const Index p = geometry_.positions();
    Vector acc = Vector::Zero(p);
    for (int j = 0; j < arms(); ++j)
        acc += (arm_scales_[j] * pixel_area_) * v.segment(j * p, p);
    return detector_.transpose() * acc;
}

Matrix SensingModel::dense_A() const {
    const Index p = geometry_.positions();
    Matrix a(m(), n());
    Matrix b(detector_);
    for (int j = 0; j < arms(); ++j)
        a.middleRows(j * p, p) = (arm_scales_[j] * pixel_area_) * b;
    return a;
}

LowRankPlusDiag SensingModel::sigma_nu(const ObjectImage& f_assumed) const {
    if (!f_assumed.valid() || f_assumed.grid != geometry_.grid)
        throw InvalidInputError("sigma_nu: invalid or mismatched object image");
    if (sigma_prime_.minCoeff() < sigma_prime_floor_)
        throw SingularCovarianceError("sigma_nu: sigma_prime below floor");

    const Index p = geometry_.positions();
    Vector bf = detector_ * f_assumed.values;
    Vector g(m());
    for (int j = 0; j < arms(); ++j)
        g.segment(j * p, p) = std::sqrt(cov_scales_[j]) * bf;

    LowRankPlusDiag s;
    s.diag = sigma_prime_;
    if (g.squaredNorm() > 0.0)
        s.factors = g;
    else
        s.factors = Matrix(m(), 0);
    return s;
}

Matrix SensingModel::normal_matrix(const ObjectImage& f_assumed) const {
    LowRankPlusDiag s = sigma_nu(f_assumed);
    const Index p = geometry_.positions();

    // A^T D^{-1} A = sum_j gain_j^2 B^T D_j^{-1} B, using B's sparsity.
    Matrix mtx = Matrix::Zero(n(), n());
    Vector inv_diag = s.diag.cwiseInverse();
    for (int j = 0; j < arms(); ++j) {
        const double gain = arm_scales_[j] * pixel_area_;
        Vector dj = inv_diag.segment(j * p, p);
        SparseMatrix scaled = dj.asDiagonal() * detector_;
        SparseMatrix prod = detector_.transpose() * scaled;
        mtx += (gain * gain) * Matrix(prod);
    }

    // Woodbury correction for the rank-one GI term.
    if (s.factors.cols() > 0) {
        Vector g = s.factors.col(0);
        Vector dg = inv_diag.cwiseProduct(g);
        const double gamma = 1.0 + g.dot(dg);
        Vector w = apply_At(dg);
        mtx -= (w * w.transpose()) / gamma;
    }
    return mtx;
}

ObjectImage SensingModel::worst_case_f() const {
    return ObjectImage{geometry_.grid, Vector::Ones(n())};
}

ObjectImage worst_case_f(const SensingModel& model) { return model.worst_case_f(); }

std::uint64_t SensingModel::fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix_bytes = [&h](const void* data, size_t len) {
        const unsigned char* b = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    auto mix_double = [&](double v) { mix_bytes(&v, sizeof v); };
    auto mix_int = [&](std::int64_t v) { mix_bytes(&v, sizeof v); };

    mix_int(geometry_.grid.width);
    mix_int(geometry_.grid.height);
    mix_int(geometry_.detector_linear_size);
    mix_int(geometry_.placement == DetectorPlacement::sliding ? 0 : 1);
    mix_int(arms());
    mix_double(pixel_area_);
    for (double v : arm_scales_) mix_double(v);
    for (double v : cov_scales_) mix_double(v);
    for (Index i = 0; i < sigma_prime_.size(); ++i) mix_double(sigma_prime_(i));
    if (ideal_device_)
        for (Index i = 0; i < ideal_device_->size(); ++i)
            mix_double(ideal_device_->data()[i]);
    return h;
}

Matrix build_A(const DetectorGeometry& geometry, const std::vector<double>& arm_scales,
               double pixel_area) {
    Matrix b = build_detector_matrix(geometry);
    const Index p = b.rows();
    Matrix a(p * static_cast<Index>(arm_scales.size()), b.cols());
    for (size_t j = 0; j < arm_scales.size(); ++j) {
        if (!(arm_scales[j] > 0.0))
            throw InvalidInputError("build_A: arm scales must be positive");
        a.middleRows(static_cast<Index>(j) * p, p) = (arm_scales[j] * pixel_area) * b;
    }
    return a;
}

EstimabilityReport check_estimability(const Matrix& a, const Matrix& u) {
    EstimabilityReport report;
    Matrix residual = u - u * pseudoinverse(a) * a;  // U (I - A^- A)
    const double u_norm = u.norm();
    report.score = u_norm > 0 ? residual.norm() / u_norm : 0.0;
    report.ok = report.score <= 1e-8;
    if (!report.ok) {
        Eigen::JacobiSVD<Matrix> svd(residual);
        const Vector& sv = svd.singularValues();
        const double thr = 1e-8 * (u_norm > 0 ? u_norm : 1.0);
        for (Index i = 0; i < sv.size(); ++i)
            if (sv(i) > thr) ++report.deficiency;
    }
    return report;
}

EstimabilityReport check_estimability(const SensingModel& model) {
    if (model.has_custom_ideal_device())
        return check_estimability(model.dense_A(), model.ideal_device());

    // U = I: estimable iff A has full column rank. Check the Gram matrix.
    SparseMatrix b = build_detector_matrix_sparse(model.geometry());
    double gain_sq = 0.0;
    for (double s : model.arm_scales()) {
        const double gain = s * model.pixel_area();
        gain_sq += gain * gain;
    }
    Matrix gram = gain_sq * Matrix(SparseMatrix(b.transpose() * b));
    Eigen::LDLT<Matrix> ldlt(gram);
    EstimabilityReport report;
    Vector d = ldlt.vectorD();
    const double thr = 1e-16 * d.maxCoeff();
    for (Index i = 0; i < d.size(); ++i)
        if (!(d(i) > thr)) ++report.deficiency;
    report.ok = report.deficiency == 0 && ldlt.info() == Eigen::Success;
    report.score = report.ok ? 0.0 : 1.0;
    return report;
}

}  // namespace mgi
