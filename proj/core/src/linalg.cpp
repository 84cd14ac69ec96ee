#include "mgi/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace mgi {

LinearOperator LinearOperator::from_matrix(const Matrix& m) {
    LinearOperator op;
    op.dim = m.rows();
    op.apply = [m](const Vector& v) -> Vector { return m * v; };
    return op;
}

LinearOperator LinearOperator::identity(Index n) {
    LinearOperator op;
    op.dim = n;
    op.apply = [](const Vector& v) -> Vector { return v; };
    op.lipschitz = 1.0;
    return op;
}

Matrix pseudoinverse(const Matrix& m, double rel_cutoff) {
    if (!m.allFinite()) throw InvalidInputError("pseudoinverse: non-finite input");
    if (!(rel_cutoff > 0.0 && rel_cutoff < 1.0))
        throw InvalidInputError("pseudoinverse: rel_cutoff must be in (0, 1)");
    if (m.rows() == 0 || m.cols() == 0) return Matrix::Zero(m.cols(), m.rows());

    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double cutoff = rel_cutoff * sv(0);
    Vector inv_sv = Vector::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

SpdFactor::SpdFactor(const Matrix& source, double rank_tol, double sym_tol)
    : rank_tol_(rank_tol) {
    if (source.rows() != source.cols())
        throw InvalidInputError("SpdFactor: matrix must be square");
    const double scale = source.cwiseAbs().maxCoeff();
    const double asym = (source - source.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0 && asym > sym_tol * scale)
        throw InvalidInputError("SpdFactor: matrix not symmetric within tolerance");
    ldlt_.compute(source);
    if (ldlt_.info() != Eigen::Success)
        throw SingularCovarianceError("SpdFactor: factorization failed");
    if (ldlt_.vectorD().minCoeff() <= rank_tol * scale)
        throw SingularCovarianceError("SpdFactor: matrix not positive-definite at tolerance");
}

Matrix LowRankPlusDiag::dense() const {
    Matrix m = Matrix(diag.asDiagonal());
    if (factors.cols() > 0) m += factors * factors.transpose();
    return m;
}

WoodburyInverse::WoodburyInverse(const LowRankPlusDiag& s, double diag_floor) {
    if (s.diag.size() == 0) throw InvalidInputError("WoodburyInverse: empty diagonal");
    if (s.diag.minCoeff() <= diag_floor || s.diag.minCoeff() <= 0.0)
        throw SingularCovarianceError("WoodburyInverse: diagonal entry at or below floor");
    inv_diag_ = s.diag.cwiseInverse();
    factors_ = s.factors;
    if (factors_.cols() > 0) {
        if (factors_.rows() != s.diag.size())
            throw InvalidInputError("WoodburyInverse: factor rows must match diag size");
        const Index r = factors_.cols();
        Matrix cap = Matrix::Identity(r, r) +
                     factors_.transpose() * inv_diag_.asDiagonal() * factors_;
        capacitance_.compute(cap);
        if (capacitance_.info() != Eigen::Success)
            throw SingularCovarianceError("WoodburyInverse: capacitance not positive-definite");
    }
}

Vector WoodburyInverse::apply(const Vector& v) const {
    Vector x = inv_diag_.cwiseProduct(v);
    if (factors_.cols() > 0) {
        Vector t = capacitance_.solve(factors_.transpose() * x);
        x -= inv_diag_.cwiseProduct(factors_ * t);
    }
    return x;
}

Matrix WoodburyInverse::apply(const Matrix& m) const {
    Matrix x = inv_diag_.asDiagonal() * m;
    if (factors_.cols() > 0) {
        Matrix t = capacitance_.solve(factors_.transpose() * x);
        x -= inv_diag_.asDiagonal() * (factors_ * t);
    }
    return x;
}

Matrix WoodburyInverse::capacitance_solve(const Matrix& rhs) const {
    if (factors_.cols() == 0) return rhs;
    return capacitance_.solve(rhs);
}

LinearOperator WoodburyInverse::as_operator() const {
    LinearOperator op;
    op.dim = dim();
    op.apply = [*this](const Vector& v) -> Vector { return apply(v); };
    return op;
}

namespace {

double estimate_lipschitz(const LinearOperator& op) {
    if (op.lipschitz > 0.0) return op.lipschitz;
    // Power iteration with a deterministic start vector.
    Vector v = Vector::Ones(op.dim);
    for (Index i = 0; i < op.dim; ++i) v(i) += 0.01 * std::sin(static_cast<double>(i + 1));
    v.normalize();
    double lambda = 1.0;
    for (int it = 0; it < 100; ++it) {
        Vector w = op.apply(v);
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
    return std::abs(lambda) * 1.05;  // safety margin over the Rayleigh estimate
}

inline Vector clamp(const Vector& v, const Vector& lo, const Vector& hi) {
    return v.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

BoxProjectionResult project_box(const Vector& u, const LinearOperator& sigma_inv,
                                const Vector& box_lo, const Vector& box_hi,
                                double tol, int max_iter) {
    const Index n = u.size();
    if (sigma_inv.dim != n || box_lo.size() != n || box_hi.size() != n)
        throw InvalidInputError("project_box: dimension mismatch");
    if ((box_lo.array() > box_hi.array()).any())
        throw InvalidInputError("project_box: box_lo exceeds box_hi");

    const double L = estimate_lipschitz(sigma_inv);

    BoxProjectionResult res;
    Vector x = clamp(u, box_lo, box_hi);
    Vector y = x;
    double t = 1.0;

    auto residual = [&](const Vector& point, const Vector& grad) {
        return (point - clamp(point - grad / L, box_lo, box_hi)).cwiseAbs().maxCoeff();
    };

    for (int it = 0; it < max_iter; ++it) {
        Vector grad = sigma_inv.apply(y - u);
        Vector x_new = clamp(y - grad / L, box_lo, box_hi);

        // Convergence test at the new point; the gradient at y stands in for
        // the gradient at x_new within the same 1/L step.
        const double r = residual(y, grad);
        if (r <= tol) {
            // Confirm with an exact residual at x_new.
            Vector g2 = sigma_inv.apply(x_new - u);
            const double r2 = residual(x_new, g2);
            if (r2 <= tol) {
                res.point = x_new;
                res.iterations = it + 1;
                res.converged = true;
                res.kkt_residual = r2;
                return res;
            }
        }

        // Gradient-based adaptive restart.
        const double momentum_test = (y - x_new).dot(x_new - x);
        if (momentum_test > 0.0) {
            t = 1.0;
            y = x_new;
        } else {
            const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = x_new + ((t - 1.0) / t_new) * (x_new - x);
            t = t_new;
        }
        x = x_new;
    }

    Vector grad = sigma_inv.apply(x - u);
    res.point = x;
    res.iterations = max_iter;
    res.converged = false;
    res.kkt_residual = residual(x, grad);
    return res;
}

Vector mahalanobis_project(const Vector& u, const LinearOperator& sigma_inv,
                           const Vector& box_lo, const Vector& box_hi,
                           double tol, int max_iter) {
    BoxProjectionResult res = project_box(u, sigma_inv, box_lo, box_hi, tol, max_iter);
    if (!res.converged)
        throw NonConvergenceError("mahalanobis_project: max iterations exceeded",
                                  std::move(res.point));
    return res.point;
}

}  // namespace mgi
