#include "mgi/transforms.hpp"

#include <cmath>

namespace mgi {

namespace {

Matrix orthonormal_dct_matrix(int n) {
    Matrix c(n, n);
    const double scale0 = std::sqrt(1.0 / n);
    const double scale = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k)
        for (int x = 0; x < n; ++x)
            c(k, x) = (k == 0 ? scale0 : scale) *
                      std::cos(M_PI * (2.0 * x + 1.0) * k / (2.0 * n));
    return c;
}

int max_haar_levels(const GridShape& g) {
    int levels = 0;
    int w = g.width, h = g.height;
    while (w % 2 == 0 && h % 2 == 0 && w > 1 && h > 1) {
        w /= 2;
        h /= 2;
        ++levels;
    }
    return levels;
}

// One orthonormal Haar analysis step along a contiguous range of length 2m:
// pairs (a, b) -> ((a + b)/sqrt2 into the low half, (a - b)/sqrt2 high half).
void haar_step(Eigen::Ref<Vector> v, Index len) {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Index m = len / 2;
    Vector tmp(len);
    for (Index i = 0; i < m; ++i) {
        tmp(i) = (v(2 * i) + v(2 * i + 1)) * inv_sqrt2;
        tmp(m + i) = (v(2 * i) - v(2 * i + 1)) * inv_sqrt2;
    }
    v.head(len) = tmp;
}

void haar_step_inverse(Eigen::Ref<Vector> v, Index len) {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Index m = len / 2;
    Vector tmp(len);
    for (Index i = 0; i < m; ++i) {
        tmp(2 * i) = (v(i) + v(m + i)) * inv_sqrt2;
        tmp(2 * i + 1) = (v(i) - v(m + i)) * inv_sqrt2;
    }
    v.head(len) = tmp;
}

}  // namespace

SparsityBasis::SparsityBasis(BasisKind kind, GridShape grid, int haar_levels)
    : kind_(kind), grid_(grid) {
    if (grid.width < 1 || grid.height < 1)
        throw InvalidInputError("SparsityBasis: grid dimensions must be >= 1");
    switch (kind_) {
        case BasisKind::identity:
            break;
        case BasisKind::dct2:
            dct_rows_ = orthonormal_dct_matrix(grid.height);
            dct_cols_ = orthonormal_dct_matrix(grid.width);
            break;
        case BasisKind::haar2: {
            const int max_levels = max_haar_levels(grid);
            haar_levels_ = haar_levels < 0 ? max_levels : haar_levels;
            if (haar_levels_ > max_levels)
                throw InvalidInputError(
                    "SparsityBasis: grid not divisible by 2^haar_levels");
            break;
        }
    }
}

Vector SparsityBasis::forward(const Vector& image) const {
    if (image.size() != grid_.size())
        throw InvalidInputError("SparsityBasis::forward: size mismatch");
    const int w = grid_.width, h = grid_.height;
    switch (kind_) {
        case BasisKind::identity:
            return image;
        case BasisKind::dct2: {
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>
                m(image.data(), h, w);
            Matrix out = dct_rows_ * m * dct_cols_.transpose();
            Vector res(grid_.size());
            Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>(res.data(), h, w) = out;
            return res;
        }
        case BasisKind::haar2: {
            Vector res = image;
            auto at = [&](int y, int x) -> double& { return res(y * w + x); };
            int cw = w, ch = h;
            Vector buf(std::max(w, h));
            for (int level = 0; level < haar_levels_; ++level) {
                for (int y = 0; y < ch; ++y) {
                    for (int x = 0; x < cw; ++x) buf(x) = at(y, x);
                    haar_step(buf, cw);
                    for (int x = 0; x < cw; ++x) at(y, x) = buf(x);
                }
                for (int x = 0; x < cw; ++x) {
                    for (int y = 0; y < ch; ++y) buf(y) = at(y, x);
                    haar_step(buf, ch);
                    for (int y = 0; y < ch; ++y) at(y, x) = buf(y);
                }
                cw /= 2;
                ch /= 2;
            }
            return res;
        }
    }
    throw NumericalError("SparsityBasis::forward: unreachable");
}

Vector SparsityBasis::inverse(const Vector& coeffs) const {
    if (coeffs.size() != grid_.size())
        throw InvalidInputError("SparsityBasis::inverse: size mismatch");
    const int w = grid_.width, h = grid_.height;
    switch (kind_) {
        case BasisKind::identity:
            return coeffs;
        case BasisKind::dct2: {
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>
                m(coeffs.data(), h, w);
            Matrix out = dct_rows_.transpose() * m * dct_cols_;
            Vector res(grid_.size());
            Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>(res.data(), h, w) = out;
            return res;
        }
        case BasisKind::haar2: {
            Vector res = coeffs;
            auto at = [&](int y, int x) -> double& { return res(y * w + x); };
            Vector buf(std::max(w, h));
            for (int level = haar_levels_ - 1; level >= 0; --level) {
                const int cw = w >> level, ch = h >> level;
                for (int x = 0; x < cw; ++x) {
                    for (int y = 0; y < ch; ++y) buf(y) = at(y, x);
                    haar_step_inverse(buf, ch);
                    for (int y = 0; y < ch; ++y) at(y, x) = buf(y);
                }
                for (int y = 0; y < ch; ++y) {
                    for (int x = 0; x < cw; ++x) buf(x) = at(y, x);
                    haar_step_inverse(buf, cw);
                    for (int x = 0; x < cw; ++x) at(y, x) = buf(x);
                }
            }
            return res;
        }
    }
    throw NumericalError("SparsityBasis::inverse: unreachable");
}

Vector SparsityBasis::component_std(const Matrix& sigma) const {
    const Index n = grid_.size();
    if (sigma.rows() != n || sigma.cols() != n)
        throw InvalidInputError("component_std: sigma shape mismatch");
    const double scale = sigma.cwiseAbs().maxCoeff();
    if (scale > 0) {
        const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-9 * scale)
            throw InvalidInputError("component_std: sigma not symmetric within 1e-9");
    }
    if (kind_ == BasisKind::identity) return sigma.diagonal().cwiseMax(0.0).cwiseSqrt();

    // diag(T sigma T^T): first C = T applied to every column of sigma, then
    // entry i is the i-th component of T applied to row i of C.
    Matrix c(n, n);
    for (Index j = 0; j < n; ++j) c.col(j) = forward(sigma.col(j));
    Vector out(n);
    for (Index i = 0; i < n; ++i) {
        Vector row = c.row(i).transpose();
        out(i) = forward(row)(i);
    }
    return out.cwiseMax(0.0).cwiseSqrt();
}

}  // namespace mgi
