#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mgi/transforms.hpp"

using namespace mgi;

namespace {

Vector random_vector(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    return Vector::NullaryExpr(n, [&](Index) { return g(rng); });
}

Matrix random_spd(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) m(i, j) = g(rng);
    return m * m.transpose() + 0.1 * Matrix::Identity(n, n);
}

// Naive orthonormal 2D DCT-II by direct evaluation of the double sum.
Vector naive_dct2(const Vector& image, GridShape grid) {
    const int w = grid.width, h = grid.height;
    Vector out(grid.size());
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            double acc = 0.0;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    acc += image(y * w + x) *
                           std::cos(std::numbers::pi * (2 * x + 1) * u / (2.0 * w)) *
                           std::cos(std::numbers::pi * (2 * y + 1) * v / (2.0 * h));
            const double au = u == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
            const double av = v == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
            out(v * w + u) = au * av * acc;
        }
    }
    return out;
}

Matrix dense_transform_matrix(const SparsityBasis& b) {
    const Index n = b.grid().size();
    Matrix t(n, n);
    for (Index j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e(j) = 1.0;
        t.col(j) = b.forward(e);
    }
    return t;
}

}  // namespace

TEST_CASE("dct2 maps a constant image to a pure DC coefficient") {
    const double c = 0.7;
    SparsityBasis b(BasisKind::dct2, {4, 4});
    Vector coeffs = b.forward(Vector::Constant(16, c));
    CHECK(coeffs(0) == doctest::Approx(4.0 * c).epsilon(1e-12));
    coeffs(0) = 0.0;
    CHECK(coeffs.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("one-level haar on 2x2 matches the analytic coefficients") {
    SparsityBasis b(BasisKind::haar2, {2, 2}, 1);
    Vector img(4);
    const double a = 1.0, bb = 2.0, c = 3.0, d = 5.0;
    img << a, bb, c, d;
    Vector coeffs = b.forward(img);
    // Approximation, horizontal, vertical, diagonal details.
    std::array<double, 4> expected{(a + bb + c + d) / 2, (a - bb + c - d) / 2,
                                   (a + bb - c - d) / 2, (a - bb - c + d) / 2};
    std::array<double, 4> got{};
    for (int i = 0; i < 4; ++i) got[i] = coeffs(i);
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("dct2 matches the naive double-sum oracle") {
    GridShape grid{4, 4};
    Vector ramp(16);
    for (Index i = 0; i < 16; ++i) ramp(i) = static_cast<double>(i);
    SparsityBasis b(BasisKind::dct2, grid);
    CHECK((b.forward(ramp) - naive_dct2(ramp, grid)).cwiseAbs().maxCoeff() <= 1e-12);

    GridShape rect{6, 4};
    Vector r = random_vector(rect.size(), 77);
    SparsityBasis br(BasisKind::dct2, rect);
    CHECK((br.forward(r) - naive_dct2(r, rect)).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("identity basis passes vectors through unchanged") {
    SparsityBasis b(BasisKind::identity, {3, 2});
    Vector v = random_vector(6, 13);
    CHECK((b.forward(v) - v).norm() == 0.0);
    CHECK((b.inverse(v) - v).norm() == 0.0);
}

TEST_CASE("forward-inverse roundtrip on 64x64 random images") {
    GridShape grid{64, 64};
    Vector img = random_vector(grid.size(), 99);
    for (BasisKind kind : {BasisKind::dct2, BasisKind::haar2, BasisKind::identity}) {
        SparsityBasis b(kind, grid);
        Vector back = b.inverse(b.forward(img));
        CHECK((back - img).norm() <= 1e-12 * img.norm());
    }
}

TEST_CASE("dct2 basis images form an orthonormal family") {
    SparsityBasis b(BasisKind::dct2, {4, 4});
    Matrix t = dense_transform_matrix(b);
    CHECK((t * t.transpose() - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-12);
    // inverse of e_k is the k-th basis image: rows of T.
    Vector e5 = Vector::Zero(16);
    e5(5) = 1.0;
    CHECK((b.inverse(e5) - t.row(5).transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("orthonormality: energy preservation for all bases") {
    GridShape grid{16, 8};
    Vector img = random_vector(grid.size(), 123);
    for (BasisKind kind : {BasisKind::dct2, BasisKind::haar2, BasisKind::identity}) {
        SparsityBasis b(kind, grid);
        CHECK(b.forward(img).norm() == doctest::Approx(img.norm()).epsilon(1e-12));
    }
}

TEST_CASE("linearity of the forward transform") {
    GridShape grid{8, 8};
    Vector x = random_vector(grid.size(), 1), y = random_vector(grid.size(), 2);
    for (BasisKind kind : {BasisKind::dct2, BasisKind::haar2}) {
        SparsityBasis b(kind, grid);
        Vector lhs = b.forward(2.5 * x - 1.5 * y);
        Vector rhs = 2.5 * b.forward(x) - 1.5 * b.forward(y);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("haar of a block-constant image lives in the approximation band") {
    GridShape grid{8, 8};
    SparsityBasis b(BasisKind::haar2, grid, 2);
    // Constant on each 4x4-aligned block.
    Vector img(64);
    std::array<double, 4> vals{0.2, 0.9, 0.4, 0.6};
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) img(y * 8 + x) = vals[(y / 4) * 2 + (x / 4)];
    Vector coeffs = b.forward(img);
    // After two levels, the approximation band is the top-left 2x2 of the
    // coefficient grid; everything else must vanish.
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            if (x >= 2 || y >= 2) CHECK(std::abs(coeffs(y * 8 + x)) <= 1e-12);
}

TEST_CASE("component_std of identity sigma is all ones") {
    GridShape grid{4, 4};
    for (BasisKind kind : {BasisKind::dct2, BasisKind::haar2, BasisKind::identity}) {
        SparsityBasis b(kind, grid);
        Vector s = b.component_std(Matrix::Identity(16, 16));
        CHECK((s - Vector::Ones(16)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("component_std of a diagonal sigma under the identity basis") {
    SparsityBasis b(BasisKind::identity, {2, 2});
    Vector d(4);
    d << 1.0, 4.0, 9.0, 16.0;
    Vector s = b.component_std(Matrix(d.asDiagonal()));
    CHECK((s - d.cwiseSqrt()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("component_std matches the dense diag(T sigma T^T) oracle") {
    GridShape grid{4, 2};  // n = 8
    Matrix sigma = random_spd(grid.size(), 404);
    for (BasisKind kind : {BasisKind::dct2, BasisKind::identity}) {
        SparsityBasis b(kind, grid);
        Matrix t = dense_transform_matrix(b);
        Vector expected = (t * sigma * t.transpose()).diagonal().cwiseSqrt();
        CHECK((b.component_std(sigma) - expected).cwiseAbs().maxCoeff() <= 1e-10);
    }
    GridShape hgrid{4, 4};
    Matrix hsigma = random_spd(hgrid.size(), 405);
    SparsityBasis hb(BasisKind::haar2, hgrid);
    Matrix ht = dense_transform_matrix(hb);
    Vector hexp = (ht * hsigma * ht.transpose()).diagonal().cwiseSqrt();
    CHECK((hb.component_std(hsigma) - hexp).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("component_std is strictly positive for SPD sigma") {
    GridShape grid{4, 4};
    Matrix sigma = random_spd(grid.size(), 17);
    SparsityBasis b(BasisKind::haar2, grid);
    CHECK(b.component_std(sigma).minCoeff() > 0.0);
}

TEST_CASE("shape and symmetry errors are rejected") {
    SparsityBasis b(BasisKind::dct2, {4, 4});
    CHECK_THROWS_AS(b.forward(Vector::Zero(5)), InvalidInputError);
    CHECK_THROWS_AS(b.inverse(Vector::Zero(3)), InvalidInputError);
    Matrix asym = Matrix::Identity(16, 16);
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(b.component_std(asym), InvalidInputError);
    // haar2 requires dimensions divisible by 2^levels.
    CHECK_THROWS_AS(SparsityBasis(BasisKind::haar2, GridShape{6, 6}, 2),
                    InvalidInputError);
}
