#include <random>

#include "doctest.h"
#include "mgi/sensing.hpp"

using namespace mgi;

namespace {

SensingModel toy_model(DetectorGeometry g, int arms = 3, double kappa = 1.0,
                       double sigma = 1.0) {
    return SensingModel(g, std::vector<double>(arms, 1.0), 1.0,
                        std::vector<double>(arms, kappa),
                        Vector::Constant(g.positions() * arms, sigma));
}

}  // namespace

TEST_CASE("size-1 detectors give the identity matrix") {
    DetectorGeometry g{{3, 2}, 1, DetectorPlacement::sliding};
    CHECK((build_detector_matrix(g) - Matrix::Identity(6, 6)).norm() == 0.0);
}

TEST_CASE("sliding 3x3 footprint on a 4x4 grid matches direct enumeration") {
    DetectorGeometry g{{4, 4}, 3, DetectorPlacement::sliding};
    Matrix b = build_detector_matrix(g);
    // The detector centered at (1, 1) is the window with origin (0, 0).
    const Index row = 0;
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            const double expected = (x <= 2 && y <= 2) ? 1.0 : 0.0;
            CHECK(b(row, y * 4 + x) == expected);
        }
    // Interior rows (window fully inside) sum to d^2.
    DetectorGeometry g5{{5, 5}, 3, DetectorPlacement::sliding};
    Matrix b5 = build_detector_matrix(g5);
    CHECK(b5.row(2 * 5 + 2).sum() == 9.0);
    CHECK(b5.row(0).sum() == 9.0);
    CHECK(b5.row(4 * 5 + 4).sum() == 1.0);  // far-corner window cropped to 1 pixel
}

TEST_CASE("tiled placement crops edge tiles without dropping pixels") {
    DetectorGeometry g{{5, 4}, 3, DetectorPlacement::tiled};
    Matrix b = build_detector_matrix(g);
    CHECK(b.rows() == 4);  // 2x2 tiles
    CHECK(b.cols() == 20);
    // Every pixel belongs to exactly one tile.
    CHECK((b.colwise().sum() - Eigen::RowVectorXd::Ones(20)).norm() == 0.0);
}

TEST_CASE("build_A stacks identical blocks scaled by gain") {
    DetectorGeometry g1{{1, 1}, 1, DetectorPlacement::sliding};
    Matrix a1 = build_A(g1, {1.0, 1.0, 1.0}, 1.0);
    CHECK(a1.rows() == 3);
    CHECK(a1.cols() == 1);
    CHECK((a1 - Matrix::Ones(3, 1)).norm() == 0.0);

    DetectorGeometry g{{4, 4}, 3, DetectorPlacement::sliding};
    Matrix a = build_A(g, {2.0, 2.0, 2.0}, 0.5);
    CHECK((a.topRows(16) - a.middleRows(16, 16)).norm() == 0.0);
    CHECK((a.topRows(16) - a.bottomRows(16)).norm() == 0.0);

    // Interior detector response to all-ones: scale * area * d^2.
    DetectorGeometry g5{{5, 5}, 3, DetectorPlacement::sliding};
    Matrix a5 = build_A(g5, {2.0, 1.0, 1.0}, 0.5);
    Vector resp = a5 * Vector::Ones(25);
    CHECK(resp(2 * 5 + 2) == doctest::Approx(2.0 * 0.5 * 9.0).epsilon(1e-14));

    // Linearity in scales and pixel area.
    Matrix doubled = build_A(g5, {4.0, 2.0, 2.0}, 0.5);
    CHECK((doubled - 2.0 * a5).norm() <= 1e-14 * a5.norm());
    Matrix area2 = build_A(g5, {2.0, 1.0, 1.0}, 1.0);
    CHECK((area2 - 2.0 * a5).norm() <= 1e-14 * a5.norm());
}

TEST_CASE("sigma_nu of a dark object is exactly the diagonal") {
    DetectorGeometry g{{2, 2}, 1, DetectorPlacement::sliding};
    SensingModel model = toy_model(g);
    LowRankPlusDiag s = model.sigma_nu(ObjectImage{g.grid, Vector::Zero(4)});
    CHECK(s.factors.cols() == 0);
    CHECK((s.dense() - Matrix::Identity(12, 12)).norm() == 0.0);
}

TEST_CASE("sigma_nu GI blocks are the expected outer products") {
    // 2-pixel toy with B = I (size-1 detectors), kappa = 1, f = (a, b).
    DetectorGeometry g{{2, 1}, 1, DetectorPlacement::sliding};
    SensingModel model = toy_model(g);
    const double a = 0.3, b = 0.8;
    Vector f(2);
    f << a, b;
    Matrix dense = model.sigma_nu(ObjectImage{g.grid, f}).dense();
    for (int bi = 0; bi < 3; ++bi)
        for (int bj = 0; bj < 3; ++bj) {
            Matrix block = dense.block(2 * bi, 2 * bj, 2, 2);
            Matrix expected(2, 2);
            expected << a * a, a * b, a * b, b * b;
            if (bi == bj) expected += Matrix::Identity(2, 2);
            CHECK((block - expected).cwiseAbs().maxCoeff() <= 1e-12);
        }
}

TEST_CASE("sigma_nu stays SPD across the box and matches the worst-case call") {
    DetectorGeometry g{{3, 3}, 3, DetectorPlacement::sliding};
    SensingModel model = toy_model(g, 3, 0.5, 2.0);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        Vector f = Vector::NullaryExpr(9, [&](Index) { return u01(rng); });
        Matrix dense = model.sigma_nu(ObjectImage{g.grid, f}).dense();
        Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
        CHECK(es.eigenvalues().minCoeff() >= 2.0 - 1e-9);
    }
    // Worst-case f is the all-ones image.
    ObjectImage w = model.worst_case_f();
    CHECK((w.values - Vector::Ones(9)).norm() == 0.0);
    CHECK(w.valid());
    Matrix worst = model.sigma_nu(w).dense();
    Matrix direct = model.sigma_nu(ObjectImage{g.grid, Vector::Ones(9)}).dense();
    CHECK((worst - direct).norm() == 0.0);
}

TEST_CASE("normal matrix matches the dense oracle") {
    DetectorGeometry g{{4, 3}, 3, DetectorPlacement::sliding};
    SensingModel model = toy_model(g, 3, 0.25, 1.5);
    ObjectImage f = model.worst_case_f();
    Matrix a = model.dense_A();
    Matrix sigma = model.sigma_nu(f).dense();
    Matrix expected = a.transpose() * sigma.inverse() * a;
    Matrix got = model.normal_matrix(f);
    CHECK((got - expected).norm() <= 1e-10 * expected.norm());
}

TEST_CASE("estimability holds for the three-block sliding model") {
    DetectorGeometry g{{4, 4}, 3, DetectorPlacement::sliding};
    SensingModel model = toy_model(g);
    EstimabilityReport r = check_estimability(model);
    CHECK(r.ok);
    CHECK(r.deficiency == 0);
}

TEST_CASE("estimability fails for an underdetermined device") {
    // Single row measuring the sum of a 2-pixel object.
    Matrix a(1, 2);
    a << 1.0, 1.0;
    EstimabilityReport r = check_estimability(a, Matrix::Identity(2, 2));
    CHECK_FALSE(r.ok);
    CHECK(r.deficiency == 1);
}

TEST_CASE("estimability always holds for U = A") {
    Matrix a(2, 3);
    a << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
    EstimabilityReport r = check_estimability(a, a);
    CHECK(r.ok);
}

TEST_CASE("detector matrix is non-degenerate for sliding size-3 grids") {
    for (int size : {4, 8, 16}) {
        DetectorGeometry g{{size, size}, 3, DetectorPlacement::sliding};
        Matrix b = build_detector_matrix(g);
        Eigen::JacobiSVD<Matrix> svd(b);
        CHECK(svd.singularValues().minCoeff() > 0.0);
    }
}

TEST_CASE("permutation relabeling conjugates A and sigma_nu consistently") {
    DetectorGeometry g{{2, 2}, 1, DetectorPlacement::sliding};
    SensingModel model = toy_model(g);
    Vector f(4);
    f << 0.1, 0.7, 0.2, 0.9;
    std::array<Index, 4> perm{3, 1, 0, 2};
    Vector fp(4);
    for (Index i = 0; i < 4; ++i) fp(i) = f(perm[i]);
    // With B = I the detector rows follow the pixel relabeling arm-wise.
    Vector af = model.apply_A(f);
    Vector afp = model.apply_A(fp);
    for (int arm = 0; arm < 3; ++arm)
        for (Index i = 0; i < 4; ++i)
            CHECK(afp(arm * 4 + i) == doctest::Approx(af(arm * 4 + perm[i])));
    Matrix s = model.sigma_nu(ObjectImage{g.grid, f}).dense();
    Matrix sp = model.sigma_nu(ObjectImage{g.grid, fp}).dense();
    for (int ai = 0; ai < 3; ++ai)
        for (int aj = 0; aj < 3; ++aj)
            for (Index p = 0; p < 4; ++p)
                for (Index q = 0; q < 4; ++q)
                    CHECK(sp(ai * 4 + p, aj * 4 + q) ==
                          doctest::Approx(s(ai * 4 + perm[p], aj * 4 + perm[q])));
}

TEST_CASE("model construction rejects bad parameters") {
    DetectorGeometry g{{2, 2}, 3, DetectorPlacement::sliding};
    CHECK_THROWS_AS(SensingModel(g, {}, 1.0, {}, Vector()), InvalidInputError);
    CHECK_THROWS_AS(SensingModel(g, {1.0, -1.0, 1.0}, 1.0, {1.0, 1.0, 1.0},
                                 Vector::Ones(12)),
                    InvalidInputError);
    CHECK_THROWS_AS(SensingModel(g, {1.0, 1.0, 1.0}, 1.0, {1.0, 1.0, 1.0},
                                 Vector::Zero(12)),
                    SingularCovarianceError);
    DetectorGeometry bad{{0, 2}, 3, DetectorPlacement::sliding};
    CHECK_THROWS_AS(bad.validate(), InvalidInputError);
}

TEST_CASE("fingerprint distinguishes structurally different models") {
    DetectorGeometry g{{4, 4}, 3, DetectorPlacement::sliding};
    SensingModel a = toy_model(g);
    SensingModel b = toy_model(g);
    CHECK(a.fingerprint() == b.fingerprint());
    SensingModel c = toy_model(g, 3, 2.0);
    CHECK(a.fingerprint() != c.fingerprint());
    DetectorGeometry g2{{4, 4}, 3, DetectorPlacement::tiled};
    SensingModel d = toy_model(g2);
    CHECK(a.fingerprint() != d.fingerprint());
}
