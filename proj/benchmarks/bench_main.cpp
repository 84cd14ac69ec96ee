#include <benchmark/benchmark.h>

#include <random>

#include "mgi/linalg.hpp"
#include "mgi/reduction.hpp"
#include "mgi/sensing.hpp"
#include "mgi/sim.hpp"
#include "mgi/transforms.hpp"

using namespace mgi;

namespace {

Vector random_vector(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    return Vector::NullaryExpr(n, [&](Index) { return g(rng); });
}

void bm_dct_forward(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SparsityBasis basis(BasisKind::dct2, {n, n});
    Vector img = random_vector(static_cast<Index>(n) * n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(basis.forward(img));
}

void bm_haar_forward(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SparsityBasis basis(BasisKind::haar2, {n, n});
    Vector img = random_vector(static_cast<Index>(n) * n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(basis.forward(img));
}

void bm_box_projection(benchmark::State& state) {
    const Index n = state.range(0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) m(i, j) = g(rng);
    Matrix q = m * m.transpose() + 0.1 * Matrix::Identity(n, n);
    LinearOperator op = LinearOperator::from_matrix(q);
    Vector u = 2.0 * random_vector(n, 4);
    Vector lo = Vector::Zero(n), hi = Vector::Ones(n);
    for (auto _ : state) benchmark::DoNotOptimize(mahalanobis_project(u, op, lo, hi));
}

SensingModel benchmark_model(int n) {
    AcquisitionConfig cfg;
    cfg.photons_per_pixel = 1.0;
    DetectorGeometry g{{n, n}, 3, DetectorPlacement::sliding};
    return build_calibrated_model(g, cfg);
}

void bm_normal_matrix(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SensingModel model = benchmark_model(n);
    ObjectImage f = model.worst_case_f();
    for (auto _ : state) benchmark::DoNotOptimize(model.normal_matrix(f));
}

void bm_woodbury_apply(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SensingModel model = benchmark_model(n);
    WoodburyInverse w = invert_low_rank_plus_diag(model.sigma_nu(model.worst_case_f()));
    Vector v = random_vector(model.m(), 5);
    for (auto _ : state) benchmark::DoNotOptimize(w.apply(v));
}

void bm_reduce(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SensingModel model = benchmark_model(n);
    ReductionContext ctx(std::move(model));
    Vector xi = random_vector(ctx.model().m(), 6);
    for (auto _ : state) benchmark::DoNotOptimize(ctx.reduce(xi));
}

void bm_simulate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    AcquisitionConfig cfg;
    cfg.photons_per_pixel = 1.0;
    DetectorGeometry g{{n, n}, 3, DetectorPlacement::sliding};
    SensingModel model = build_calibrated_model(g, cfg);
    ObjectImage f = gen_two_slit(g.grid);
    for (auto _ : state) {
        ++cfg.seed;
        benchmark::DoNotOptimize(simulate_gi(f, model, cfg));
    }
}

BENCHMARK(bm_dct_forward)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(bm_haar_forward)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(bm_box_projection)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(bm_normal_matrix)->Arg(8)->Arg(16);
BENCHMARK(bm_woodbury_apply)->Arg(8)->Arg(16);
BENCHMARK(bm_reduce)->Arg(8)->Arg(16);
BENCHMARK(bm_simulate)->Arg(8)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
