// Microbenchmarks for the estimation pipeline: one constrained filter step
// versus the relaxed zonotope baseline step, plus the core set primitives.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "czkit/estimator.hpp"
#include "czkit/spec_io.hpp"

namespace {

struct Fixture {
    czkit::ScenarioSpec spec;
    czkit::SvdTransform t;
    czkit::UncertaintyBounds bounds;
    std::vector<czkit::Vector> useq;
    czkit::Trajectory truth;
    czkit::EstimatorState warm;  // state after a few steps, typical complexity

    Fixture() {
        spec = czkit::load_scenario(std::string(CZKIT_DATA_DIR) + "/example_estimation.spec");
        const czkit::DescriptorModel& m = spec.bank.models.front();
        t = czkit::decompose(m);
        bounds = spec.bounds();
        useq.assign(21, czkit::Vector::Zero(m.n_u()));
        truth = czkit::simulate_truth(m, t, bounds, bounds.X0.c, useq, 20, 1);
        warm = czkit::make_initial_state(m, t, bounds, useq[0], truth.outputs[0], spec.limits);
        for (int k = 1; k <= 10; ++k) {
            warm = czkit::step(warm, t, m, bounds, useq[k - 1], useq[k], truth.outputs[k],
                               spec.limits);
        }
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_ConstrainedStep(benchmark::State& state) {
    const Fixture& f = fixture();
    const czkit::DescriptorModel& m = f.spec.bank.models.front();
    for (auto _ : state) {
        benchmark::DoNotOptimize(czkit::step(f.warm, f.t, m, f.bounds, f.useq[10], f.useq[11],
                                             f.truth.outputs[11], f.spec.limits));
    }
}
BENCHMARK(BM_ConstrainedStep);

void BM_BaselineStep(benchmark::State& state) {
    const Fixture& f = fixture();
    const czkit::DescriptorModel& m = f.spec.bank.models.front();
    for (auto _ : state) {
        benchmark::DoNotOptimize(czkit::zonotope_baseline_step(
            f.warm, f.t, m, f.bounds, f.useq[10], f.useq[11], f.truth.outputs[11],
            f.spec.limits));
    }
}
BENCHMARK(BM_BaselineStep);

void BM_Containment(benchmark::State& state) {
    const Fixture& f = fixture();
    const czkit::Vector p = f.truth.states[10];
    for (auto _ : state) {
        benchmark::DoNotOptimize(czkit::contains_point(f.warm.Xhat, p, 1e-7));
    }
}
BENCHMARK(BM_Containment);

void BM_IntervalHull(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(czkit::interval_hull(f.warm.Xhat));
    }
}
BENCHMARK(BM_IntervalHull);

void BM_Reduce(benchmark::State& state) {
    const Fixture& f = fixture();
    const czkit::ConstrainedZonotope pred =
        czkit::predict(f.warm.Zhat, f.t, f.bounds, f.useq[10], f.useq[11]);
    for (auto _ : state) {
        benchmark::DoNotOptimize(czkit::reduce(pred, f.spec.limits));
    }
}
BENCHMARK(BM_Reduce);

}  // namespace

BENCHMARK_MAIN();
