#include <benchmark/benchmark.h>

#include "dbbsim/config.hpp"
#include "dbbsim/detection.hpp"
#include "dbbsim/dynamics.hpp"
#include "dbbsim/quadrature.hpp"
#include "dbbsim/sampling.hpp"

namespace {

const dbb::ExperimentConfig& base_config()
{
    static const dbb::ExperimentConfig cfg;
    return cfg;
}

const dbb::TwoParticleWaveFunction& wavefunction()
{
    static const dbb::TwoParticleWaveFunction w = base_config().wavefunction();
    return w;
}

void BM_PacketEvaluate(benchmark::State& state)
{
    const auto& w = wavefunction();
    const auto& c = w.constants();
    const auto& p = w.packet_a();
    double x = 4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dbb::evaluate_packet(p, c, x, 12.0, 2.5));
        x += 1e-9;
    }
}
BENCHMARK(BM_PacketEvaluate);

void BM_SnapshotDensity(benchmark::State& state)
{
    const auto snap = wavefunction().at_time(5.0);
    double x = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(snap.density(x, 24.0, -2.0, 26.0));
        x += 1e-9;
    }
}
BENCHMARK(BM_SnapshotDensity);

void BM_VelocityField(benchmark::State& state)
{
    const auto& w = wavefunction();
    dbb::ConfigurationPoint q{4.0, 12.0, -5.0, 13.0, 2.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(dbb::try_velocity(w, q, 1e-10));
        q.x1 += 1e-9;
    }
}
BENCHMARK(BM_VelocityField);

void BM_QuantumPotential(benchmark::State& state)
{
    const auto& w = wavefunction();
    dbb::ConfigurationPoint q{4.0, 12.0, -5.0, 13.0, 2.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(w.quantum_potential(q));
        q.x1 += 1e-9;
    }
}
BENCHMARK(BM_QuantumPotential);

void BM_IntegrateTrajectory(benchmark::State& state)
{
    const auto& w = wavefunction();
    const dbb::IntegratorConfig cfg;
    const dbb::ConfigurationPoint q0{4.7, 0.1, -5.2, -0.3, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(dbb::integrate_trajectory(w, q0, 5.0, cfg, {}));
    }
}
BENCHMARK(BM_IntegrateTrajectory);

void BM_SampleDensity(benchmark::State& state)
{
    const auto& w = wavefunction();
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dbb::sample_density(w, 0.0, 256, seed++));
    }
    state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_SampleDensity);

void BM_Quadrature2DPacketNorm(benchmark::State& state)
{
    const auto snap = wavefunction().at_time(2.0);
    const dbb::Interval domain[2] = {{-20.0, 20.0}, {-10.0, 30.0}};
    for (auto _ : state) {
        auto f = [&](std::span<const double> v) {
            return snap.density(v[0], v[1], 0.0, 26.0);
        };
        benchmark::DoNotOptimize(dbb::try_integrate(f, domain, {1e-8, 1e-12, 10'000'000}));
    }
}
BENCHMARK(BM_Quadrature2DPacketNorm);

void BM_SqtJointProbability(benchmark::State& state)
{
    const auto& w = wavefunction();
    const dbb::DetectorPair pair{{2.0, 2.5}, {-8.0, -7.5}, false};
    for (auto _ : state) {
        benchmark::DoNotOptimize(dbb::sqt_joint_probability(w, pair, 5.0));
    }
}
BENCHMARK(BM_SqtJointProbability);

}  // namespace

BENCHMARK_MAIN();
