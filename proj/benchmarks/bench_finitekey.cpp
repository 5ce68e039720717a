#include <benchmark/benchmark.h>

#include "aqds/baseline.hpp"
#include "aqds/finitekey.hpp"
#include "aqds/photonics.hpp"

namespace {

aqds::photonics::ProtocolParams proto_at(double total_km) {
    aqds::photonics::ProtocolParams p;
    p.l_a = total_km / 2.0;
    p.l_b = total_km / 2.0;
    return p;
}

aqds::baseline::BaselineParams base_at(double total_km) {
    aqds::baseline::BaselineParams p;
    p.l_a = total_km / 2.0;
    p.l_b = total_km / 2.0;
    return p;
}

void bm_chernoff_observed(benchmark::State& state) {
    const double x = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(aqds::finitekey::chernoff_observed(x, 1e-10));
    }
}

void bm_estimate(benchmark::State& state) {
    const auto p = proto_at(static_cast<double>(state.range(0)));
    const auto stats = aqds::photonics::pairing_stats(p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(aqds::finitekey::estimate(stats, p));
    }
}

// Minimal signature length search (doubling + bisection over the subgroup
// entropy), holding the channel estimation fixed.
void bm_signature_length(benchmark::State& state) {
    const auto p = proto_at(static_cast<double>(state.range(0)));
    const auto est =
        aqds::finitekey::estimate(aqds::photonics::pairing_stats(p), p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            aqds::finitekey::signature_length(est, p, 1000.0, 1e-10));
    }
}

// Full chain for one asynchronous rate-curve point: statistics, estimation,
// and signature sizing.
void bm_async_rate_point(benchmark::State& state) {
    const auto p = proto_at(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            aqds::finitekey::async_rate_point(p, 1000.0, 1e-10));
    }
}

// Full chain for one comparator rate-curve point; dominated by the
// double-parameter rectangle scan.
void bm_baseline_rate_point(benchmark::State& state) {
    const auto p = base_at(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            aqds::baseline::baseline_rate_point(p, 1000.0, 1e-10));
    }
}

}  // namespace

BENCHMARK(bm_chernoff_observed)->Arg(100)->Arg(1000000);
BENCHMARK(bm_estimate)->Arg(50)->Arg(200);
BENCHMARK(bm_signature_length)->Arg(50)->Arg(200);
BENCHMARK(bm_async_rate_point)->Arg(50)->Arg(200);
BENCHMARK(bm_baseline_rate_point)->Arg(50)->Arg(100);
