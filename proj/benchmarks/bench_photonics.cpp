#include <benchmark/benchmark.h>

#include "aqds/photonics.hpp"
#include "aqds/rng.hpp"

namespace {

aqds::photonics::ProtocolParams params_at(double total_km) {
    aqds::photonics::ProtocolParams p;
    p.l_a = total_km / 2.0;
    p.l_b = total_km / 2.0;
    return p;
}

void bm_bessel_i0(benchmark::State& state) {
    const double x = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(aqds::photonics::bessel_i0(x));
    }
}

void bm_overall_gain(benchmark::State& state) {
    const auto p = params_at(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            aqds::photonics::overall_gain(p, p.mu_a, p.mu_b));
    }
}

// The full analytic pairing statistics: the unit of work behind every sweep
// point of the rate curve.
void bm_pairing_stats(benchmark::State& state) {
    const auto p = params_at(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(aqds::photonics::pairing_stats(p));
    }
}

void bm_mc_oracle(benchmark::State& state) {
    const auto bins = static_cast<std::uint64_t>(state.range(0));
    auto p = params_at(100.0);
    p.n_pulses = static_cast<double>(bins);
    aqds::RandomSource rng(45);
    for (auto _ : state) {
        benchmark::DoNotOptimize(aqds::photonics::mc_oracle(p, bins, rng));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(bins));
}

}  // namespace

BENCHMARK(bm_bessel_i0)->Arg(1)->Arg(50)->Arg(500);
BENCHMARK(bm_overall_gain)->Arg(50)->Arg(200);
BENCHMARK(bm_pairing_stats)->Arg(50)->Arg(200)->Arg(400);
BENCHMARK(bm_mc_oracle)->Arg(10000)->Arg(100000);
