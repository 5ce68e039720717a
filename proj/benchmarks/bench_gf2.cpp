#include <benchmark/benchmark.h>

#include "aqds/bitstring.hpp"
#include "aqds/gf2.hpp"
#include "aqds/rng.hpp"

namespace {

void bm_is_irreducible(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    aqds::RandomSource rng(42);
    // A fixed pool of random monic candidates, mostly reducible, exercises
    // the realistic rejection-heavy workload.
    std::vector<aqds::gf2::Gf2Poly> pool;
    for (int i = 0; i < 64; ++i) {
        aqds::BitString c = aqds::BitString::random(n + 1, rng);
        c.set(n, true);
        c.set(0, true);
        pool.push_back(aqds::gf2::Gf2Poly::from_coeffs(c));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(aqds::gf2::is_irreducible(pool[i % pool.size()]));
        ++i;
    }
}

void bm_derive_irreducible(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    aqds::RandomSource rng(43);
    std::vector<aqds::BitString> seeds;
    for (int i = 0; i < 64; ++i) seeds.push_back(aqds::BitString::random(n, rng));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(aqds::gf2::derive_irreducible(seeds[i % seeds.size()]));
        ++i;
    }
}

void bm_poly_mul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    aqds::RandomSource rng(44);
    aqds::BitString a = aqds::BitString::random(n + 1, rng);
    aqds::BitString b = aqds::BitString::random(n + 1, rng);
    a.set(n, true);
    b.set(n, true);
    const auto pa = aqds::gf2::Gf2Poly::from_coeffs(a);
    const auto pb = aqds::gf2::Gf2Poly::from_coeffs(b);
    for (auto _ : state) benchmark::DoNotOptimize(aqds::gf2::poly_mul(pa, pb));
}

}  // namespace

BENCHMARK(bm_is_irreducible)->Arg(16)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(bm_derive_irreducible)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(bm_poly_mul)->Arg(63)->Arg(255);

BENCHMARK_MAIN();
