#include <benchmark/benchmark.h>

#include "aqds/bitstring.hpp"
#include "aqds/gf2.hpp"
#include "aqds/otuh.hpp"
#include "aqds/rng.hpp"

namespace {

void bm_streaming_hash(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = static_cast<std::size_t>(state.range(1));
    aqds::RandomSource rng(45);
    const auto p = aqds::gf2::derive_irreducible(aqds::BitString::random(n, rng));
    const aqds::BitString s = aqds::BitString::random(n, rng);
    const aqds::BitString msg = aqds::BitString::random(m, rng);
    for (auto _ : state) {
        aqds::otuh::ToeplitzHasher hasher(p, s);
        hasher.absorb(msg);
        benchmark::DoNotOptimize(hasher.digest());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(m));
}

void bm_lfsr_step(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    aqds::RandomSource rng(46);
    const auto p = aqds::gf2::derive_irreducible(aqds::BitString::random(n, rng));
    aqds::BitString s = aqds::BitString::random(n, rng);
    const auto spec = aqds::otuh::ToeplitzSpec::create(p, s, 1);
    for (auto _ : state) {
        s = aqds::otuh::lfsr_next_state(spec, s);
        benchmark::DoNotOptimize(s);
    }
}

}  // namespace

BENCHMARK(bm_streaming_hash)->Args({32, 1024})->Args({64, 4096})->Args({128, 4096});
BENCHMARK(bm_lfsr_step)->Arg(32)->Arg(128);
