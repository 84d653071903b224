#include "bdlab/kernels.hpp"
#include "bdlab/suites.hpp"

#include <benchmark/benchmark.h>

using namespace bdlab;

namespace {

// a basis-heavy stage with a few long Succ chains
struct Fixture {
    std::unique_ptr<XnrSpace> sp;
    std::vector<std::size_t> gammas;
    SparseRow x;

    explicit Fixture(Rank top)
    {
        sp = std::make_unique<XnrSpace>(std::make_shared<WeightSchedule>(toy_schedule_t1()),
            ThresholdPolicy::toy(), Mode::Toy);
        sp->base();
        NormedBlocks nb = basis_blocks(*sp, basis_family(1), 2, top / 2, 2);
        for (long first = 0; first + 8 <= static_cast<long>(nb.blocks.size()); first += 8)
            build_l1_average(*sp, nb, first, 8, 8, 1);
        const SpaceStage& st = sp->stage();
        gammas = st.indices_up_to(st.max_rank());
        BlockVector v;
        for (std::size_t k = 0; k < nb.blocks.size(); ++k)
            v += nb.blocks[k].scaled(make_q(k % 2 ? -1 : 1, 1 + static_cast<long>(k % 5)));
        x = dense(st, v);
    }
};

Fixture& fixture()
{
    static Fixture f(256);
    return f;
}

void BM_HorizonSerial(benchmark::State& s)
{
    auto& f = fixture();
    for (auto _ : s)
        benchmark::DoNotOptimize(kernels::horizon_lower_serial(f.sp->stage(), f.gammas, f.x));
}

void BM_HorizonParallel(benchmark::State& s)
{
    auto& f = fixture();
    for (auto _ : s)
        benchmark::DoNotOptimize(kernels::horizon_lower_parallel(f.sp->stage(), f.gammas, f.x));
}

void BM_ExtensionSerial(benchmark::State& s)
{
    auto& f = fixture();
    for (auto _ : s)
        benchmark::DoNotOptimize(kernels::extension_masses_serial(f.sp->stage(), f.gammas, 64));
}

void BM_ExtensionParallel(benchmark::State& s)
{
    auto& f = fixture();
    for (auto _ : s)
        benchmark::DoNotOptimize(kernels::extension_masses_parallel(f.sp->stage(), f.gammas, 64));
}

}

BENCHMARK(BM_HorizonSerial);
BENCHMARK(BM_HorizonParallel);
BENCHMARK(BM_ExtensionSerial);
BENCHMARK(BM_ExtensionParallel);
BENCHMARK_MAIN();
