// Serial vs OpenMP shot pools on the n=4 and n=6 XXZ chains.
#include <benchmark/benchmark.h>

#include "rlcu/estimator.hpp"

using namespace rlcu;

namespace {

struct Setup {
    Hamiltonian H, O;
    StateVector psi;
    FilterPlan plan;

    explicit Setup(int n) {
        ModelParams mp;
        mp.Jx = mp.Jy = -1;
        mp.Jz = -2;
        H = build_model("heisenberg_xxz", n, mp);
        std::string l(n, 'I');
        l[1] = l[2] = 'Z';
        O = Hamiltonian(n, {{1.0, PauliString::from_label(l)}});
        const EigenSystem es = diagonalize(H);
        const CVector v = default_initial_state(es);
        psi = StateVector(n, std::vector<cplx>(v.data(), v.data() + v.size()));
        PropertyInputs in;
        in.Delta = es.gap(0);
        in.eta = es.overlap(v, 0);
        in.eps = 0.05;
        in.lambda = H.one_norm();
        in.basis = Basis::symmetry;
        in.mode = SegmentMode::tight;
        plan = parameter_selection(in);
        plan.omega = es.energies(0);
    }
};

const Setup& setup(int n) {
    static const Setup s4(4), s6(6);
    return n == 4 ? s4 : s6;
}

void pool(benchmark::State& st, bool parallel) {
    const Setup& s = setup(int(st.range(0)));
    const ShotEngine eng(s.H, s.psi, s.O, s.plan);
    const long long shots = 8 * ShotEngine::kChunk;
    for (auto _ : st) benchmark::DoNotOptimize(eng.run_pool(true, shots, 1, parallel));
    st.SetItemsProcessed(st.iterations() * shots);
}

void BM_pool_serial(benchmark::State& st) { pool(st, false); }
void BM_pool_openmp(benchmark::State& st) { pool(st, true); }

}  // namespace

BENCHMARK(BM_pool_serial)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pool_openmp)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
