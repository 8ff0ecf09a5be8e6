// Serial against OpenMP timing for the two hot kernels: the Maxwell-Bloch right-hand side and event generation.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "orca/mbsolver/memory.hpp"
#include "orca/mbsolver/schedule.hpp"
#include "orca/photonstats/generator.hpp"

using namespace orca;

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int main() {
    std::printf("threads %d\n", omp_get_max_threads());

    const auto sp = atomphys::builtin_species("cs133");
    mbsolver::MemorySetup su{sp, atomphys::make_ensemble(sp, 364.15, 0.072), {}, {}, {}, mbsolver::Execution::Parallel};
    su.grid.nz = 41;
    su.grid.nv = 64;
    const auto model = mbsolver::build_model(su, mbsolver::default_schedule(sp));
    const std::size_t n = model.state_size();
    std::vector<mbsolver::cplx> y(n, {1e-3, 2e-3}), dy(n), field(model.nz), source(model.nz);
    std::vector<double> control(model.nz, 1e9);
    const int reps = 2000;
    const double ts = seconds([&] {
        for (int r = 0; r < reps; ++r) mbsolver::rhs_serial(model, y.data(), control.data(), {1.0, 0.0}, dy.data(), field.data(), source.data());
    });
    const double tp = seconds([&] {
        for (int r = 0; r < reps; ++r) mbsolver::rhs_parallel(model, y.data(), control.data(), {1.0, 0.0}, dy.data(), field.data(), source.data());
    });
    std::printf("mb rhs     nz=%d nv=%d state=%zu  serial %.3f ms  parallel %.3f ms  speedup %.2f\n", model.nz, model.nv, n,
                1e3 * ts / reps, 1e3 * tp / reps, ts / tp);

    photonstats::PairSourceModel src;
    src.mu = 0.05;
    const auto mem = photonstats::memory_from_lifetime(0.7, 0.1677, 5.4e-9, 3500, 8);
    const photonstats::GateSpec gates;
    const std::int64_t triggers = 200000;
    photonstats::GeneratorOptions opts;
    opts.block_triggers = 1000;
    opts.execution = photonstats::Execution::Serial;
    std::size_t events = 0;
    const double gs = seconds([&] {
        events = photonstats::simulate_event_stream(src, mem, gates, photonstats::Configuration::MEM, triggers, 7, opts).records.size();
    });
    opts.execution = photonstats::Execution::Parallel;
    const double gp = seconds([&] {
        photonstats::simulate_event_stream(src, mem, gates, photonstats::Configuration::MEM, triggers, 7, opts);
    });
    std::printf("generator  pulses=%lld events=%zu  serial %.3f s  parallel %.3f s  speedup %.2f\n",
                static_cast<long long>(triggers * 80), events, gs, gp, gs / gp);
    return 0;
}
