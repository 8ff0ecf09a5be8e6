#include "orca/mbsolver/model.hpp"

#include <algorithm>
#include <cmath>

#include "orca/atomphys/angular.hpp"
#include "orca/constants.hpp"
#include "orca/errors.hpp"

namespace orca::mbsolver {

using atomphys::Manifold;

std::vector<HyperfinePath> all_paths(const atomphys::SpeciesRecord& s) {
    const double Fg = s.memory_ground_F();
    std::vector<HyperfinePath> out;
    for (const auto& e : s.manifold(Manifold::Intermediate).levels) {
        if (atomphys::relative_line_strength(s, Manifold::Ground, Fg, e.F) == 0.0) continue;
        for (const auto& st : s.manifold(Manifold::Storage).levels)
            if (atomphys::relative_line_strength(s, Manifold::Intermediate, e.F, st.F) != 0.0)
                out.push_back({Fg, e.F, st.F});
    }
    return out;
}

std::vector<HyperfinePath> pumped_path(const atomphys::SpeciesRecord& s) {
    const double Fg = s.memory_ground_F();
    return {{Fg, Fg + 1, Fg + 2}};
}

double coupling_beta(const atomphys::SpeciesRecord& sp, const atomphys::ThermalEnsemble& ens, double scale) {
    const auto& g = sp.manifold(Manifold::Ground);
    const double I = sp.nuclear_spin;
    const double Fg = sp.memory_ground_F();
    const double fraction = (2 * Fg + 1) / ((2 * I + 1) * (2 * g.J + 1));
    const double d = scale * sp.signal.reduced_dipole;
    const double d_eff2 = d * d / (3.0 * (2 * g.J + 1));
    const double omega = phys::two_pi * phys::c / sp.signal.wavelength;
    return ens.number_density * fraction * omega * d_eff2 / (2.0 * phys::eps0 * phys::hbar * phys::c);
}

double MemoryModel::max_rate(double peak_rabi) const {
    double r = 0.0;
    for (const auto& x : rate_p) r = std::max(r, std::abs(x));
    for (const auto& x : rate_s) r = std::max(r, std::abs(x));
    double cmax = 0.0;
    for (double x : c) cmax = std::max(cmax, std::abs(x));
    double gg = 0.0;
    for (double x : g) gg += x * x;
    return r + 0.5 * peak_rabi * cmax * std::sqrt(static_cast<double>(std::max(ne, ns))) + (19.0 / 24.0) * beta * dz * gg;
}

static MemoryModel assemble(const atomphys::SpeciesRecord& sp0, const atomphys::ThermalEnsemble& ens,
                            const ProtocolSchedule& sched, const SolverGrid& grid, const Calibration& cal,
                            const ModelOptions& opts, std::vector<atomphys::VelocityNode> nodes) {
    validate(sched);
    if (grid.nz < 4) throw ConfigError("solver grid needs nz >= 4");
    if (!(grid.dt > 0)) throw ConfigError("solver time step must be positive");
    if (grid.window_margin < 0) throw ConfigError("window margin must be non-negative");
    const auto sp = sp0.with_scaled_splittings(opts.splitting_scale);
    MemoryModel m;
    m.paths = grid.paths.empty() ? all_paths(sp) : grid.paths;
    const double Fg = sp.memory_ground_F();
    for (const auto& p : m.paths) {
        if (std::abs(p.F_g - Fg) > 1e-9) throw ConfigError("hyperfine paths must start from the memory ground level");
        if (atomphys::relative_line_strength(sp, Manifold::Ground, p.F_g, p.F_e) == 0.0 ||
            atomphys::relative_line_strength(sp, Manifold::Intermediate, p.F_e, p.F_s) == 0.0)
            throw ConfigError("hyperfine path contains a dipole-forbidden step");
        if (std::find(m.Fe.begin(), m.Fe.end(), p.F_e) == m.Fe.end()) m.Fe.push_back(p.F_e);
        if (std::find(m.Fs.begin(), m.Fs.end(), p.F_s) == m.Fs.end()) m.Fs.push_back(p.F_s);
    }
    std::sort(m.Fe.begin(), m.Fe.end());
    std::sort(m.Fs.begin(), m.Fs.end());
    m.ne = static_cast<int>(m.Fe.size());
    m.ns = static_cast<int>(m.Fs.size());
    m.nz = grid.nz;
    m.nv = static_cast<int>(nodes.size());
    m.length = ens.cell_length;
    m.dz = ens.cell_length / (grid.nz - 1);
    m.z_weight.assign(static_cast<std::size_t>(m.nz), 0.0);
    {
        auto add = [&](int j, double w) { m.z_weight[static_cast<std::size_t>(j)] += w * m.dz / 24.0; };
        const int n = m.nz;
        add(0, 9), add(1, 19), add(2, -5), add(3, 1);
        for (int j = 2; j < n - 1; ++j) add(j - 2, -1), add(j - 1, 13), add(j, 13), add(j + 1, -1);
        add(n - 4, 1), add(n - 3, -5), add(n - 2, 19), add(n - 1, 9);
    }
    m.dt = grid.dt;
    m.window_margin = grid.window_margin;
    m.geometry = sched.geometry;
    for (const auto& n : nodes) m.velocity.push_back(n.velocity), m.weight.push_back(n.weight);

    const auto& me = sp.manifold(Manifold::Intermediate);
    const auto& ms = sp.manifold(Manifold::Storage);
    m.gamma_e = me.linewidth * opts.intermediate_linewidth_scale;
    m.gamma_s = ms.linewidth * opts.storage_linewidth_scale;
    m.g.resize(m.ne);
    m.detuning_e.resize(m.ne);
    const double e_ref = me.level(Fg + 1).energy_offset;
    const double s_ref = ms.level(Fg + 2).energy_offset;
    for (int e = 0; e < m.ne; ++e) {
        m.g[e] = atomphys::relative_line_strength(sp, Manifold::Ground, Fg, m.Fe[e]);
        m.detuning_e[e] = sched.detuning + me.level(m.Fe[e]).energy_offset - e_ref;
    }
    m.detuning_s.resize(m.ns);
    for (int s = 0; s < m.ns; ++s) m.detuning_s[s] = sched.two_photon_detuning + ms.level(m.Fs[s]).energy_offset - s_ref;
    m.c.assign(static_cast<std::size_t>(m.ne) * m.ns, 0.0);
    for (const auto& p : m.paths) {
        const int e = static_cast<int>(std::find(m.Fe.begin(), m.Fe.end(), p.F_e) - m.Fe.begin());
        const int s = static_cast<int>(std::find(m.Fs.begin(), m.Fs.end(), p.F_s) - m.Fs.begin());
        m.c[e * m.ns + s] = atomphys::relative_line_strength(sp, Manifold::Intermediate, p.F_e, p.F_s);
    }

    m.k_s = phys::two_pi / sched.signal.wavelength;
    m.k_c = phys::two_pi / sched.read_in().wavelength;
    m.k_r = sched.geometry == Geometry::CounterPropagating ? m.k_s - m.k_c : m.k_s + m.k_c;
    m.rate_p.resize(static_cast<std::size_t>(m.nv) * m.ne);
    m.rate_s.resize(static_cast<std::size_t>(m.nv) * m.ns);
    for (int v = 0; v < m.nv; ++v) {
        for (int e = 0; e < m.ne; ++e)
            m.rate_p[v * m.ne + e] = cplx(0.5 * m.gamma_e, m.detuning_e[e] + m.k_s * m.velocity[v]);
        for (int s = 0; s < m.ns; ++s)
            m.rate_s[v * m.ns + s] = cplx(0.5 * m.gamma_s, m.detuning_s[s] + m.k_r * m.velocity[v]);
    }
    m.beta = coupling_beta(sp, ens, cal.signal_dipole_scale);
    return m;
}

MemoryModel build_model(const atomphys::SpeciesRecord& species, const atomphys::ThermalEnsemble& ensemble,
                        const ProtocolSchedule& schedule, const SolverGrid& grid, const Calibration& cal,
                        const ModelOptions& opts) {
    if (grid.nv < 1) throw ConfigError("solver grid needs nv >= 1");
    return assemble(species, ensemble, schedule, grid, cal, opts, atomphys::velocity_quadrature(ensemble, grid.nv));
}

MemoryModel build_model_single_class(const atomphys::SpeciesRecord& species, const atomphys::ThermalEnsemble& ensemble,
                                     const ProtocolSchedule& schedule, SolverGrid grid, const Calibration& cal,
                                     const ModelOptions& opts) {
    grid.nv = 1;
    return assemble(species, ensemble, schedule, grid, cal, opts, {{0.0, 1.0}});
}

}  // namespace orca::mbsolver
