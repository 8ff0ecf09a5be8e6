#include "orca/analytic/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orca/atomphys/angular.hpp"
#include "orca/constants.hpp"
#include "orca/errors.hpp"

namespace orca::analytic {

using atomphys::Manifold;

double LindbladTrace::population(std::size_t sample, std::size_t state) const {
    return rho.at(sample)[state * dim() + state].real();
}

double LindbladTrace::manifold_population(std::size_t sample, Manifold m) const {
    double p = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
        if (basis[i].manifold == m) p += population(sample, i);
    return p;
}

cplx LindbladTrace::coherence(std::size_t sample, std::size_t row, std::size_t col) const {
    return rho.at(sample)[row * dim() + col];
}

std::size_t LindbladTrace::index_of(Manifold m, double F) const {
    for (std::size_t i = 0; i < dim(); ++i)
        if (basis[i].manifold == m && std::abs(basis[i].F - F) < 1e-9) return i;
    throw DomainError("no such level in the basis");
}

namespace {

struct Jump {
    std::size_t to, from;
    double rate;
};

class Generator {
public:
    Generator(const atomphys::SpeciesRecord& sp, const LindbladFields& f, const LindbladSettings& st)
        : fields_(f) {
        for (int k = 0; k < 3; ++k)
            for (const auto& l : sp.manifold(static_cast<Manifold>(k)).levels)
                basis_.push_back({static_cast<Manifold>(k), l.F});
        n_ = basis_.size();
        const double Fg = sp.memory_ground_F();
        const auto& mg = sp.manifold(Manifold::Ground);
        const auto& me = sp.manifold(Manifold::Intermediate);
        const auto& ms = sp.manifold(Manifold::Storage);
        const double ks = phys::two_pi / sp.signal.wavelength, kc = phys::two_pi / sp.control.wavelength;
        const double kr = st.geometry == Geometry::CounterPropagating ? ks - kc : ks + kc;
        const double e_ref = me.level(Fg + 1).energy_offset, s_ref = ms.level(Fg + 2).energy_offset;
        energy_.resize(n_);
        signal_.assign(n_ * n_, 0.0);
        control_.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto& b = basis_[i];
            switch (b.manifold) {
                case Manifold::Ground: energy_[i] = mg.level(b.F).energy_offset - mg.level(Fg).energy_offset; break;
                case Manifold::Intermediate:
                    energy_[i] = st.detuning + me.level(b.F).energy_offset - e_ref + ks * st.velocity;
                    break;
                case Manifold::Storage:
                    energy_[i] = st.two_photon_detuning + ms.level(b.F).energy_offset - s_ref + kr * st.velocity;
                    break;
            }
        }
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                const auto &lo = basis_[i], &up = basis_[j];
                if (static_cast<int>(up.manifold) != static_cast<int>(lo.manifold) + 1) continue;
                const double c = atomphys::relative_line_strength(sp, lo.manifold, lo.F, up.F);
                if (c == 0.0) continue;
                auto& target = lo.manifold == Manifold::Ground ? signal_ : control_;
                target[j * n_ + i] = target[i * n_ + j] = -0.5 * c;
                const auto& mu = sp.manifold(up.manifold);
                const double rate = mu.linewidth *
                                    atomphys::decay_branching(up.F, lo.F, mu.J, sp.manifold(lo.manifold).J, sp.nuclear_spin);
                if (rate > 0 && st.radiative_decay) jumps_.push_back({i, j, rate});
            }
        loss_.assign(n_, 0.0);
        for (const auto& jp : jumps_) loss_[jp.from] += jp.rate;
    }

    std::size_t dim() const { return n_; }
    const std::vector<LindbladBasisState>& basis() const { return basis_; }

    // Largest frequency scale at time t, for the step-size check.
    double max_rate(double t) const {
        double r = 0.0;
        for (double e : energy_) r = std::max(r, std::abs(e));
        for (double l : loss_) r = std::max(r, l);
        return r + 0.5 * (std::abs(fields_.signal(t)) + std::abs(fields_.control(t)));
    }

    void apply(double t, const cplx* rho, cplx* out) const {
        const double os = fields_.signal(t), oc = fields_.control(t);
        h_.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) h_[i * n_ + i] = cplx(energy_[i], -0.5 * loss_[i]);
        for (std::size_t q = 0; q < n_ * n_; ++q) h_[q] += os * signal_[q] + oc * control_[q];
        // drho/dt = -i (H rho - rho H^dag) + sum jumps, with H the non-Hermitian effective Hamiltonian.
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                cplx acc = 0.0;
                for (std::size_t k = 0; k < n_; ++k)
                    acc += h_[i * n_ + k] * rho[k * n_ + j] - rho[i * n_ + k] * std::conj(h_[j * n_ + k]);
                out[i * n_ + j] = cplx(0.0, -1.0) * acc;
            }
        for (const auto& jp : jumps_) out[jp.to * n_ + jp.to] += jp.rate * rho[jp.from * n_ + jp.from];
    }

private:
    LindbladFields fields_;
    std::vector<LindbladBasisState> basis_;
    std::size_t n_ = 0;
    std::vector<double> energy_, loss_;
    std::vector<double> signal_, control_;
    std::vector<Jump> jumps_;
    mutable std::vector<cplx> h_;
};

}  // namespace

LindbladTrace single_atom_lindblad(const atomphys::SpeciesRecord& species, const LindbladFields& fields,
                                   const LindbladSettings& st) {
    if (!fields.signal || !fields.control) throw DomainError("both field envelopes must be set");
    if (!(st.dt > 0) || !(st.t_end >= st.t_start)) throw DomainError("bad integration interval");
    if (st.record_every < 1) throw DomainError("record_every must be positive");
    const Generator gen(species, fields, st);
    const std::size_t n = gen.dim(), nn = n * n;

    std::vector<cplx> rho(nn, 0.0);
    if (st.initial.empty()) {
        std::size_t g = n;
        for (std::size_t i = 0; i < n; ++i)
            if (gen.basis()[i].manifold == Manifold::Ground && std::abs(gen.basis()[i].F - species.memory_ground_F()) < 1e-9)
                g = i;
        rho.at(g * n + g) = 1.0;
    } else {
        if (st.initial.size() != nn) throw DomainError("initial density matrix has the wrong size");
        rho = st.initial;
        cplx tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += rho[i * n + i];
        if (std::abs(tr - 1.0) > 1e-9) throw DomainError("initial density matrix must have unit trace");
    }

    LindbladTrace out;
    out.basis = gen.basis();
    const int steps = std::max(1, static_cast<int>(std::ceil((st.t_end - st.t_start) / st.dt - 1e-9)));
    const double h = (st.t_end - st.t_start) / steps;
    std::vector<cplx> k1(nn), k2(nn), k3(nn), k4(nn), tmp(nn);

    auto record = [&](double t) {
        out.time.push_back(t);
        out.rho.push_back(rho);
    };
    auto check = [&](int i, double t) {
        double tr = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            const double p = rho[q * n + q].real();
            tr += p;
            out.min_population = std::min(out.min_population, p);
            if (!std::isfinite(p) || p < -1e-9) {
                std::ostringstream os;
                os << "Lindblad integration lost positivity at step " << i << " (t = " << t << " s, population " << p
                   << ")";
                throw NumericalError(os.str());
            }
        }
        out.max_trace_error = std::max(out.max_trace_error, std::abs(tr - 1.0));
        if (out.max_trace_error > 1e-9) throw NumericalError("Lindblad integration does not preserve the trace");
    };

    record(st.t_start);
    for (int i = 0; i < steps; ++i) {
        const double t = st.t_start + i * h;
        const double stab = gen.max_rate(t) * h;
        if (stab > 2.0) {
            std::ostringstream os;
            os << "Lindblad step too large: max rate * dt = " << stab << " at t = " << t << " s";
            throw InstabilityError(os.str());
        }
        gen.apply(t, rho.data(), k1.data());
        for (std::size_t q = 0; q < nn; ++q) tmp[q] = rho[q] + 0.5 * h * k1[q];
        gen.apply(t + 0.5 * h, tmp.data(), k2.data());
        for (std::size_t q = 0; q < nn; ++q) tmp[q] = rho[q] + 0.5 * h * k2[q];
        gen.apply(t + 0.5 * h, tmp.data(), k3.data());
        for (std::size_t q = 0; q < nn; ++q) tmp[q] = rho[q] + h * k3[q];
        gen.apply(t + h, tmp.data(), k4.data());
        for (std::size_t q = 0; q < nn; ++q) rho[q] += (h / 6.0) * (k1[q] + 2.0 * (k2[q] + k3[q]) + k4[q]);
        check(i + 1, t + h);
        if ((i + 1) % st.record_every == 0 || i + 1 == steps) record(t + h);
    }
    return out;
}

}  // namespace orca::analytic
