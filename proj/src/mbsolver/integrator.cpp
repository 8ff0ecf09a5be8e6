#include <cmath>
#include <sstream>

#include "orca/constants.hpp"
#include "orca/errors.hpp"
#include "orca/mbsolver/integrator.hpp"

namespace orca::mbsolver {

EnsembleState EnsembleState::zeros(const MemoryModel& m, double t) {
    return {t, std::vector<cplx>(m.state_size(), cplx(0.0))};
}

namespace {

struct Norms {
    double spin = 0.0;
    double excitation = 0.0;
    double decay_rate = 0.0;
};

Norms norms(const MemoryModel& m, const cplx* y) {
    Norms out;
    for (int j = 0; j < m.nz; ++j) {
        double sp = 0.0, pp = 0.0;
        for (int v = 0; v < m.nv; ++v) {
            const cplx* a = y + m.p_index(j, v, 0);
            double pv = 0.0, sv = 0.0;
            for (int e = 0; e < m.ne; ++e) pv += std::norm(a[e]);
            for (int s = 0; s < m.ns; ++s) sv += std::norm(a[m.ne + s]);
            pp += m.weight[v] * pv;
            sp += m.weight[v] * sv;
        }
        const double w = m.beta * m.quadrature_weight(j);
        out.spin += w * sp;
        out.excitation += w * (sp + pp);
        out.decay_rate += w * (m.gamma_e * pp + m.gamma_s * sp);
    }
    return out;
}

}  // namespace

double spin_wave_norm(const MemoryModel& m, const EnsembleState& st) { return norms(m, st.amplitudes.data()).spin; }
double excitation_norm(const MemoryModel& m, const EnsembleState& st) {
    return norms(m, st.amplitudes.data()).excitation;
}

Drive make_drive(const MemoryModel& m, std::vector<ControlEnvelope> pulses, std::function<cplx(double)> input) {
    const double L = m.length;
    const bool counter = m.geometry == Geometry::CounterPropagating;
    Drive d;
    d.input = std::move(input);
    d.control = [pulses = std::move(pulses), L, counter](double z, double t) {
        const double delay = counter ? (L - 2.0 * z) / phys::c : 0.0;
        double acc = 0.0;
        for (const auto& p : pulses) acc += p(t - delay);
        return acc;
    };
    return d;
}

WindowResult integrate_window(const MemoryModel& m, EnsembleState& state, double t1, const Drive& drive,
                              double peak_rabi, Execution exec) {
    const double t0 = state.time;
    if (state.amplitudes.size() != m.state_size()) throw DomainError("ensemble state does not match the model layout");
    if (!(t1 >= t0)) throw DomainError("integration window must not run backwards");
    WindowResult r;
    r.stability_number = m.max_rate(peak_rabi) * m.dt;
    if (r.stability_number > kStabilityBound) {
        std::ostringstream os;
        os << "time step violates the RK4 stability bound: max rate * dt = " << r.stability_number << " > "
           << kStabilityBound << " (dt = " << m.dt << " s, peak Rabi = " << peak_rabi << " rad/s)";
        throw InstabilityError(os.str());
    }
    const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / m.dt - 1e-9)));
    const double h = (t1 - t0) / steps;
    r.steps = steps;

    const std::size_t n = m.state_size();
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n), field(m.nz), source(m.nz);
    std::vector<double> ctrl0(m.nz), ctrl_mid(m.nz), ctrl1(m.nz);
    auto fill_control = [&](double t, std::vector<double>& out) {
        for (int j = 0; j < m.nz; ++j) out[j] = drive.control(m.z_at(j), t);
    };
    auto rhs = [&](const cplx* y, const std::vector<double>& ctrl, cplx in, cplx* dy) {
        if (exec == Execution::Parallel) rhs_parallel(m, y, ctrl.data(), in, dy, field.data(), source.data());
        else rhs_serial(m, y, ctrl.data(), in, dy, field.data(), source.data());
    };

    cplx* y = state.amplitudes.data();
    const Norms n0 = norms(m, y);
    const double initial = n0.excitation;
    double prev_rate = n0.decay_rate;
    double prev_in = 0.0, prev_out = 0.0;
    fill_control(t0, ctrl0);
    r.time.reserve(steps + 1);

    for (int i = 0; i <= steps; ++i) {
        const double t = t0 + i * h;
        const cplx in0 = drive.input(t);
        rhs(y, ctrl0, in0, k1.data());  // also leaves A(z, t) in `field`
        const double in_sq = std::norm(in0), out_sq = std::norm(field[m.nz - 1]);
        const Norms nn = norms(m, y);
        r.time.push_back(t);
        r.input.push_back(in0);
        r.output.push_back(field[m.nz - 1]);
        r.spin_norm.push_back(nn.spin);
        r.excitation.push_back(nn.excitation);
        if (i > 0) {
            r.input_energy += 0.5 * h * (prev_in + in_sq);
            r.output_energy += 0.5 * h * (prev_out + out_sq);
            r.decayed += 0.5 * h * (prev_rate + nn.decay_rate);
        }
        prev_in = in_sq, prev_out = out_sq, prev_rate = nn.decay_rate;
        if (!std::isfinite(nn.excitation) || nn.excitation > 2.0 * (initial + r.input_energy) + 1e-12) {
            std::ostringstream os;
            os << "norm growth beyond the linear bound at step " << i << " (t = " << t << " s): excitation "
               << nn.excitation << " vs supplied " << initial + r.input_energy << ", max rate * dt = "
               << r.stability_number;
            throw InstabilityError(os.str());
        }
        if (i == steps) break;

        fill_control(t + 0.5 * h, ctrl_mid);
        fill_control(t + h, ctrl1);
        const cplx in_mid = drive.input(t + 0.5 * h), in1 = drive.input(t + h);
        for (std::size_t q = 0; q < n; ++q) tmp[q] = y[q] + 0.5 * h * k1[q];
        rhs(tmp.data(), ctrl_mid, in_mid, k2.data());
        for (std::size_t q = 0; q < n; ++q) tmp[q] = y[q] + 0.5 * h * k2[q];
        rhs(tmp.data(), ctrl_mid, in_mid, k3.data());
        for (std::size_t q = 0; q < n; ++q) tmp[q] = y[q] + h * k3[q];
        rhs(tmp.data(), ctrl1, in1, k4.data());
        for (std::size_t q = 0; q < n; ++q) y[q] += (h / 6.0) * (k1[q] + 2.0 * (k2[q] + k3[q]) + k4[q]);
        std::swap(ctrl0, ctrl1);
    }
    state.time = t1;
    return r;
}

}  // namespace orca::mbsolver
