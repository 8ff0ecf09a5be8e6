#include "orca/photonstats/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "orca/errors.hpp"

namespace orca::photonstats {

double ClickProbabilities::g11() const {
    if (p_i <= 0 || p_s1 + p_s2 <= 0) throw UndefinedResultError("oracle g11: zero singles probability");
    return (p_s1i + p_s2i) / ((p_s1 + p_s2) * p_i);
}

double ClickProbabilities::g2h() const {
    if (p_s1i <= 0 || p_s2i <= 0) throw UndefinedResultError("oracle g2h: zero coincidence probability");
    return p_trip * p_i / (p_s1i * p_s2i);
}

namespace {

double acceptance(double jitter_ps, std::int64_t width_ps) {
    if (jitter_ps <= 0) return 1.0;
    return std::erf(static_cast<double>(width_ps) / (2.0 * std::sqrt(2.0) * jitter_ps));
}

// Binomial(n, p) pmf by the ratio recursion.
std::vector<double> binomial_pmf(std::size_t n, double p) {
    std::vector<double> out(n + 1, 0.0);
    if (p <= 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (p >= 1.0) {
        out[n] = 1.0;
        return out;
    }
    const double odds = p / (1.0 - p);
    out[0] = std::exp(static_cast<double>(n) * std::log1p(-p));
    for (std::size_t k = 0; k < n; ++k) out[k + 1] = out[k] * static_cast<double>(n - k) / static_cast<double>(k + 1) * odds;
    return out;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// Photon number left after independent transmission a of each photon of a pulse with law pn.
std::vector<double> thinned(const std::vector<double>& pn, double a) {
    std::vector<double> out(pn.size(), 0.0);
    for (std::size_t n = 0; n < pn.size(); ++n) {
        const auto b = binomial_pmf(n, a);
        for (std::size_t m = 0; m <= n; ++m) out[m] += pn[n] * b[m];
    }
    return out;
}

// Noise photon law truncated where the remaining tail drops below 1e-18; the tail is returned in `tail`.
std::vector<double> noise_pmf(double mean, NoiseKind kind, double& tail) {
    std::vector<double> out;
    if (mean <= 0.0) {
        tail = 0.0;
        return {1.0};
    }
    double term = kind == NoiseKind::Poisson ? std::exp(-mean) : 1.0 / (1.0 + mean);
    const double x = mean / (1.0 + mean);
    double sum = 0.0;
    for (std::size_t k = 0; k < 100000; ++k) {
        out.push_back(term);
        sum += term;
        if (1.0 - sum < 1e-18 || (k > mean && term < 1e-300)) break;
        term *= kind == NoiseKind::Poisson ? mean / static_cast<double>(k + 1) : x;
    }
    tail = std::max(0.0, 1.0 - sum);
    return out;
}

// 1 - (1 - h)^n * exp(log_dark) without cancellation.
double click(std::size_t n, double h, double log_dark) {
    const double e = (n == 0 || h <= 0.0) ? log_dark : static_cast<double>(n) * std::log1p(-h) + log_dark;
    return -std::expm1(e);
}

struct GateLight {
    double b = 0;                  // idler detection per pair, heralding pulse
    double h1 = 0, h2 = 0;         // per photon at the splitter -> click on s1 / s2 (acceptance included)
    double a0 = 0;                 // heralding pulse: per signal photon, reaching the splitter in this gate
    std::vector<double> a_other;   // other pulses whose route lands in this gate
    double noise = 0;              // mean noise photons at the splitter
    NoiseKind noise_kind = NoiseKind::Poisson;
    std::array<double, 3> log_dark{};  // log P(no dark click) per detector
};

GateLight gate_light(const PairSourceModel& s, const MemoryChannelModel& m, const GateSpec& g, Configuration c,
                     std::int64_t d) {
    validate(s);
    validate(m);
    validate(g);
    if (d < 0) throw ConfigError("oracle: slot delay must be >= 0");
    GateLight L;
    const Gate gi = g.idler_gate();
    const Gate gs = g.signal_gate(d);
    const double acc_i = acceptance(s.jitter_ps, gi.width_ps);
    const double acc_s = acceptance(s.jitter_ps, gs.width_ps);
    L.b = s.eta_i * s.detector_efficiency[0] * acc_i;
    L.h1 = 0.5 * s.detector_efficiency[1] * acc_s;
    L.h2 = 0.5 * s.detector_efficiency[2] * acc_s;
    for (const auto& r : signal_routes(s, m, c)) {
        if (r.delay_ps == d) L.a0 += r.probability;
        else if ((r.delay_ps - d) % kPulsePeriodPs == 0) L.a_other.push_back(r.probability);
    }
    if (readout_on(c) && d % kPulsePeriodPs == g.read_out_offset_ps) {
        L.noise = m.added_noise * s.eta_s_post;
        L.noise_kind = m.noise_kind;
    }
    L.log_dark[0] = -s.dark_rate_hz[0] * 1e-12 * static_cast<double>(gi.width_ps);
    L.log_dark[1] = -s.dark_rate_hz[1] * 1e-12 * static_cast<double>(gs.width_ps);
    L.log_dark[2] = -s.dark_rate_hz[2] * 1e-12 * static_cast<double>(gs.width_ps);
    return L;
}

}  // namespace

ClickProbabilities exact_click_probabilities(const PairSourceModel& source, const MemoryChannelModel& memory,
                                             const GateSpec& gates, Configuration config, std::int64_t slot_delay_ps,
                                             double tolerance) {
    const GateLight L = gate_light(source, memory, gates, config, slot_delay_ps);
    ClickProbabilities out;
    out.truncation_error = thermal_truncation_error(source.mu, source.n_max);
    if (out.truncation_error > tolerance)
        throw NumericalError("oracle: thermal truncation error " + std::to_string(out.truncation_error) +
                             " above tolerance; increase n_max");
    const auto pn = thermal_distribution(source.mu, source.n_max);

    // Photons reaching the splitter in this gate from everything except the heralding pulse.
    double noise_tail = 0.0;
    std::vector<double> other = noise_pmf(L.noise, L.noise_kind, noise_tail);
    for (const double a : L.a_other) other = convolve(other, thinned(pn, a));
    out.truncation_error += noise_tail;

    // Click probabilities given N photons at the splitter, summed as positive terms only.
    const double h2_rest = L.h1 < 1.0 ? L.h2 / (1.0 - L.h1) : 0.0;
    const auto both = [&](std::size_t N) {
        const auto k1 = binomial_pmf(N, L.h1);
        double p = 0.0;
        for (std::size_t k = 0; k <= N; ++k) {
            const double q1 = k > 0 ? 1.0 : -std::expm1(L.log_dark[1]);
            p += k1[k] * q1 * click(N - k, h2_rest, L.log_dark[2]);
        }
        return p;
    };

    for (std::size_t n = 0; n < pn.size(); ++n) {
        const double pi_n = click(n, L.b, L.log_dark[0]);
        const auto R = convolve(binomial_pmf(n, L.a0), other);
        double s1 = 0.0, s2 = 0.0, s12 = 0.0;
        for (std::size_t N = 0; N < R.size(); ++N) {
            s1 += R[N] * click(N, L.h1, L.log_dark[1]);
            s2 += R[N] * click(N, L.h2, L.log_dark[2]);
            s12 += R[N] * both(N);
        }
        out.p_i += pn[n] * pi_n;
        out.p_s1 += pn[n] * s1;
        out.p_s2 += pn[n] * s2;
        out.p_s1i += pn[n] * pi_n * s1;
        out.p_s2i += pn[n] * pi_n * s2;
        out.p_trip += pn[n] * pi_n * s12;
    }
    return out;
}

HeraldedMoments heralded_moments(const PairSourceModel& source, const MemoryChannelModel& memory, const GateSpec& gates,
                                 Configuration config, std::int64_t slot_delay_ps) {
    const GateLight L = gate_light(source, memory, gates, config, slot_delay_ps);
    const auto pn = thermal_distribution(source.mu, source.n_max);
    const double a = L.a0 * (L.h1 + L.h2);
    double ei = 0, eis = 0, eiss = 0, es = 0;
    for (std::size_t n = 0; n < pn.size(); ++n) {
        const double dn = static_cast<double>(n);
        const double herald = 1.0 - std::pow(1.0 - L.b, dn);
        ei += pn[n] * herald;
        eis += pn[n] * herald * a * dn;
        eiss += pn[n] * herald * a * a * dn * (dn - 1.0);
        es += pn[n] * a * dn;
    }
    const double nu = L.noise * (L.h1 + L.h2);
    const double nn = (L.noise_kind == NoiseKind::Poisson ? 1.0 : 2.0) * nu * nu;
    const double is = eis + ei * nu;
    const double iss = eiss + 2.0 * eis * nu + ei * nn;
    if (ei <= 0 || is <= 0) throw UndefinedResultError("heralded moments: no heralded signal light in this gate");
    HeraldedMoments h;
    h.g11 = is / (ei * (es + nu));
    // The 50/50 split factors cancel between <I S1 S2> and <I S1><I S2>.
    h.g2h = ei * iss / (is * is);
    h.mean_signal = is / ei;
    return h;
}

}  // namespace orca::photonstats
