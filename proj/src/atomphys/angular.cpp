#include "orca/atomphys/angular.hpp"

#include <algorithm>
#include <cmath>

#include "orca/errors.hpp"

namespace orca::atomphys {

namespace {

int twice(double j) {
    const double t = 2.0 * j;
    const long r = std::lround(t);
    if (std::abs(t - static_cast<double>(r)) > 1e-9 || r < 0)
        throw DomainError("angular momentum must be a non-negative half-integer");
    return static_cast<int>(r);
}

double log_fact(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// Triangle coefficient, arguments doubled. Returns false if the triad is not coupled.
bool log_delta(int a, int b, int c, double& out) {
    if (c > a + b || c < std::abs(a - b) || ((a + b + c) & 1)) return false;
    out = 0.5 * (log_fact((a + b - c) / 2) + log_fact((a - b + c) / 2) + log_fact((-a + b + c) / 2) -
                 log_fact((a + b + c) / 2 + 1));
    return true;
}

}  // namespace

double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6) {
    const int a = twice(j1), b = twice(j2), c = twice(j3), d = twice(j4), e = twice(j5), f = twice(j6);
    double t1, t2, t3, t4;
    if (!log_delta(a, b, c, t1) || !log_delta(a, e, f, t2) || !log_delta(d, b, f, t3) || !log_delta(d, e, c, t4))
        return 0.0;
    const double pre = t1 + t2 + t3 + t4;
    const int s1 = (a + b + c) / 2, s2 = (a + e + f) / 2, s3 = (d + b + f) / 2, s4 = (d + e + c) / 2;
    const int q1 = (a + b + d + e) / 2, q2 = (b + c + e + f) / 2, q3 = (a + c + d + f) / 2;
    const int tmin = std::max({s1, s2, s3, s4});
    const int tmax = std::min({q1, q2, q3});
    double sum = 0.0;
    for (int t = tmin; t <= tmax; ++t) {
        const double lg = log_fact(t + 1) - log_fact(t - s1) - log_fact(t - s2) - log_fact(t - s3) -
                          log_fact(t - s4) - log_fact(q1 - t) - log_fact(q2 - t) - log_fact(q3 - t);
        sum += ((t & 1) ? -1.0 : 1.0) * std::exp(lg + pre);
    }
    return sum;
}

double relative_line_strength(double F_lower, double F_upper, double J_lower, double J_upper, double I) {
    if (std::abs(F_lower - F_upper) > 1.0 + 1e-9) return 0.0;
    if (F_lower < 1e-9 && F_upper < 1e-9) return 0.0;
    if (F_lower < std::abs(J_lower - I) - 1e-9 || F_lower > J_lower + I + 1e-9 ||
        F_upper < std::abs(J_upper - I) - 1e-9 || F_upper > J_upper + I + 1e-9)
        throw DomainError("hyperfine F outside |J-I|..J+I");
    const double sixj = wigner_6j(J_lower, J_upper, 1.0, F_upper, F_lower, I);
    const long phase = std::lround(F_upper + J_lower + 1.0 + I);
    const double sign = (phase & 1) ? -1.0 : 1.0;
    return sign * std::sqrt((2 * F_upper + 1) * (2 * J_lower + 1)) * sixj;
}

double decay_branching(double F_upper, double F_lower, double J_upper, double J_lower, double I) {
    if (std::abs(F_lower - F_upper) > 1.0 + 1e-9) return 0.0;
    const double sixj = wigner_6j(J_upper, J_lower, 1.0, F_lower, F_upper, I);
    return (2 * F_lower + 1) * (2 * J_upper + 1) * sixj * sixj;
}

double relative_line_strength(const SpeciesRecord& s, Manifold lower, double F_lower, double F_upper) {
    if (lower == Manifold::Storage) throw DomainError("storage manifold has no upper partner");
    const auto& lo = s.manifold(lower);
    const auto& up = s.manifold(static_cast<Manifold>(static_cast<int>(lower) + 1));
    return relative_line_strength(F_lower, F_upper, lo.J, up.J, s.nuclear_spin);
}

}  // namespace orca::atomphys
