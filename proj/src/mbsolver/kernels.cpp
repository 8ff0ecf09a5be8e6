#include "orca/mbsolver/integrator.hpp"

namespace orca::mbsolver {

namespace {

inline void source_at(const MemoryModel& m, const cplx* y, int j, cplx* source) {
    cplx acc = 0.0;
    for (int v = 0; v < m.nv; ++v) {
        const cplx* p = y + m.p_index(j, v, 0);
        cplx pv = 0.0;
        for (int e = 0; e < m.ne; ++e) pv += m.g[e] * p[e];
        acc += m.weight[v] * pv;
    }
    source[j] = acc;
}

// Cumulative fourth-order (cubic interpolation) integral of the source; one-sided at the two ends.
inline void march_field(const MemoryModel& m, cplx input, const cplx* source, cplx* field) {
    const cplx k(0.0, m.beta * m.dz / 24.0);
    const int n = m.nz;
    const cplx* s = source;
    field[0] = input;
    field[1] = input + k * (9.0 * s[0] + 19.0 * s[1] - 5.0 * s[2] + s[3]);
    for (int j = 2; j < n - 1; ++j) field[j] = field[j - 1] + k * (13.0 * (s[j - 1] + s[j]) - s[j - 2] - s[j + 1]);
    field[n - 1] = field[n - 2] + k * (s[n - 4] - 5.0 * s[n - 3] + 19.0 * s[n - 2] + 9.0 * s[n - 1]);
}

inline void derivative_at(const MemoryModel& m, const cplx* y, const double* control, const cplx* field, int jv,
                          cplx* dy) {
    const int j = jv / m.nv;
    const int v = jv % m.nv;
    const std::size_t base = m.p_index(j, v, 0);
    const cplx* p = y + base;
    const cplx* s = p + m.ne;
    cplx* dp = dy + base;
    cplx* ds = dp + m.ne;
    const cplx ih(0.0, 0.5 * control[j]);
    const cplx iA = cplx(0.0, 1.0) * field[j];
    const cplx* rp = m.rate_p.data() + static_cast<std::size_t>(v) * m.ne;
    const cplx* rs = m.rate_s.data() + static_cast<std::size_t>(v) * m.ns;
    for (int e = 0; e < m.ne; ++e) {
        cplx coupling = 0.0;
        const double* ce = m.c.data() + static_cast<std::size_t>(e) * m.ns;
        for (int q = 0; q < m.ns; ++q) coupling += ce[q] * s[q];
        dp[e] = -rp[e] * p[e] + m.g[e] * iA + ih * coupling;
    }
    for (int q = 0; q < m.ns; ++q) {
        cplx coupling = 0.0;
        for (int e = 0; e < m.ne; ++e) coupling += m.c[static_cast<std::size_t>(e) * m.ns + q] * p[e];
        ds[q] = -rs[q] * s[q] + ih * coupling;
    }
}

}  // namespace

void rhs_serial(const MemoryModel& m, const cplx* y, const double* control, cplx input, cplx* dy, cplx* field,
                cplx* source) {
    for (int j = 0; j < m.nz; ++j) source_at(m, y, j, source);
    march_field(m, input, source, field);
    const int n = m.nz * m.nv;
    for (int jv = 0; jv < n; ++jv) derivative_at(m, y, control, field, jv, dy);
}

void rhs_parallel(const MemoryModel& m, const cplx* y, const double* control, cplx input, cplx* dy, cplx* field,
                  cplx* source) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < m.nz; ++j) source_at(m, y, j, source);
    march_field(m, input, source, field);
    const int n = m.nz * m.nv;
#pragma omp parallel for schedule(static)
    for (int jv = 0; jv < n; ++jv) derivative_at(m, y, control, field, jv, dy);
}

}  // namespace orca::mbsolver
