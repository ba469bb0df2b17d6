#include <cmath>

#include "sfspline/simd/ops.hpp"

namespace sfs::simd {
namespace {

inline double k2_of(double x) {
    const double b = x - 0.5;
    return 0.5 * b * b - 1.0 / 24.0;
}

inline double k4_of(double h) {
    // h is a distance in [0,1]
    const double b = h - 0.5;
    const double b2 = b * b;
    return (b2 * b2 - 0.5 * b2 + 7.0 / 240.0) / 24.0;
}

void cubic_rk_col_scalar(const double* x, std::size_t n, double t, double* out) {
    const double k2t = k2_of(t);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = k2_of(x[i]) * k2t - k4_of(std::fabs(x[i] - t));
}

void linear_rk_col_scalar(const double* x, std::size_t n, double t, double* out) {
    const double k1t = t - 0.5;
    for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - 0.5) * k1t;
}

void ssanova_rk_col_scalar(const double* const* cols, std::size_t d,
                           std::size_t n, const double* t, double* out) {
    // Pair sums via the square-of-sums identity:
    //   sum_{j<k} u_j u_k = ((sum u)^2 - sum u^2)/2     with u = Kc + Kl
    // so the column costs O(d) per row instead of O(d^2).
    for (std::size_t i = 0; i < n; ++i) {
        double skc = 0.0, su = 0.0, suu = 0.0, sv = 0.0, svv = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double xj = cols[j][i];
            const double tj = t[j];
            const double kc = k2_of(xj) * k2_of(tj) - k4_of(std::fabs(xj - tj));
            const double kl = (xj - 0.5) * (tj - 0.5);
            const double u = kc + kl;
            skc += kc;
            su += u;
            suu += u * u;
            sv += kl;
            svv += kl * kl;
        }
        out[i] = skc + 0.5 * ((su * su - suu) - (sv * sv - svv));
    }
}

void tps_rk_col_scalar(const double* x0, const double* x1, std::size_t n,
                       double t0, double t1, double* out) {
    constexpr double scale = 1.0 / (16.0 * 3.14159265358979323846);
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x0[i] - t0;
        const double dy = x1[i] - t1;
        const double r2 = dx * dx + dy * dy;
        // r^2 ln(r) / (8 pi) written as r^2 ln(r^2) / (16 pi)
        out[i] = r2 > 0.0 ? scale * r2 * std::log(r2) : 0.0;
    }
}

void count_open_closed_scalar(const double* const* cols, std::size_t d,
                              std::size_t n, const double* corner,
                              std::size_t* open, std::size_t* closed) {
    std::size_t op = 0, cl = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool in_open = true, in_closed = true;
        for (std::size_t j = 0; j < d; ++j) {
            const double v = cols[j][i];
            in_open = in_open && (v < corner[j]);
            in_closed = in_closed && (v <= corner[j]);
        }
        op += in_open;
        cl += in_closed;
    }
    *open = op;
    *closed = cl;
}

void sq_dist_col_scalar(const double* const* cols, std::size_t d, std::size_t n,
                        const double* query, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = cols[j][i] - query[j];
            acc += diff * diff;
        }
        out[i] = acc;
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops = {
        cubic_rk_col_scalar,   linear_rk_col_scalar, ssanova_rk_col_scalar,
        tps_rk_col_scalar,     count_open_closed_scalar,
        sq_dist_col_scalar,    "scalar",
    };
    return ops;
}

}  // namespace sfs::simd
