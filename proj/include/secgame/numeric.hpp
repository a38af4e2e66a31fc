#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace secgame {

using Vec = std::vector<double>;

// Thrown when an iterative solve hits its cap; carries the last residual.
struct SolverFailure : std::runtime_error {
    double residual;
    SolverFailure(const std::string& msg, double res)
        : std::runtime_error(msg + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline bool all_finite(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline void check_profile(const Vec& x, std::size_t n, const char* what = "investment profile") {
    require(x.size() == n, std::string(what) + ": dimension mismatch");
    for (double xi : x)
        require(std::isfinite(xi) && xi >= 0.0, std::string(what) + ": entries must be finite and >= 0");
}

// log(sum_i exp(v_i)), max-shifted
inline double log_sum_exp(const Vec& v) {
    double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double vi : v) s += std::exp(vi - m);
    return m + std::log(s);
}

// Bisection on a bracketing interval. Caller guarantees f(lo) and f(hi)
// have opposite signs (weakly). Tolerance is on x.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-13, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw SolverFailure("bisect: endpoints do not bracket a root", std::min(std::abs(flo), std::abs(fhi)));
    for (int it = 0; it < max_iter && hi - lo > xtol * std::max(1.0, std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Grows hi from `start` until f(hi) <= 0 (f eventually negative), then bisects.
inline double bisect_decreasing(const std::function<double(double)>& f, double lo = 0.0,
                                double start = 1.0, double xtol = 1e-13) {
    double hi = start;
    int guard = 0;
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 500) throw SolverFailure("bisect_decreasing: no sign change found", f(hi));
    }
    return bisect(f, lo, hi, xtol);
}

// Dense solve by Gaussian elimination with partial pivoting; sizes here are tiny.
inline Vec solve_linear(std::vector<Vec> a, Vec b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300)
            throw SolverFailure("solve_linear: singular system", std::abs(a[piv][col]));
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double m = a[r][col] / a[col][col];
            if (m == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[r][k] -= m * a[col][k];
            b[r] -= m * b[col];
        }
    }
    Vec x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace secgame
