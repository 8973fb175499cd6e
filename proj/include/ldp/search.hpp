#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace ldp::detail {

inline constexpr double kGoldenRatio = 1.6180339887498948482;

// Maximize a unimodal f on [a, b] by golden-section search. Returns (argmax,
// max). tol is an absolute tolerance on the argument.
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol = 1e-12) {
    if (b < a) std::swap(a, b);
    double c = b - (b - a) / kGoldenRatio;
    double d = a + (b - a) / kGoldenRatio;
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 400 && (b - a) > tol; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) / kGoldenRatio;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) / kGoldenRatio;
            fd = f(d);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

template <typename F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol = 1e-12) {
    auto [x, v] = golden_max([&](double t) { return -f(t); }, a, b, tol);
    return {x, -v};
}

// Scan [a, b] on n+1 equispaced points, golden-refine around every local
// maximum bracket. Robust sup for smooth but not provably unimodal pieces.
template <typename F>
double scan_max(F&& f, double a, double b, int n = 64, double tol = 1e-12) {
    if (b <= a) return f(a);
    std::vector<double> vals(static_cast<std::size_t>(n) + 1);
    const double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) vals[static_cast<std::size_t>(i)] = f(a + h * i);
    double best = vals[0];
    for (int i = 1; i <= n; ++i) best = std::max(best, vals[static_cast<std::size_t>(i)]);
    for (int i = 1; i < n; ++i) {
        if (vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1]) {
            best = std::max(best, golden_max(f, a + h * (i - 1), a + h * (i + 1), tol).second);
        }
    }
    return best;
}

// Nodes/weights of n-point Gauss-Legendre quadrature on [-1, 1], computed by
// Newton iteration on the Legendre recurrence and cached per order.
struct GaussLegendre {
    std::vector<double> nodes, weights;

    explicit GaussLegendre(int n) : nodes(n), weights(n) {
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pd = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pd = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / pd;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pd * pd);
        }
    }

    static const GaussLegendre& order(int n) {
        static const GaussLegendre g16(16), g32(32), g64(64), g128(128);
        switch (n) {
            case 16: return g16;
            case 32: return g32;
            case 64: return g64;
            default: return g128;
        }
    }

    template <typename F>
    double integrate(F&& f, double a, double b) const {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(mid + half * nodes[i]);
        return s * half;
    }
};

// Gauss-Legendre on [a, b], doubling the order from 16 until two successive
// values agree to atol (or the order cap is reached).
template <typename F>
double adaptive_gauss(F&& f, double a, double b, double atol = 1e-9) {
    if (b <= a) return 0.0;
    double prev = GaussLegendre::order(16).integrate(f, a, b);
    for (int n : {32, 64, 128}) {
        const double cur = GaussLegendre::order(n).integrate(f, a, b);
        if (std::abs(cur - prev) < atol) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace ldp::detail
