#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ldp/coefficients.hpp"
#include "ldp/extended.hpp"
#include "ldp/legendre.hpp"
#include "ldp/path.hpp"
#include "ldp/search.hpp"

namespace ldp {

enum class RateKind { RandomWalk, Quadratic, Diffusion, Cev };

// Selects the action functional evaluated on paths: Cramer cost of the slope
// for random walks, the quadratic (moderate-deviation / Wiener) cost, the
// Freidlin-Wentzell diffusion cost, or the CEV cost stopped at absorption.
class RateModel {
  public:
    static RateModel random_walk(MgfModel model) {
        RateModel m;
        m.kind_ = RateKind::RandomWalk;
        m.dev_.emplace(std::move(model));
        return m;
    }

    static RateModel quadratic(double sigma2) {
        if (!(sigma2 > 0.0)) throw std::invalid_argument("RateModel: sigma2 must be > 0");
        RateModel m;
        m.kind_ = RateKind::Quadratic;
        m.sigma2_ = sigma2;
        return m;
    }

    static RateModel diffusion(Coefficient a, Coefficient sigma, double x0, double lambda_bound,
                               double check_halfwidth = 20.0) {
        if (!(lambda_bound >= 1.0)) throw std::invalid_argument("RateModel: lambda_bound must be >= 1");
        // Boundedness and ellipticity are sampled over the working range;
        // violations are construction errors.
        for (int i = 0; i <= 1000; ++i) {
            const double x = x0 - check_halfwidth + 2.0 * check_halfwidth * i / 1000.0;
            const double s2 = sigma(x) * sigma(x);
            if (!(s2 >= 1.0 / lambda_bound - 1e-12 && s2 <= lambda_bound + 1e-12))
                throw std::invalid_argument("RateModel: sigma^2 violates [1/lambda, lambda] bounds");
            if (!(std::abs(a(x)) <= lambda_bound + 1e-12))
                throw std::invalid_argument("RateModel: |a| violates lambda bound");
        }
        RateModel m;
        m.kind_ = RateKind::Diffusion;
        m.a_ = std::move(a);
        m.sigma_ = std::move(sigma);
        m.x0_ = x0;
        m.lambda_bound_ = lambda_bound;
        return m;
    }

    static RateModel cev(double mu, double sigma, double gamma) {
        if (sigma == 0.0) throw std::invalid_argument("RateModel: cev sigma must be nonzero");
        if (!(gamma >= 0.5 && gamma < 1.0))
            throw std::invalid_argument("RateModel: gamma must lie in [1/2, 1)");
        RateModel m;
        m.kind_ = RateKind::Cev;
        m.mu_ = mu;
        m.cev_sigma_ = sigma;
        m.gamma_ = gamma;
        return m;
    }

    RateKind kind() const { return kind_; }
    const DeviationFunction& deviation() const { return *dev_; }
    double sigma2() const { return sigma2_; }
    const Coefficient& drift() const { return a_; }
    const Coefficient& dispersion() const { return sigma_; }
    double x0() const { return x0_; }
    double lambda_bound() const { return lambda_bound_; }
    double mu() const { return mu_; }
    double cev_sigma() const { return cev_sigma_; }
    double gamma() const { return gamma_; }

    double origin() const {
        switch (kind_) {
            case RateKind::RandomWalk:
            case RateKind::Quadratic: return 0.0;
            case RateKind::Diffusion: return x0_;
            case RateKind::Cev: return 1.0;
        }
        return 0.0;
    }

  private:
    RateKind kind_ = RateKind::Quadratic;
    std::optional<DeviationFunction> dev_;
    double sigma2_ = 1.0;
    Coefficient a_, sigma_;
    double x0_ = 0.0, lambda_bound_ = 1.0;
    double mu_ = 0.0, cev_sigma_ = 1.0, gamma_ = 0.5;
};

struct RateValue {
    ExtReal total;
    std::vector<std::pair<double, ExtReal>> horizon_profile;
    double tail_unit_cost = 0.0;  // residual per-unit-time cost behind a divergent tail
    // CEV absorption diagnostics: value truncated before the singular approach
    // to zero, the fitted power of the integrand there, and the extrapolated
    // remainder.
    bool cev_singular = false;
    double cev_truncated = 0.0;
    double cev_fit_exponent = 0.0;
    ExtReal cev_extrapolated_tail;

    static RateValue divergent() {
        RateValue r;
        r.total = ExtReal::infinity();
        return r;
    }
};

// First zero of f: exact per-segment linear roots, analytic tail analysis.
inline ExtReal theta_absorption(const Path& f) {
    const auto& ks = f.knots;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i].v == 0.0) return ExtReal::finite(ks[i].t);
        if (i + 1 < ks.size() && ks[i].v * ks[i + 1].v < 0.0) {
            const double t =
                ks[i].t + (ks[i + 1].t - ks[i].t) * ks[i].v / (ks[i].v - ks[i + 1].v);
            return ExtReal::finite(t);
        }
    }
    const double c = ks.back().v;
    switch (f.tail.kind) {
        case TailKind::Constant: break;
        case TailKind::LinearSlope:
            if (f.tail.param != 0.0 && c * f.tail.param < 0.0)
                return ExtReal::finite(ks.back().t - c / f.tail.param);
            break;
        case TailKind::ExpGrowth: break;  // c e^{rho s} with c != 0 never vanishes
    }
    return ExtReal::infinity();
}

// Cost per unit time of constant slope under a RandomWalk/Quadratic model.
inline ExtReal unit_slope_cost(const RateModel& m, double slope) {
    switch (m.kind()) {
        case RateKind::RandomWalk: return m.deviation().legendre(slope);
        case RateKind::Quadratic: return ExtReal::finite(slope * slope / (2.0 * m.sigma2()));
        default: throw std::invalid_argument("unit_slope_cost: convex-slope model required");
    }
}

inline double mean_slope(const RateModel& m) {
    switch (m.kind()) {
        case RateKind::RandomWalk: return m.deviation().mean();
        case RateKind::Quadratic: return 0.0;
        default: throw std::invalid_argument("mean_slope: convex-slope model required");
    }
}

namespace detail {

struct PathSegment {
    double a = 0.0, b = 0.0;
    double slope = 0.0;  // valid when !exp_tail
    bool exp_tail = false;
    double rho = 0.0;
};

inline std::vector<PathSegment> enumerate_segments(const Path& f, double T) {
    std::vector<PathSegment> segs;
    const auto& ks = f.knots;
    for (std::size_t i = 0; i + 1 < ks.size() && ks[i].t < T; ++i) {
        const double b = std::min(ks[i + 1].t, T);
        if (b <= ks[i].t) break;
        segs.push_back({ks[i].t, b, (ks[i + 1].v - ks[i].v) / (ks[i + 1].t - ks[i].t), false, 0.0});
    }
    const double L = ks.back().t;
    if (T > L) {
        PathSegment tail{L, T, 0.0, false, 0.0};
        switch (f.tail.kind) {
            case TailKind::Constant: break;
            case TailKind::LinearSlope: tail.slope = f.tail.param; break;
            case TailKind::ExpGrowth:
                if (f.tail.param != 0.0 && ks.back().v != 0.0) {
                    tail.exp_tail = true;
                    tail.rho = f.tail.param;
                }
                break;
        }
        segs.push_back(tail);
    }
    return segs;
}

// Pointwise action integrand of (value, derivative) under the model.
inline ExtReal integrand_at(const RateModel& m, double value, double deriv) {
    switch (m.kind()) {
        case RateKind::RandomWalk: return m.deviation().legendre(deriv);
        case RateKind::Quadratic: return ExtReal::finite(deriv * deriv / (2.0 * m.sigma2()));
        case RateKind::Diffusion: {
            const double s = m.dispersion()(value);
            const double d = deriv - m.drift()(value);
            return ExtReal::finite(d * d / (2.0 * s * s));
        }
        case RateKind::Cev: {
            const double d = deriv - m.mu() * value;
            const double den = 2.0 * m.cev_sigma() * m.cev_sigma() * std::pow(value, 2.0 * m.gamma());
            return ExtReal::finite(d * d / den);
        }
    }
    return ExtReal::finite(0.0);
}

// Quadrature of the action over one segment; detects divergent integrand
// nodes (random-walk slopes outside the attainable range).
inline ExtReal segment_cost(const RateModel& m, const Path& f, const PathSegment& s) {
    if (!s.exp_tail) {
        if (m.kind() == RateKind::RandomWalk) {
            const ExtReal c = m.deviation().legendre(s.slope);
            if (c.divergent) return c;
            return ExtReal::finite(c.val * (s.b - s.a));
        }
        if (m.kind() == RateKind::Quadratic)
            return ExtReal::finite(s.slope * s.slope / (2.0 * m.sigma2()) * (s.b - s.a));
    }
    bool bad = false;
    auto h = [&](double t) {
        const double v = eval_path(f, t);
        const double d = s.exp_tail ? s.rho * v : s.slope;
        const ExtReal c = integrand_at(m, v, d);
        if (c.divergent || !std::isfinite(c.val)) {
            bad = true;
            return 0.0;
        }
        return c.val;
    };
    const double val = ldp::detail::adaptive_gauss(h, s.a, s.b, 1e-9);
    if (bad) return ExtReal::infinity();
    return ExtReal::finite(val);
}

// Closed-form CEV action of an affine segment f(t) = v_a + slope (t - a)
// running down to the absorption time theta, truncated eps before it, via the
// substitution u = f(t):
//   int (slope - mu u)^2 u^{-2 gamma} du / (2 sigma^2 |slope|).
inline double cev_singular_truncated(const RateModel& m, double v_a, double slope, double eps_u) {
    const double g2 = 2.0 * m.gamma();
    auto J = [&](double p, double u) {
        if (std::abs(p + 1.0) < 1e-14) return std::log(u);
        return std::pow(u, p + 1.0) / (p + 1.0);
    };
    auto G = [&](double u) {
        return slope * slope * J(-g2, u) - 2.0 * slope * m.mu() * J(1.0 - g2, u) +
               m.mu() * m.mu() * J(2.0 - g2, u);
    };
    const double den = 2.0 * m.cev_sigma() * m.cev_sigma() * std::abs(slope);
    return (G(v_a) - G(eps_u)) / den;
}

struct CevSingularResult {
    double truncated = 0.0;
    double fit_exponent = 0.0;
    ExtReal extrapolated;
};

// Last affine approach to zero: truncate eps before theta, fit the integrand
// to a power law on the last resolved window and extrapolate the remainder.
inline CevSingularResult cev_singular_segment(const RateModel& m, double v_a, double slope,
                                              double seg_len) {
    CevSingularResult out;
    const double eps_t = std::max(1e-300, 1e-6 * seg_len);
    const double u1 = std::abs(slope) * eps_t;        // f at theta - eps
    const double u2 = std::abs(slope) * 2.0 * eps_t;  // f at theta - 2 eps
    out.truncated = cev_singular_truncated(m, v_a, slope, u1);
    auto g = [&](double u) {
        const double d = slope - m.mu() * u;
        return d * d / (2.0 * m.cev_sigma() * m.cev_sigma() * std::pow(u, 2.0 * m.gamma()));
    };
    out.fit_exponent = std::log2(g(u2) / g(u1));  // integrand ~ C (theta - t)^p
    if (out.fit_exponent <= -1.0 + 1e-9) {
        out.extrapolated = ExtReal::infinity();
    } else {
        const double C = g(u1) / std::pow(eps_t, out.fit_exponent);
        out.extrapolated =
            ExtReal::finite(C * std::pow(eps_t, out.fit_exponent + 1.0) / (out.fit_exponent + 1.0));
    }
    return out;
}

inline bool matches_origin(const RateModel& m, const Path& f) {
    const double o = m.origin();
    return std::abs(f.knots.front().v - o) <= 1e-12 * std::max(1.0, std::abs(o));
}

}  // namespace detail

inline RateValue rate_finite_horizon(const RateModel& m, const Path& f, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("rate_finite_horizon: T must be > 0");
    if (!detail::matches_origin(m, f)) return RateValue::divergent();

    RateValue out;
    out.total = ExtReal::finite(0.0);

    double upper = T;
    ExtReal theta = ExtReal::infinity();
    if (m.kind() == RateKind::Cev) {
        theta = theta_absorption(f);
        if (theta.is_finite()) upper = std::min(T, theta.val);
    }

    for (const auto& s : detail::enumerate_segments(f, upper)) {
        if (out.total.divergent) break;
        const bool hits_zero = m.kind() == RateKind::Cev && theta.is_finite() &&
                               theta.val <= T && !s.exp_tail && s.b >= theta.val &&
                               eval_path(f, s.a) > 0.0 && s.slope != 0.0;
        if (hits_zero) {
            const auto sing =
                detail::cev_singular_segment(m, eval_path(f, s.a), s.slope, theta.val - s.a);
            out.cev_singular = true;
            out.cev_truncated = out.total.val + sing.truncated;
            out.cev_fit_exponent = sing.fit_exponent;
            out.cev_extrapolated_tail = sing.extrapolated;
            out.total += ExtReal::finite(sing.truncated);
            out.total += sing.extrapolated;
            break;
        }
        out.total += detail::segment_cost(m, f, s);
    }
    out.horizon_profile.push_back({T, out.total});
    return out;
}

// Continuation of f beyond T adding zero incremental rate: mean-slope tail
// for walks, g' = a(g) for diffusions, g' = mu g for CEV.
inline Path most_likely_extension(const RateModel& m, const Path& f, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("most_likely_extension: T must be > 0");
    Path base = project(f, T);
    switch (m.kind()) {
        case RateKind::RandomWalk: {
            const double s = m.deviation().mean();
            base.tail = (s == 0.0) ? Extension::constant() : Extension::linear(s);
            return base;
        }
        case RateKind::Quadratic:
            base.tail = Extension::constant();
            return base;
        case RateKind::Cev:
            base.tail = Extension::exp_growth(m.mu());
            return base;
        case RateKind::Diffusion: break;
    }

    // Integrate g' = a(g) into piecewise-linear knots up to 10 T. The step is
    // controlled by the chord's residual action so the appended piece costs
    // less than ~1e-8 per unit time.
    const auto& a = m.drift();
    const auto& sig = m.dispersion();
    std::vector<Knot> knots = base.knots;
    double t = T, y = knots.back().v;
    const double t_end = 10.0 * T;
    double h = std::min(1e-2, (t_end - T) / 16.0);
    auto rk4 = [&](double t0, double y0, double hh) {
        const double k1 = a(y0);
        const double k2 = a(y0 + 0.5 * hh * k1);
        const double k3 = a(y0 + 0.5 * hh * k2);
        const double k4 = a(y0 + hh * k3);
        (void)t0;
        return y0 + hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    int guard = 0;
    while (t < t_end && guard++ < 400000) {
        h = std::min(h, t_end - t);
        const double y_new = rk4(t, y, h);
        const double mid = 0.5 * (y + y_new);
        const double defect = (y_new - y) / h - a(mid);
        const double s2 = sig(mid) * sig(mid);
        const double cost_rate = defect * defect / (2.0 * s2);
        if (cost_rate > 1e-8 && h > 1e-7) {
            h *= 0.5;
            continue;
        }
        t += h;
        y = y_new;
        knots.push_back({t, y});
        if (cost_rate < 2.5e-9) h *= 1.5;
    }
    return Path(std::move(knots), Extension::constant());
}

namespace detail {

// Integral over [0, inf) of h(u) by doubling blocks; divergence is declared
// when the block increments fail to die out by u ~ 1e18.
inline ExtReal improper_integral(const std::function<double(double)>& h, bool& node_bad) {
    double total = 0.0, a = 0.0, b = 1.0;
    for (int k = 0; k < 62; ++k) {
        const double inc = ldp::detail::adaptive_gauss(h, a, b, 1e-12);
        if (node_bad) return ExtReal::infinity();
        total += inc;
        if (std::abs(inc) < 1e-12) return ExtReal::finite(total);
        a = b;
        b *= 2.0;
    }
    return ExtReal::infinity();
}

// Rate contributed by the declared tail of f beyond its last knot.
inline ExtReal tail_rate(const RateModel& m, const Path& f, double& unit_cost_out) {
    const double c = f.last_value();
    unit_cost_out = 0.0;

    auto diverge_with = [&](ExtReal q) {
        unit_cost_out = q.is_finite() ? q.val : std::numeric_limits<double>::infinity();
        return ExtReal::infinity();
    };

    const bool exp_tail = f.tail.kind == TailKind::ExpGrowth && f.tail.param != 0.0 && c != 0.0;
    const double lin_slope = f.tail.kind == TailKind::LinearSlope ? f.tail.param : 0.0;

    if (m.kind() == RateKind::RandomWalk || m.kind() == RateKind::Quadratic) {
        if (!exp_tail) {
            const ExtReal q = unit_slope_cost(m, lin_slope);
            if (q.divergent || q.val > 1e-14) return diverge_with(q);
            return ExtReal::finite(0.0);
        }
        const double rho = f.tail.param;
        if (rho > 0.0) return diverge_with(ExtReal::infinity());  // superlinear cost of growing slopes
        bool bad = false;
        auto h = [&](double u) {
            const ExtReal q = unit_slope_cost(m, c * rho * std::exp(rho * u));
            if (q.divergent) {
                bad = true;
                return 0.0;
            }
            return q.val;
        };
        return improper_integral(h, bad);
    }

    if (m.kind() == RateKind::Diffusion) {
        auto q_at = [&](double value, double deriv) {
            const double s = m.dispersion()(value);
            const double d = deriv - m.drift()(value);
            return d * d / (2.0 * s * s);
        };
        double far_value, far_deriv;
        if (exp_tail) {
            const double rho = f.tail.param;
            far_value = rho > 0.0 ? (c > 0.0 ? 1e9 : -1e9) : 0.0;
            far_deriv = rho * far_value;
        } else {
            far_value = lin_slope == 0.0 ? c : (lin_slope > 0.0 ? 1e9 : -1e9);
            far_deriv = lin_slope;
        }
        const double q_inf = q_at(far_value, far_deriv);
        if (q_inf > 1e-14) return diverge_with(ExtReal::finite(q_inf));
        if (!exp_tail && lin_slope == 0.0) return ExtReal::finite(0.0);
        bool bad = false;
        auto h = [&](double u) {
            double v, d;
            if (exp_tail) {
                v = c * std::exp(f.tail.param * u);
                d = f.tail.param * v;
            } else {
                v = c + lin_slope * u;
                d = lin_slope;
            }
            const double q = q_at(v, d);
            if (!std::isfinite(q)) {
                bad = true;
                return 0.0;
            }
            return q;
        };
        return improper_integral(h, bad);
    }

    // CEV beyond the last knot; absorption-crossing tails are handled by the
    // caller through theta.
    if (c == 0.0) return ExtReal::finite(0.0);
    if (exp_tail && f.tail.param == m.mu()) return ExtReal::finite(0.0);
    bool bad = false;
    auto h = [&](double u) {
        double v, d;
        if (exp_tail) {
            v = c * std::exp(f.tail.param * u);
            d = f.tail.param * v;
        } else {
            v = c + lin_slope * u;
            d = lin_slope;
        }
        if (!(v > 0.0)) {
            bad = true;
            return 0.0;
        }
        const ExtReal q = integrand_at(m, v, d);
        if (q.divergent || !std::isfinite(q.val)) {
            bad = true;
            return 0.0;
        }
        return q.val;
    };
    const ExtReal r = improper_integral(h, bad);
    if (r.divergent) {
        const ExtReal q0 = integrand_at(m, c, exp_tail ? f.tail.param * c : lin_slope);
        return diverge_with(q0);
    }
    return r;
}

}  // namespace detail

// I(f) as the monotone limit of finite-horizon rates: knot-range cost plus
// the analytic contribution of the declared tail.
inline RateValue rate_infinite(const RateModel& m, const Path& f) {
    if (!detail::matches_origin(m, f)) return RateValue::divergent();
    const double L = f.last_time();
    const double base_T = L > 0.0 ? L : 1.0;

    RateValue out;
    if (m.kind() == RateKind::Cev) {
        const ExtReal theta = theta_absorption(f);
        if (theta.is_finite()) {
            out = rate_finite_horizon(m, f, theta.val + 1.0);
        } else {
            out = L > 0.0 ? rate_finite_horizon(m, f, L)
                          : RateValue{ExtReal::finite(0.0), {}, 0.0, false, 0.0, 0.0, {}};
            double unit = 0.0;
            out.total += detail::tail_rate(m, f, unit);
            out.tail_unit_cost = unit;
        }
    } else {
        out = L > 0.0 ? rate_finite_horizon(m, f, L)
                      : RateValue{ExtReal::finite(0.0), {}, 0.0, false, 0.0, 0.0, {}};
        if (!out.total.divergent) {
            double unit = 0.0;
            out.total += detail::tail_rate(m, f, unit);
            out.tail_unit_cost = unit;
        }
    }

    out.horizon_profile.clear();
    for (double mult : {1.0, 2.0, 4.0, 8.0})
        out.horizon_profile.push_back({base_T * mult, rate_finite_horizon(m, f, base_T * mult).total});
    return out;
}

}  // namespace ldp
