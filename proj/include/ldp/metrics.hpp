#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ldp/extended.hpp"
#include "ldp/path.hpp"
#include "ldp/search.hpp"

namespace ldp {

// Weight in the denominator of a sup metric: 1 + t^{1+kappa} for the
// polynomial family, e^{mu t} (1+t)^{1/(1-gamma)} for the CEV family.
struct Weight {
    enum class Kind { Poly, CevExp };
    Kind kind = Kind::Poly;
    double kappa = 0.0;
    double mu = 0.0;
    double beta = 0.0;

    static Weight poly(double kappa) {
        if (!(kappa >= 0.0)) throw std::invalid_argument("Weight: kappa must be >= 0");
        Weight w;
        w.kind = Kind::Poly;
        w.kappa = kappa;
        return w;
    }
    static Weight cev(double mu, double gamma) {
        if (!(gamma >= 0.5 && gamma < 1.0))
            throw std::invalid_argument("Weight: gamma must lie in [1/2, 1)");
        Weight w;
        w.kind = Kind::CevExp;
        w.mu = mu;
        w.beta = 1.0 / (1.0 - gamma);
        return w;
    }

    double operator()(double t) const {
        if (kind == Kind::Poly) {
            if (kappa == 0.0) return 1.0 + t;
            return 1.0 + std::pow(t, 1.0 + kappa);
        }
        return std::exp(mu * t + beta * std::log1p(t));
    }
};

namespace detail {

// Difference of two declared tails, in the anchored form
//   delta(t) = P + Q t + sum_j sign_j amp_j exp(rate_j (t - anchor_j)).
struct TailTerm {
    double amp = 0.0;
    double rate = 0.0;
    double anchor = 0.0;
    double sign = 1.0;
};

struct TailForm {
    double P = 0.0, Q = 0.0;
    std::vector<TailTerm> terms;

    void add_path_tail(const Path& f, double sign) {
        const Knot& last = f.knots.back();
        switch (f.tail.kind) {
            case TailKind::Constant:
                P += sign * last.v;
                break;
            case TailKind::LinearSlope:
                P += sign * (last.v - f.tail.param * last.t);
                Q += sign * f.tail.param;
                break;
            case TailKind::ExpGrowth:
                if (f.tail.param == 0.0 || last.v == 0.0) {
                    P += sign * last.v;
                } else {
                    terms.push_back({last.v, f.tail.param, last.t, sign});
                }
                break;
        }
    }

    double delta(double t) const {
        double d = P + Q * t;
        for (const auto& tt : terms) d += tt.sign * tt.amp * std::exp(tt.rate * (t - tt.anchor));
        return d;
    }

    // |delta(t)| / w(t), overflow-guarded via factored exponents for the
    // exponential weight.
    double ratio(const Weight& w, double t) const {
        if (w.kind == Weight::Kind::Poly) return std::abs(delta(t)) / w(t);
        const double logw = w.mu * t + w.beta * std::log1p(t);
        double r = (P + Q * t) * std::exp(-logw);
        for (const auto& tt : terms)
            r += tt.sign * tt.amp * std::exp(tt.rate * (t - tt.anchor) - logw);
        return std::abs(r);
    }

    // Analytic value of lim_{t->inf} |delta|/w, or divergence.
    ExtReal limit(const Weight& w) const {
        if (w.kind == Weight::Kind::Poly) {
            for (const auto& tt : terms)
                if (tt.rate > 0.0 && tt.amp != 0.0) return ExtReal::infinity();
            if (w.kappa == 0.0) return ExtReal::finite(std::abs(Q));
            return ExtReal::finite(0.0);
        }
        for (const auto& tt : terms)
            if (tt.rate > w.mu && tt.amp != 0.0) return ExtReal::infinity();
        if (w.mu < 0.0 && (P != 0.0 || Q != 0.0)) return ExtReal::infinity();
        return ExtReal::finite(0.0);
    }
};

// Sup of |p + q t| / (1 + t^{1+kappa}) over [lo, inf). Exact: endpoints, the
// single interior stationary point per sign piece, and the t->inf limit.
inline double sup_linear_over_poly(double p, double q, double kappa, double lo) {
    const Weight w = Weight::poly(kappa);
    auto ratio = [&](double t) { return std::abs(p + q * t) / w(t); };
    double best = ratio(lo);
    best = std::max(best, kappa == 0.0 ? std::abs(q) : 0.0);  // limit
    std::vector<std::pair<double, double>> pieces;             // [a, b) with constant sign
    const double z = (q != 0.0) ? -p / q : -1.0;
    if (q != 0.0 && z > lo) {
        pieces.push_back({lo, z});
        pieces.push_back({z, -1.0});  // -1 marks unbounded
    } else {
        pieces.push_back({lo, -1.0});
    }
    if (kappa == 0.0) {
        // Ratio is monotone per sign piece; endpoints and limit already cover it.
        for (auto& [a, b] : pieces)
            if (b > 0.0) best = std::max(best, ratio(b));
        return best;
    }
    for (auto& [a, b] : pieces) {
        if (b > 0.0) {
            best = std::max(best, ldp::detail::golden_max(ratio, a, b).second);
            continue;
        }
        // Unbounded piece: bracket the stationary point. With s the sign of the
        // linear part, N(t) = s(q w(t) - (p + q t)(1+kappa) t^kappa) changes
        // sign + -> - at most once.
        const double s = (p + q * (a + 1.0)) >= 0.0 ? 1.0 : -1.0;
        if (s * q <= 0.0) {
            best = std::max(best, ratio(a));  // decreasing toward the limit
            continue;
        }
        auto N = [&](double t) {
            return s * (q * (1.0 + std::pow(t, 1.0 + kappa)) -
                        (p + q * t) * (1.0 + kappa) * std::pow(t, kappa));
        };
        double hi = std::max(a, 1.0);
        int guard = 0;
        while (N(hi) > 0.0 && guard++ < 200) hi *= 2.0;
        best = std::max(best, ldp::detail::golden_max(ratio, a, hi).second);
    }
    return best;
}

// Sup over the joint tail region [start, inf).
inline ExtReal sup_tail(const TailForm& form, const Weight& w, double start) {
    const ExtReal lim = form.limit(w);
    if (lim.divergent) return ExtReal::infinity();
    double best = lim.val;
    if (form.terms.empty() && w.kind == Weight::Kind::Poly) {
        best = std::max(best, sup_linear_over_poly(form.P, form.Q, w.kappa, start));
        if (!std::isfinite(best)) return ExtReal::infinity();
        return ExtReal::finite(best);
    }
    auto ratio = [&](double t) { return form.ratio(w, t); };
    const double scale = std::max(1.0, start);
    const int M = 256;
    std::vector<double> ts(M), vs(M);
    for (int i = 0; i < M; ++i) {
        const double u = static_cast<double>(i) / M;
        ts[i] = start + scale * u / (1.0 - u);
        vs[i] = ratio(ts[i]);
        best = std::max(best, vs[i]);
    }
    for (int i = 1; i + 1 < M; ++i) {
        if (vs[i] >= vs[i - 1] && vs[i] >= vs[i + 1])
            best = std::max(best, ldp::detail::golden_max(ratio, ts[i - 1], ts[i + 1]).second);
    }
    if (!std::isfinite(best)) return ExtReal::infinity();
    return ExtReal::finite(best);
}

// True if f is affine on the open interval (a, b): inside the knot range, or
// on a Constant / LinearSlope / degenerate-exponential tail.
inline bool affine_on(const Path& f, double b) {
    if (b <= f.last_time()) return true;
    if (f.tail.kind != TailKind::ExpGrowth) return true;
    return f.tail.param == 0.0 || f.last_value() == 0.0;
}

inline double sup_affine_piece(double a, double b, double da, double db, const Weight& w) {
    auto lin = [&](double t) { return da + (db - da) * (t - a) / (b - a); };
    auto ratio = [&](double t) { return std::abs(lin(t)) / w(t); };
    double best = std::max(std::abs(da) / w(a), std::abs(db) / w(b));
    if (w.kind == Weight::Kind::Poly && w.kappa == 0.0) return best;  // monotone per sign piece
    std::vector<std::pair<double, double>> pieces;
    if (da * db < 0.0) {
        const double z = a + (b - a) * da / (da - db);
        pieces.push_back({a, z});
        pieces.push_back({z, b});
    } else {
        pieces.push_back({a, b});
    }
    for (auto& [lo, hi] : pieces) {
        if (w.kind == Weight::Kind::Poly) {
            best = std::max(best, ldp::detail::golden_max(ratio, lo, hi).second);
        } else {
            best = std::max(best, ldp::detail::scan_max(ratio, lo, hi, 32));
        }
    }
    return best;
}

// sup_{t >= t_min} |f(t) - g(t)| / w(t).
inline ExtReal sup_weighted_ratio(const Path& f, const Path& g, const Weight& w,
                                  double t_min = 0.0) {
    const double joint = std::max(f.last_time(), g.last_time());
    double best = 0.0;
    if (t_min < joint) {
        std::vector<double> times;
        times.push_back(t_min);
        for (const auto& k : f.knots)
            if (k.t > t_min && k.t < joint) times.push_back(k.t);
        for (const auto& k : g.knots)
            if (k.t > t_min && k.t < joint) times.push_back(k.t);
        times.push_back(joint);
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        double prev_t = times.front();
        double prev_d = eval_path(f, prev_t) - eval_path(g, prev_t);
        for (std::size_t i = 1; i < times.size(); ++i) {
            const double b = times[i];
            const double db = eval_path(f, b) - eval_path(g, b);
            if (affine_on(f, b) && affine_on(g, b)) {
                best = std::max(best, sup_affine_piece(prev_t, b, prev_d, db, w));
            } else {
                auto ratio = [&](double t) {
                    return std::abs(eval_path(f, t) - eval_path(g, t)) / w(t);
                };
                best = std::max(best, ldp::detail::scan_max(ratio, prev_t, b, 64));
            }
            prev_t = b;
            prev_d = db;
        }
    }
    TailForm form;
    form.add_path_tail(f, +1.0);
    form.add_path_tail(g, -1.0);
    const ExtReal tail = sup_tail(form, w, std::max(joint, t_min));
    if (tail.divergent) return ExtReal::infinity();
    best = std::max(best, tail.val);
    if (!std::isfinite(best)) return ExtReal::infinity();
    return ExtReal::finite(best);
}

}  // namespace detail

// sup_{t >= 0} |f - g|(t) / (1 + t^{1+kappa}); divergent tails yield the
// tagged infinity.
inline ExtReal rho_weighted_sup(const Path& f, const Path& g, double kappa) {
    return detail::sup_weighted_ratio(f, g, Weight::poly(kappa));
}

// Same ratio restricted to t >= t_min (exponential-tightness experiments).
inline ExtReal weighted_sup_from(const Path& f, const Path& g, double kappa, double t_min) {
    return detail::sup_weighted_ratio(f, g, Weight::poly(kappa), t_min);
}

// sup_{t >= 0} |f - g|(t) / (e^{mu t} (1+t)^{1/(1-gamma)}).
inline ExtReal rho_cev(const Path& f, const Path& g, double mu, double gamma) {
    return detail::sup_weighted_ratio(f, g, Weight::cev(mu, gamma));
}

struct PuhalskiiResult {
    double value = 0.0;
    double truncation_bound = 0.0;
};

// Partial sum over k = 1..k_max of 2^{-k} min{sup_{[0,k]} |f - g|, 1}, with
// the 2^{-k_max} truncation bound reported alongside.
inline PuhalskiiResult rho_puhalskii(const Path& f, const Path& g, int k_max = 40) {
    if (k_max < 1) throw std::invalid_argument("rho_puhalskii: k_max must be >= 1");
    const double K = static_cast<double>(k_max);
    std::vector<double> times;
    times.push_back(0.0);
    for (int k = 1; k <= k_max; ++k) times.push_back(static_cast<double>(k));
    for (const auto& kn : f.knots)
        if (kn.t > 0.0 && kn.t < K) times.push_back(kn.t);
    for (const auto& kn : g.knots)
        if (kn.t > 0.0 && kn.t < K) times.push_back(kn.t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    // Candidate (t, |delta|) pairs; |delta| is convex on affine pieces so piece
    // endpoints suffice there, scans cover exponential pieces.
    std::vector<std::pair<double, double>> cand;
    double prev_t = 0.0;
    double prev_d = std::abs(eval_path(f, 0.0) - eval_path(g, 0.0));
    cand.push_back({prev_t, prev_d});
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double b = times[i];
        const double db = std::abs(eval_path(f, b) - eval_path(g, b));
        if (!(detail::affine_on(f, b) && detail::affine_on(g, b))) {
            auto absd = [&](double t) { return std::abs(eval_path(f, t) - eval_path(g, t)); };
            cand.push_back({b, ldp::detail::scan_max(absd, prev_t, b, 64)});
        }
        cand.push_back({b, db});
        prev_t = b;
    }

    double sum = 0.0, running = 0.0;
    std::size_t idx = 0;
    for (int k = 1; k <= k_max; ++k) {
        while (idx < cand.size() && cand[idx].first <= static_cast<double>(k)) {
            running = std::max(running, cand[idx].second);
            ++idx;
        }
        sum += std::ldexp(std::min(running, 1.0), -k);
    }
    return {sum, std::ldexp(1.0, -k_max)};
}

// Declarative metric choice, used by the file formats and the CLI.
struct MetricSpec {
    enum class Kind { WeightedSup, Puhalskii, CevWeighted };
    Kind kind = Kind::WeightedSup;
    double kappa = 0.0;
    int k_max = 40;
    double mu = 0.0;
    double gamma = 0.5;

    static MetricSpec weighted_sup(double kappa) {
        MetricSpec m;
        m.kind = Kind::WeightedSup;
        m.kappa = kappa;
        if (!(kappa >= 0.0)) throw std::invalid_argument("MetricSpec: kappa must be >= 0");
        return m;
    }
    static MetricSpec puhalskii(int k_max) {
        MetricSpec m;
        m.kind = Kind::Puhalskii;
        m.k_max = k_max;
        if (k_max < 1) throw std::invalid_argument("MetricSpec: k_max must be >= 1");
        return m;
    }
    static MetricSpec cev_weighted(double mu, double gamma) {
        MetricSpec m;
        m.kind = Kind::CevWeighted;
        m.mu = mu;
        m.gamma = gamma;
        if (!(gamma >= 0.5 && gamma < 1.0))
            throw std::invalid_argument("MetricSpec: gamma must lie in [1/2, 1)");
        return m;
    }
};

inline ExtReal eval_metric(const MetricSpec& m, const Path& f, const Path& g) {
    switch (m.kind) {
        case MetricSpec::Kind::WeightedSup: return rho_weighted_sup(f, g, m.kappa);
        case MetricSpec::Kind::Puhalskii: return ExtReal::finite(rho_puhalskii(f, g, m.k_max).value);
        case MetricSpec::Kind::CevWeighted: return rho_cev(f, g, m.mu, m.gamma);
    }
    return ExtReal::finite(0.0);
}

}  // namespace ldp
