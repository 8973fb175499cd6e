#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ldp {

// Analytic continuation of a path beyond its last knot.
enum class TailKind { Constant, LinearSlope, ExpGrowth };

struct Extension {
    TailKind kind = TailKind::Constant;
    double param = 0.0;  // slope for LinearSlope, rate for ExpGrowth

    static Extension constant() { return {TailKind::Constant, 0.0}; }
    static Extension linear(double slope) { return {TailKind::LinearSlope, slope}; }
    static Extension exp_growth(double rate) { return {TailKind::ExpGrowth, rate}; }
};

struct Knot {
    double t = 0.0;
    double v = 0.0;
};

inline bool operator==(const Knot& a, const Knot& b) { return a.t == b.t && a.v == b.v; }

// Piecewise-linear function on [0, inf): linear interpolation between knots,
// declared analytic tail beyond the last knot. Immutable by convention.
struct Path {
    std::vector<Knot> knots;
    Extension tail;

    Path() : knots{{0.0, 0.0}}, tail(Extension::constant()) {}
    Path(std::vector<Knot> k, Extension e) : knots(std::move(k)), tail(e) { validate(); }

    void validate() const {
        if (knots.empty()) throw std::invalid_argument("Path: at least one knot required");
        if (knots.front().t != 0.0) throw std::invalid_argument("Path: first knot time must be 0");
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            if (!(knots[i].t < knots[i + 1].t))
                throw std::invalid_argument("Path: knot times must be strictly increasing");
        }
        for (const auto& k : knots) {
            if (!std::isfinite(k.t) || !std::isfinite(k.v))
                throw std::invalid_argument("Path: non-finite knot");
        }
        if (tail.kind != TailKind::Constant && !std::isfinite(tail.param))
            throw std::invalid_argument("Path: non-finite extension parameter");
    }

    double last_time() const { return knots.back().t; }
    double last_value() const { return knots.back().v; }

    static Path zero() { return Path({{0.0, 0.0}}, Extension::constant()); }
    static Path single(double v0, Extension e = Extension::constant()) {
        return Path({{0.0, v0}}, e);
    }
};

inline bool operator==(const Path& a, const Path& b) {
    return a.knots == b.knots && a.tail.kind == b.tail.kind && a.tail.param == b.tail.param;
}

// Tail value at absolute time t >= last knot time.
inline double eval_tail(const Path& f, double t) {
    const Knot& last = f.knots.back();
    const double dt = t - last.t;
    switch (f.tail.kind) {
        case TailKind::Constant: return last.v;
        case TailKind::LinearSlope: return last.v + f.tail.param * dt;
        case TailKind::ExpGrowth: return last.v * std::exp(f.tail.param * dt);
    }
    return last.v;
}

inline double eval_path(const Path& f, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("eval_path: t must be >= 0");
    const auto& ks = f.knots;
    if (t >= ks.back().t) return eval_tail(f, t);
    // First knot with time > t; t is strictly inside the knot range here.
    auto it = std::upper_bound(ks.begin(), ks.end(), t,
                               [](double x, const Knot& k) { return x < k.t; });
    const Knot& hi = *it;
    const Knot& lo = *(it - 1);
    if (t == lo.t) return lo.v;  // exact at knots
    const double w = (t - lo.t) / (hi.t - lo.t);
    return lo.v + w * (hi.v - lo.v);
}

// Restriction to [0, T]: knots <= T kept, a knot at T inserted, Constant tag.
inline Path project(const Path& f, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("project: T must be > 0");
    std::vector<Knot> out;
    for (const auto& k : f.knots) {
        if (k.t < T) out.push_back(k);
        else break;
    }
    out.push_back({T, eval_path(f, T)});
    return Path(std::move(out), Extension::constant());
}

// Equals f on [0, T], frozen at f(T) thereafter.
inline Path extend_constant(const Path& f, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("extend_constant: T must be > 0");
    return project(f, T);
}

// Chord path t * f(T) / T on [0, T], constant beyond.
inline Path straighten(const Path& f, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("straighten: T must be > 0");
    const double fT = eval_path(f, T);
    return Path({{0.0, 0.0}, {T, fT}}, Extension::constant());
}

// Slope of f on the open interval (a, b); requires that f is affine there,
// i.e. (a, b) lies between adjacent knots or in a Constant/LinearSlope tail.
inline double segment_slope(const Path& f, double a, double b) {
    return (eval_path(f, b) - eval_path(f, a)) / (b - a);
}

}  // namespace ldp
