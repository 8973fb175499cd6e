#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ldp {

// Nonnegative extended real. Divergence is a tag, not an IEEE overflow, so
// callers can distinguish "provably infinite" from "merely large".
struct ExtReal {
    double val = 0.0;
    bool divergent = false;

    static ExtReal finite(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("ExtReal::finite: non-finite value");
        return ExtReal{v, false};
    }
    static ExtReal infinity() { return ExtReal{0.0, true}; }

    bool is_finite() const { return !divergent; }

    double value_or(double inf_proxy) const { return divergent ? inf_proxy : val; }

    ExtReal& operator+=(const ExtReal& o) {
        divergent = divergent || o.divergent;
        if (!divergent) val += o.val;
        return *this;
    }
    ExtReal& operator+=(double v) {
        if (!divergent) val += v;
        return *this;
    }
    friend ExtReal operator+(ExtReal a, const ExtReal& b) { return a += b; }

    friend bool operator<(const ExtReal& a, const ExtReal& b) {
        if (a.divergent) return false;
        if (b.divergent) return true;
        return a.val < b.val;
    }
};

inline ExtReal ext_max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }

}  // namespace ldp
