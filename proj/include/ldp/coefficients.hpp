#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldp {

// Named coefficient functions for the diffusion models. The registry keeps
// the file format language-neutral: a coefficient is one of a small set of
// built-in shapes with numeric parameters.
class Coefficient {
  public:
    enum class Kind { Constant, Linear, Logistic, ClippedPoly };

    static Coefficient constant(double value) {
        Coefficient c;
        c.kind_ = Kind::Constant;
        c.params_ = {value};
        return c;
    }

    // c0 + c1 x
    static Coefficient linear(double c0, double c1) {
        Coefficient c;
        c.kind_ = Kind::Linear;
        c.params_ = {c0, c1};
        return c;
    }

    // scale / (1 + e^{-rate (x - center)})
    static Coefficient logistic(double scale, double rate, double center) {
        Coefficient c;
        c.kind_ = Kind::Logistic;
        c.params_ = {scale, rate, center};
        return c;
    }

    // clamp(sum_i coeffs[i] x^i, lo, hi)
    static Coefficient clipped_poly(std::vector<double> coeffs, double lo, double hi) {
        if (coeffs.empty()) throw std::invalid_argument("Coefficient: empty polynomial");
        if (!(lo <= hi)) throw std::invalid_argument("Coefficient: clip bounds out of order");
        Coefficient c;
        c.kind_ = Kind::ClippedPoly;
        c.params_ = std::move(coeffs);
        c.lo_ = lo;
        c.hi_ = hi;
        return c;
    }

    double operator()(double x) const {
        switch (kind_) {
            case Kind::Constant: return params_[0];
            case Kind::Linear: return params_[0] + params_[1] * x;
            case Kind::Logistic:
                return params_[0] / (1.0 + std::exp(-params_[1] * (x - params_[2])));
            case Kind::ClippedPoly: {
                double v = 0.0;
                for (std::size_t i = params_.size(); i-- > 0;) v = v * x + params_[i];
                return std::clamp(v, lo_, hi_);
            }
        }
        return 0.0;
    }

    Kind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    double clip_lo() const { return lo_; }
    double clip_hi() const { return hi_; }

  private:
    Kind kind_ = Kind::Constant;
    std::vector<double> params_{0.0};
    double lo_ = 0.0, hi_ = 0.0;
};

}  // namespace ldp
