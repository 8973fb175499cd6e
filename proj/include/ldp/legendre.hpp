#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ldp/extended.hpp"
#include "ldp/mgf.hpp"

namespace ldp {

// Convex conjugate Lambda(alpha) = sup_lambda { lambda alpha - A(lambda) } of
// a log-MGF model. Nonnegative, convex, zero exactly at the mean; alphas
// outside the support hull of bounded models are divergent, the hull edges
// carry the finite entropy value.
class DeviationFunction {
  public:
    explicit DeviationFunction(MgfModel model) : model_(std::move(model)) {}

    const MgfModel& model() const { return model_; }
    double mean() const { return model_.mean(); }
    double variance() const { return model_.variance(); }

    ExtReal operator()(double alpha) const { return legendre(alpha); }

    ExtReal legendre(double alpha) const {
        if (!std::isfinite(alpha)) throw std::invalid_argument("legendre: alpha must be finite");
        const double lo = model_.support_min(), hi = model_.support_max();
        if (alpha > hi || alpha < lo) return ExtReal::infinity();
        if (alpha == hi && std::isfinite(hi)) return ExtReal::finite(model_.boundary_entropy(true));
        if (alpha == lo && std::isfinite(lo)) return ExtReal::finite(model_.boundary_entropy(false));
        const double ls = lambda_star(alpha);
        const double v = ls * alpha - model_.log_mgf(ls);
        return ExtReal::finite(std::max(0.0, v));
    }

    // Maximizer of lambda alpha - A(lambda): the root of A'(lambda) = alpha,
    // found by geometric bracketing plus safeguarded Newton. Capped at
    // |lambda| = 700 against e^lambda overflow in the unbounded kinds.
    double lambda_star(double alpha) const {
        constexpr double cap = 700.0;
        double lo = -1.0, hi = 1.0;
        int guard = 0;
        while (model_.log_mgf_deriv(hi) < alpha && hi < cap && guard++ < 60)
            hi = std::min(cap, hi * 2.0);
        guard = 0;
        while (model_.log_mgf_deriv(lo) > alpha && lo > -cap && guard++ < 60)
            lo = std::max(-cap, lo * 2.0);
        if (model_.log_mgf_deriv(hi) < alpha) return cap;
        if (model_.log_mgf_deriv(lo) > alpha) return -cap;

        const double ftol = 1e-10 * std::max(1.0, std::abs(alpha));
        double x = 0.0;
        if (x < lo || x > hi) x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double fx = model_.log_mgf_deriv(x) - alpha;
            if (std::abs(fx) <= ftol) return x;
            if (fx > 0.0) hi = x;
            else lo = x;
            const double d2 = model_.log_mgf_second(x);
            double xn = (d2 > 0.0) ? x - fx / d2 : 0.5 * (lo + hi);
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
            if (hi - lo < 1e-15 * std::max(1.0, std::abs(x))) return 0.5 * (lo + hi);
            x = xn;
        }
        return x;
    }

  private:
    MgfModel model_;
};

struct SuperlinearityEntry {
    double alpha = 0.0;
    ExtReal lambda_value;
    double ratio = 0.0;  // Lambda(alpha) / |alpha|, finite entries only
};

struct SuperlinearityReport {
    std::vector<SuperlinearityEntry> entries;
    std::vector<double> ratio_violations;    // alphas breaking tail monotonicity
    std::vector<double> near_zero_failures;  // alphas breaking the quadratic asymptotic
    double threshold_pos = 0.0;              // |alpha| past which the positive branch is monotone
    double threshold_neg = 0.0;
    bool monotone_ok = true;
    bool near_zero_ok = true;

    bool pass() const { return monotone_ok && near_zero_ok; }
};

// Empirical check of the superlinear growth Lambda(alpha)/|alpha| -> inf and
// of the quadratic behaviour Lambda ~ (alpha-mean)^2 / (2 sigma^2) near the
// mean (within 5% for |alpha-mean| <= sigma/10).
inline SuperlinearityReport check_superlinearity(const DeviationFunction& d,
                                                 const std::vector<double>& alpha_grid) {
    SuperlinearityReport rep;
    const double mean = d.mean();
    const double sigma = std::sqrt(d.variance());

    std::vector<std::pair<double, double>> pos, neg;  // (|alpha - mean|, ratio)
    for (double a : alpha_grid) {
        SuperlinearityEntry e;
        e.alpha = a;
        e.lambda_value = d.legendre(a);
        if (e.lambda_value.is_finite() && a != 0.0) e.ratio = e.lambda_value.val / std::abs(a);
        rep.entries.push_back(e);
        if (!e.lambda_value.is_finite()) continue;

        const double dev = a - mean;
        if (dev != 0.0 && std::abs(dev) <= sigma / 10.0) {
            const double asym = e.lambda_value.val * 2.0 * sigma * sigma / (dev * dev);
            if (std::abs(asym - 1.0) > 0.05) {
                rep.near_zero_ok = false;
                rep.near_zero_failures.push_back(a);
            }
        }
        if (a > 0.0) pos.push_back({a, e.lambda_value.val / a});
        if (a < 0.0) neg.push_back({-a, e.lambda_value.val / -a});
    }

    // Past its minimum the ratio branch must be non-decreasing (convexity).
    auto check_branch = [&](std::vector<std::pair<double, double>>& branch, double& threshold) {
        if (branch.size() < 2) return;
        std::sort(branch.begin(), branch.end());
        std::size_t kmin = 0;
        for (std::size_t i = 1; i < branch.size(); ++i)
            if (branch[i].second < branch[kmin].second) kmin = i;
        threshold = branch[kmin].first;
        for (std::size_t i = kmin; i + 1 < branch.size(); ++i) {
            if (branch[i + 1].second < branch[i].second - 1e-12) {
                rep.monotone_ok = false;
                rep.ratio_violations.push_back(branch[i + 1].first);
            }
        }
    };
    check_branch(pos, rep.threshold_pos);
    check_branch(neg, rep.threshold_neg);
    return rep;
}

}  // namespace ldp
