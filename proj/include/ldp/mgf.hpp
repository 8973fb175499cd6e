#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ldp/rng.hpp"

namespace ldp {

struct Atom {
    double value = 0.0;
    double prob = 0.0;
};

namespace detail {

// Walker alias table for finite discrete distributions.
class AliasTable {
  public:
    AliasTable() = default;

    explicit AliasTable(const std::vector<double>& probs) : accept_(probs.size()), alias_(probs.size()) {
        const std::size_t n = probs.size();
        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = probs[i] * static_cast<double>(n);
        std::vector<std::size_t> small, large;
        for (std::size_t i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);
        while (!small.empty() && !large.empty()) {
            const std::size_t s = small.back(), l = large.back();
            small.pop_back();
            accept_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (std::size_t i : large) accept_[i] = 1.0;
        for (std::size_t i : small) accept_[i] = 1.0;
    }

    std::size_t sample(RngStream& rng) const {
        const double u = rng.uniform01() * static_cast<double>(accept_.size());
        auto i = static_cast<std::size_t>(u);
        if (i >= accept_.size()) i = accept_.size() - 1;
        return (u - static_cast<double>(i)) < accept_[i] ? i : alias_[i];
    }

  private:
    std::vector<double> accept_, alias_;
};

inline int poisson_inversion(double rate, RngStream& rng) {
    const double u = rng.uniform01();
    double p = std::exp(-rate), cdf = p;
    int k = 0;
    while (u > cdf && k < 100000) {
        ++k;
        p *= rate / k;
        cdf += p;
    }
    return k;
}

inline double log_sum_exp(const std::vector<double>& xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace detail

enum class MgfKind { Gaussian, Rademacher, CenteredBernoulli, Poisson, Table };

// A step distribution xi with everywhere-finite log-MGF A(lambda), exposed
// through its cumulant generating function, derivatives, support hull and a
// sampler. Immutable after construction.
class MgfModel {
  public:
    static MgfModel gaussian(double mean, double variance) {
        if (!(variance > 0.0)) throw std::invalid_argument("MgfModel: variance must be > 0");
        MgfModel m;
        m.kind_ = MgfKind::Gaussian;
        m.p1_ = mean;
        m.p2_ = variance;
        return m;
    }

    static MgfModel rademacher() {
        MgfModel m;
        m.kind_ = MgfKind::Rademacher;
        return m;
    }

    static MgfModel centered_bernoulli(double p) {
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("MgfModel: p must lie in (0,1)");
        MgfModel m;
        m.kind_ = MgfKind::CenteredBernoulli;
        m.p1_ = p;
        return m;
    }

    static MgfModel poisson(double rate, bool centered) {
        if (!(rate > 0.0)) throw std::invalid_argument("MgfModel: rate must be > 0");
        MgfModel m;
        m.kind_ = MgfKind::Poisson;
        m.p1_ = rate;
        m.centered_ = centered;
        return m;
    }

    static MgfModel table(std::vector<Atom> atoms) {
        MgfModel m;
        m.kind_ = MgfKind::Table;
        double total = 0.0;
        for (const auto& a : atoms) {
            if (!(a.prob > 0.0)) throw std::invalid_argument("MgfModel: atom probabilities must be > 0");
            if (!std::isfinite(a.value)) throw std::invalid_argument("MgfModel: non-finite atom");
            total += a.prob;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("MgfModel: atom probabilities must sum to 1");
        std::sort(atoms.begin(), atoms.end(),
                  [](const Atom& a, const Atom& b) { return a.value < b.value; });
        std::size_t distinct = atoms.empty() ? 0 : 1;
        for (std::size_t i = 1; i < atoms.size(); ++i)
            if (atoms[i].value != atoms[i - 1].value) ++distinct;
        if (distinct < 2) throw std::invalid_argument("MgfModel: need at least two distinct atoms");
        m.atoms_ = std::move(atoms);
        std::vector<double> probs;
        probs.reserve(m.atoms_.size());
        for (const auto& a : m.atoms_) probs.push_back(a.prob);
        m.alias_ = detail::AliasTable(probs);
        return m;
    }

    MgfKind kind() const { return kind_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    double gaussian_mean() const { return p1_; }
    double gaussian_variance() const { return p2_; }
    double bernoulli_p() const { return p1_; }
    double poisson_rate() const { return p1_; }
    bool poisson_centered() const { return centered_; }

    double mean() const {
        switch (kind_) {
            case MgfKind::Gaussian: return p1_;
            case MgfKind::Rademacher: return 0.0;
            case MgfKind::CenteredBernoulli: return 0.0;
            case MgfKind::Poisson: return centered_ ? 0.0 : p1_;
            case MgfKind::Table: {
                double s = 0.0;
                for (const auto& a : atoms_) s += a.prob * a.value;
                return s;
            }
        }
        return 0.0;
    }

    double variance() const {
        switch (kind_) {
            case MgfKind::Gaussian: return p2_;
            case MgfKind::Rademacher: return 1.0;
            case MgfKind::CenteredBernoulli: return p1_ * (1.0 - p1_);
            case MgfKind::Poisson: return p1_;
            case MgfKind::Table: {
                const double m = mean();
                double s = 0.0;
                for (const auto& a : atoms_) s += a.prob * (a.value - m) * (a.value - m);
                return s;
            }
        }
        return 0.0;
    }

    // A(lambda) = ln E e^{lambda xi}.
    double log_mgf(double lambda) const {
        switch (kind_) {
            case MgfKind::Gaussian: return p1_ * lambda + 0.5 * p2_ * lambda * lambda;
            case MgfKind::Rademacher: {
                // ln cosh, stable for large |lambda|
                const double a = std::abs(lambda);
                return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
            }
            case MgfKind::CenteredBernoulli: {
                const double p = p1_, q = 1.0 - p1_;
                double base;
                if (lambda > 0.0)
                    base = lambda + std::log(p + q * std::exp(-lambda));
                else
                    base = std::log(q + p * std::exp(lambda));
                return base - p * lambda;
            }
            case MgfKind::Poisson: {
                const double v = p1_ * std::expm1(lambda);
                return centered_ ? v - p1_ * lambda : v;
            }
            case MgfKind::Table: {
                std::vector<double> xs;
                xs.reserve(atoms_.size());
                for (const auto& a : atoms_) xs.push_back(std::log(a.prob) + lambda * a.value);
                return detail::log_sum_exp(xs);
            }
        }
        return 0.0;
    }

    // A'(lambda); increasing in lambda.
    double log_mgf_deriv(double lambda) const {
        switch (kind_) {
            case MgfKind::Gaussian: return p1_ + p2_ * lambda;
            case MgfKind::Rademacher: return std::tanh(lambda);
            case MgfKind::CenteredBernoulli: {
                const double p = p1_, q = 1.0 - p1_;
                // p e^l / (q + p e^l) - p, computed from the smaller exponent
                if (lambda > 0.0) return p / (p + q * std::exp(-lambda)) - p;
                const double pe = p * std::exp(lambda);
                return pe / (q + pe) - p;
            }
            case MgfKind::Poisson: {
                const double v = p1_ * std::exp(lambda);
                return centered_ ? v - p1_ : v;
            }
            case MgfKind::Table: {
                double m = -std::numeric_limits<double>::infinity();
                for (const auto& a : atoms_) m = std::max(m, std::log(a.prob) + lambda * a.value);
                double num = 0.0, den = 0.0;
                for (const auto& a : atoms_) {
                    const double w = std::exp(std::log(a.prob) + lambda * a.value - m);
                    num += w * a.value;
                    den += w;
                }
                return num / den;
            }
        }
        return 0.0;
    }

    // A''(lambda) > 0 for non-degenerate xi.
    double log_mgf_second(double lambda) const {
        switch (kind_) {
            case MgfKind::Gaussian: return p2_;
            case MgfKind::Rademacher: {
                const double c = std::cosh(lambda);
                return 1.0 / (c * c);
            }
            case MgfKind::CenteredBernoulli: {
                const double p = p1_, q = 1.0 - p1_;
                double w;
                if (lambda > 0.0) w = p / (p + q * std::exp(-lambda));
                else {
                    const double pe = p * std::exp(lambda);
                    w = pe / (q + pe);
                }
                return w * (1.0 - w);
            }
            case MgfKind::Poisson: return p1_ * std::exp(lambda);
            case MgfKind::Table: {
                double m = -std::numeric_limits<double>::infinity();
                for (const auto& a : atoms_) m = std::max(m, std::log(a.prob) + lambda * a.value);
                double num1 = 0.0, num2 = 0.0, den = 0.0;
                for (const auto& a : atoms_) {
                    const double w = std::exp(std::log(a.prob) + lambda * a.value - m);
                    num1 += w * a.value;
                    num2 += w * a.value * a.value;
                    den += w;
                }
                const double mu = num1 / den;
                return num2 / den - mu * mu;
            }
        }
        return 0.0;
    }

    // Essential support bounds of xi (+-inf on unbounded sides).
    double support_min() const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        switch (kind_) {
            case MgfKind::Gaussian: return -inf;
            case MgfKind::Rademacher: return -1.0;
            case MgfKind::CenteredBernoulli: return -p1_;
            case MgfKind::Poisson: return centered_ ? -p1_ : 0.0;
            case MgfKind::Table: return atoms_.front().value;
        }
        return -inf;
    }

    double support_max() const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        switch (kind_) {
            case MgfKind::Gaussian: return inf;
            case MgfKind::Rademacher: return 1.0;
            case MgfKind::CenteredBernoulli: return 1.0 - p1_;
            case MgfKind::Poisson: return inf;
            case MgfKind::Table: return atoms_.back().value;
        }
        return inf;
    }

    // -ln P(xi = boundary atom), the finite Legendre value at the support hull
    // edge of a bounded-support model.
    double boundary_entropy(bool upper) const {
        switch (kind_) {
            case MgfKind::Rademacher: return std::log(2.0);
            case MgfKind::CenteredBernoulli: return upper ? -std::log(p1_) : -std::log(1.0 - p1_);
            case MgfKind::Poisson: return upper ? 0.0 : p1_;  // lower edge: P(N=0)=e^{-rate}
            case MgfKind::Table: {
                const double edge = upper ? atoms_.back().value : atoms_.front().value;
                double p = 0.0;
                for (const auto& a : atoms_)
                    if (a.value == edge) p += a.prob;
                return -std::log(p);
            }
            default: return 0.0;
        }
    }

    double sample(RngStream& rng) const {
        switch (kind_) {
            case MgfKind::Gaussian: return p1_ + std::sqrt(p2_) * rng.normal();
            case MgfKind::Rademacher: return rng.coin() ? 1.0 : -1.0;
            case MgfKind::CenteredBernoulli:
                return rng.uniform01() < p1_ ? 1.0 - p1_ : -p1_;
            case MgfKind::Poisson: {
                const double k = detail::poisson_inversion(p1_, rng);
                return centered_ ? k - p1_ : k;
            }
            case MgfKind::Table: return atoms_[alias_.sample(rng)].value;
        }
        return 0.0;
    }

  private:
    MgfKind kind_ = MgfKind::Rademacher;
    double p1_ = 0.0;  // mean / p / rate
    double p2_ = 1.0;  // variance
    bool centered_ = false;
    std::vector<Atom> atoms_;
    detail::AliasTable alias_;
};

// Draws xi under the exponentially tilted law dP_l/dP = e^{l xi - A(l)}.
// Per-kind parameters are precomputed once; lambda = 0 reproduces the plain
// sampler exactly.
class TiltedSampler {
  public:
    TiltedSampler(const MgfModel& model, double lambda) : model_(&model), lambda_(lambda) {
        if (lambda_ == 0.0) return;
        switch (model.kind()) {
            case MgfKind::Gaussian:
                tilt_mean_ = model.gaussian_mean() + model.gaussian_variance() * lambda;
                break;
            case MgfKind::Rademacher:
                p_plus_ = 1.0 / (1.0 + std::exp(-2.0 * lambda));
                break;
            case MgfKind::CenteredBernoulli: {
                const double p = model.bernoulli_p();
                const double w1 = std::log(p) + lambda * (1.0 - p);
                const double w0 = std::log(1.0 - p) - lambda * p;
                p_plus_ = 1.0 / (1.0 + std::exp(w0 - w1));
                break;
            }
            case MgfKind::Poisson:
                tilt_rate_ = model.poisson_rate() * std::exp(lambda);
                break;
            case MgfKind::Table: {
                std::vector<double> logs;
                for (const auto& a : model.atoms()) logs.push_back(std::log(a.prob) + lambda * a.value);
                const double lz = detail::log_sum_exp(logs);
                std::vector<double> probs;
                for (double lw : logs) probs.push_back(std::exp(lw - lz));
                alias_ = detail::AliasTable(probs);
                break;
            }
        }
    }

    double operator()(RngStream& rng) const {
        if (lambda_ == 0.0) return model_->sample(rng);
        switch (model_->kind()) {
            case MgfKind::Gaussian:
                return tilt_mean_ + std::sqrt(model_->gaussian_variance()) * rng.normal();
            case MgfKind::Rademacher: return rng.uniform01() < p_plus_ ? 1.0 : -1.0;
            case MgfKind::CenteredBernoulli:
                return rng.uniform01() < p_plus_ ? 1.0 - model_->bernoulli_p() : -model_->bernoulli_p();
            case MgfKind::Poisson: {
                const double k = detail::poisson_inversion(tilt_rate_, rng);
                return model_->poisson_centered() ? k - model_->poisson_rate() : k;
            }
            case MgfKind::Table: return model_->atoms()[alias_.sample(rng)].value;
        }
        return 0.0;
    }

    double lambda() const { return lambda_; }

  private:
    const MgfModel* model_;
    double lambda_;
    double tilt_mean_ = 0.0;
    double tilt_rate_ = 0.0;
    double p_plus_ = 0.5;
    detail::AliasTable alias_;
};

}  // namespace ldp
