#pragma once

// Flat double-precision evaluators for hot loops (Monte Carlo, search).

#include "pcorr/poly.hpp"

#include <span>
#include <vector>

namespace pcorr {

class CompiledPoly {
  public:
    CompiledPoly() = default;

    explicit CompiledPoly(const Poly& p) : arity_(p.arity()) {
        offsets_.reserve(p.size() + 1);
        offsets_.push_back(0);
        for (const auto& [e, c] : p.terms()) {
            coeffs_.push_back(c.convert_to<double>());
            for (std::size_t v = 0; v < e.size(); ++v)
                if (e[v]) factors_.push_back({static_cast<std::uint32_t>(v), e[v]});
            offsets_.push_back(factors_.size());
        }
    }

    std::size_t arity() const { return arity_; }
    std::size_t size() const { return coeffs_.size(); }

    double operator()(std::span<const double> x) const { return (*this)(x.data()); }

    double operator()(const double* x) const {
        double sum = 0.0;
        for (std::size_t t = 0; t < coeffs_.size(); ++t) {
            double m = coeffs_[t];
            for (std::size_t k = offsets_[t]; k < offsets_[t + 1]; ++k) {
                const double xv = x[factors_[k].var];
                for (std::uint32_t r = 0; r < factors_[k].exp; ++r) m *= xv;
            }
            sum += m;
        }
        return sum;
    }

  private:
    struct Factor {
        std::uint32_t var;
        std::uint32_t exp;
    };
    std::size_t arity_ = 0;
    std::vector<double> coeffs_;
    std::vector<std::size_t> offsets_;
    std::vector<Factor> factors_;
};

/// A polynomial together with its compiled gradient.
class CompiledWithGradient {
  public:
    CompiledWithGradient() = default;
    explicit CompiledWithGradient(const Poly& p) : value_(p) {
        for (std::size_t v = 0; v < p.arity(); ++v) grad_.emplace_back(partial(p, VarId{v}));
    }

    double value(const double* x) const { return value_(x); }
    void gradient(const double* x, double* out) const {
        for (std::size_t v = 0; v < grad_.size(); ++v) out[v] = grad_[v](x);
    }
    std::size_t arity() const { return value_.arity(); }

  private:
    CompiledPoly value_;
    std::vector<CompiledPoly> grad_;
};

} // namespace pcorr
