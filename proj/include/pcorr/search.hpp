#pragma once

// Screened multi-start Levenberg-Marquardt search for common real zeros of
// a polynomial system inside a ParamSpace.

#include "pcorr/compiled.hpp"
#include "pcorr/space.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <queue>
#include <vector>

namespace pcorr {

struct SearchOptions {
    std::size_t budget = 100000;  // random starts screened
    std::size_t refine = 384;     // best starts refined by LM
    std::size_t max_iter = 200;
    std::size_t max_hits = 8;
    double tol = 1e-9;
    std::uint64_t seed = 1;
};

struct SearchResult {
    std::vector<std::vector<double>> points;  // verified: every |g_k| < tol
    std::size_t starts = 0;
    std::size_t refined = 0;
    double best_residual = INFINITY;          // smallest max_k |g_k| seen
    std::vector<double> best_point;
};

namespace detail {

inline double max_abs(const std::vector<CompiledPoly>& sys, const double* x) {
    double m = 0.0;
    for (const auto& g : sys) m = std::max(m, std::abs(g(x)));
    return m;
}

} // namespace detail

class ZeroSearch {
  public:
    ZeroSearch(const std::vector<Poly>& system, const ParamSpace& space) : space_(space) {
        if (system.empty()) throw InputError("zero search on an empty system");
        dim_ = system.front().arity();
        if (space.dim() != dim_) throw InputError("zero search: space dimension differs from ring arity");
        for (const auto& g : system) {
            values_.emplace_back(g);
            grads_.emplace_back(g);
            exact_.push_back(g);
        }
    }

    SearchResult run(const SearchOptions& opt) const {
        SearchResult res;
        Rng rng(opt.seed);
        using Entry = std::pair<double, std::vector<double>>;
        auto worse = [](const Entry& a, const Entry& b) { return a.first < b.first; };
        std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
        std::vector<double> x(dim_);
        for (std::size_t s = 0; s < opt.budget; ++s) {
            space_.sample(rng, x);
            double ss = 0.0, mx = 0.0;
            for (const auto& g : values_) {
                const double v = g(x.data());
                ss += v * v;
                mx = std::max(mx, std::abs(v));
            }
            ++res.starts;
            if (mx < res.best_residual) consider(res, x, opt);
            if (heap.size() < opt.refine) heap.emplace(ss, x);
            else if (ss < heap.top().first) {
                heap.pop();
                heap.emplace(ss, x);
            }
        }
        std::vector<Entry> starts;
        while (!heap.empty()) {
            starts.push_back(heap.top());
            heap.pop();
        }
        std::reverse(starts.begin(), starts.end());
        for (auto& [ss, x0] : starts) {
            if (res.points.size() >= opt.max_hits) break;
            ++res.refined;
            auto xr = levenberg_marquardt(x0, opt);
            consider(res, xr, opt);
        }
        return res;
    }

    /// LM refinement from one given start, no screening.
    SearchResult run_from(const std::vector<double>& start, const SearchOptions& opt) const {
        SearchResult res;
        res.refined = 1;
        std::vector<double> x0 = start;
        space_.project(x0);
        consider(res, x0, opt);
        consider(res, levenberg_marquardt(x0, opt), opt);
        return res;
    }

  private:
    /// Verifies a candidate by exact-coefficient Horner evaluation.
    void consider(SearchResult& res, const std::vector<double>& x, const SearchOptions& opt) const {
        double r = detail::max_abs(values_, x.data());
        if (r < res.best_residual) {
            res.best_residual = r;
            res.best_point = x;
        }
        if (r >= opt.tol || !space_.contains(x, 1e-12)) return;
        for (const auto& g : exact_)
            if (std::abs(eval(g, x)) >= opt.tol) return;
        for (const auto& q : res.points) {
            double d = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) d = std::max(d, std::abs(q[k] - x[k]));
            if (d < 1e-6) return;
        }
        res.points.push_back(x);
    }

    std::vector<double> levenberg_marquardt(std::vector<double> x, const SearchOptions& opt) const {
        const std::size_t m = values_.size();
        Eigen::VectorXd r(m), r_new(m);
        Eigen::MatrixXd J(m, dim_);
        std::vector<double> grad(dim_);
        auto residual = [&](const std::vector<double>& at, Eigen::VectorXd& out) {
            for (std::size_t k = 0; k < m; ++k) out[k] = values_[k](at.data());
            return out.squaredNorm();
        };
        double cost = residual(x, r);
        double mu = 1e-3;
        std::vector<double> trial(dim_);
        for (std::size_t it = 0; it < opt.max_iter; ++it) {
            if (r.cwiseAbs().maxCoeff() < opt.tol * 1e-3) break;
            for (std::size_t k = 0; k < m; ++k) {
                grads_[k].gradient(x.data(), grad.data());
                for (std::size_t v = 0; v < dim_; ++v) J(k, v) = grad[v];
            }
            const Eigen::MatrixXd JtJ = J.transpose() * J;
            const Eigen::VectorXd Jtr = J.transpose() * r;
            bool improved = false;
            for (int inner = 0; inner < 12; ++inner) {
                Eigen::MatrixXd A = JtJ;
                for (std::size_t v = 0; v < dim_; ++v) A(v, v) += mu * (1.0 + JtJ(v, v));
                const Eigen::VectorXd step = A.ldlt().solve(-Jtr);
                for (std::size_t v = 0; v < dim_; ++v) trial[v] = x[v] + step[v];
                space_.project(trial);
                const double c = residual(trial, r_new);
                if (std::isfinite(c) && c < cost) {
                    x = trial;
                    r = r_new;
                    const double drop = cost - c;
                    cost = c;
                    mu = std::max(mu * 0.3, 1e-12);
                    improved = true;
                    if (drop < 1e-30) it = opt.max_iter;
                    break;
                }
                mu *= 10.0;
            }
            if (!improved) break;
        }
        return x;
    }

    ParamSpace space_;
    std::size_t dim_ = 0;
    std::vector<CompiledPoly> values_;
    std::vector<CompiledWithGradient> grads_;
    std::vector<Poly> exact_;
};

} // namespace pcorr
