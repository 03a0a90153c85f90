#pragma once

// Symbolic concentration matrices, almost-principal minors, partial
// correlations and d-separation for linear Gaussian DAG models.

#include "pcorr/compiled.hpp"
#include "pcorr/dag.hpp"
#include "pcorr/poly_matrix.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <deque>
#include <span>
#include <vector>

namespace pcorr {

/// K = (A - I)(A - I)^T with A the weighted adjacency matrix in the edge variables.
inline PolyMatrix concentration(const Dag& dag) {
    const auto& ring = dag.ring();
    const std::size_t p = static_cast<std::size_t>(dag.p());
    PolyMatrix B(ring, p, p);
    for (std::size_t k = 0; k < p; ++k) B(k, k) = Poly::constant(ring, -1);
    for (std::size_t e = 0; e < dag.edges().size(); ++e) {
        auto [i, j] = dag.edges()[e];
        B(i - 1, j - 1) = Poly::variable(ring, VarId{e});
    }
    return B * B.transpose();
}

namespace detail {

inline std::vector<std::size_t> zero_based(int head, const std::vector<int>& rest) {
    std::vector<std::size_t> idx{static_cast<std::size_t>(head - 1)};
    for (int r : rest) idx.push_back(static_cast<std::size_t>(r - 1));
    return idx;
}

inline std::vector<std::size_t> zero_based(const std::vector<int>& nodes) {
    std::vector<std::size_t> idx;
    for (int r : nodes) idx.push_back(static_cast<std::size_t>(r - 1));
    return idx;
}

} // namespace detail

/// det(K_{iR,jR}); rows (i, R ascending), columns (j, R ascending).
inline Poly almost_principal_minor(const Dag& dag, const PolyMatrix& K, const Triple& t) {
    t.validate(dag.p());
    const auto R = t.rest(dag.p());
    return det(K.submatrix(detail::zero_based(t.i, R), detail::zero_based(t.j, R)));
}

inline Poly almost_principal_minor(const Dag& dag, const Triple& t) {
    return almost_principal_minor(dag, concentration(dag), t);
}

/// det(K_{nodes,nodes}); the empty principal minor is 1.
inline Poly principal_minor(const Dag& dag, const PolyMatrix& K, const std::vector<int>& nodes) {
    if (nodes.empty()) return Poly::constant(dag.ring(), 1);
    const auto idx = detail::zero_based(nodes);
    return det(K.submatrix(idx, idx));
}

/// The three polynomials making up corr(i,j|S) = f / sqrt(d_i d_j).
struct CorrelationPolys {
    Poly numerator;
    Poly den_i;
    Poly den_j;
};

inline CorrelationPolys correlation_polys(const Dag& dag, const Triple& t) {
    const PolyMatrix K = concentration(dag);
    const auto R = t.rest(dag.p());
    std::vector<int> iR{t.i}, jR{t.j};
    iR.insert(iR.end(), R.begin(), R.end());
    jR.insert(jR.end(), R.begin(), R.end());
    return {almost_principal_minor(dag, K, t), principal_minor(dag, K, iR), principal_minor(dag, K, jR)};
}

/// Evaluates corr(i,j|S) from compiled minors.
class CompiledCorrelation {
  public:
    CompiledCorrelation(const Dag& dag, const Triple& t) {
        auto c = correlation_polys(dag, t);
        num_ = CompiledPoly(c.numerator);
        di_ = CompiledPoly(c.den_i);
        dj_ = CompiledPoly(c.den_j);
    }
    double operator()(std::span<const double> x) const { return num_(x) / std::sqrt(di_(x) * dj_(x)); }

  private:
    CompiledPoly num_, di_, dj_;
};

inline Eigen::MatrixXd numeric_concentration(const Dag& dag, std::span<const double> point) {
    if (point.size() != dag.edges().size())
        throw InputError("point has " + std::to_string(point.size()) + " coordinates, DAG has " +
                         std::to_string(dag.edges().size()) + " edges");
    const int p = dag.p();
    Eigen::MatrixXd B = -Eigen::MatrixXd::Identity(p, p);
    for (std::size_t e = 0; e < point.size(); ++e) {
        auto [i, j] = dag.edges()[e];
        B(i - 1, j - 1) = point[e];
    }
    return B * B.transpose();
}

/// corr(i,j|S) at a numeric parameter point, via floating-point determinants.
inline double partial_correlation(const Dag& dag, const Triple& t, std::span<const double> point) {
    t.validate(dag.p());
    const Eigen::MatrixXd K = numeric_concentration(dag, point);
    const auto R = t.rest(dag.p());
    auto sub_det = [&](int r0, int c0) {
        const Eigen::Index n = static_cast<Eigen::Index>(R.size()) + 1;
        Eigen::MatrixXd M(n, n);
        auto row = [&](Eigen::Index a) { return a == 0 ? r0 - 1 : R[a - 1] - 1; };
        auto col = [&](Eigen::Index b) { return b == 0 ? c0 - 1 : R[b - 1] - 1; };
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) M(a, b) = K(row(a), col(b));
        return M.determinant();
    };
    return sub_det(t.i, t.j) / std::sqrt(sub_det(t.i, t.i) * sub_det(t.j, t.j));
}

/// Bayes-ball reachability: is j reachable from i by an active trail given S?
inline bool d_separated(const Dag& dag, const Triple& t) {
    t.validate(dag.p());
    const int p = dag.p();
    std::vector<char> inS(p + 1, 0), anc(p + 1, 0);
    for (int s : t.S) inS[s] = 1;
    std::vector<std::vector<int>> par(p + 1), ch(p + 1);
    for (auto [a, b] : dag.edges()) {
        par[b].push_back(a);
        ch[a].push_back(b);
    }
    // Ancestors of S, S included.
    std::vector<int> stack(t.S.begin(), t.S.end());
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (anc[v]) continue;
        anc[v] = 1;
        for (int u : par[v]) stack.push_back(u);
    }
    // State (v, up): entered v from a child. (v, down): entered v from a parent.
    std::vector<char> seen_up(p + 1, 0), seen_down(p + 1, 0);
    std::deque<std::pair<int, bool>> queue{{t.i, true}};
    while (!queue.empty()) {
        auto [v, up] = queue.front();
        queue.pop_front();
        auto& seen = up ? seen_up : seen_down;
        if (seen[v]) continue;
        seen[v] = 1;
        if (v == t.j && !inS[v]) return false;
        if (up) {
            if (inS[v]) continue;
            for (int u : par[v]) queue.emplace_back(u, true);
            for (int c : ch[v]) queue.emplace_back(c, false);
        } else {
            if (!inS[v])
                for (int c : ch[v]) queue.emplace_back(c, false);
            if (anc[v])
                for (int u : par[v]) queue.emplace_back(u, true);
        }
    }
    return true;
}

/// All d-connected triples in order (i, j, S-mask). With `ordered`, each
/// pair is listed once per orientation.
inline std::vector<Triple> d_connected_triples(const Dag& dag, bool ordered = false) {
    const int p = dag.p();
    if (p > 12) throw InputError("d_connected_triples: p > 12");
    std::vector<Triple> out;
    for (int i = 1; i <= p; ++i)
        for (int j = i + 1; j <= p; ++j) {
            const std::uint32_t pair = (1u << (i - 1)) | (1u << (j - 1));
            for (std::uint32_t m = 0; m < (1u << p); ++m) {
                if (m & pair) continue;
                std::vector<int> S;
                for (int v = 1; v <= p; ++v)
                    if (m & (1u << (v - 1))) S.push_back(v);
                Triple t(i, j, std::move(S));
                if (d_separated(dag, t)) continue;
                out.push_back(t);
                if (ordered) out.push_back(t);
            }
        }
    return out;
}

/// All partial correlations r_{ij|S} at one parameter point, from the
/// covariance matrix by the recursion over conditioning sets.
class AllPartialCorrelations {
  public:
    explicit AllPartialCorrelations(const Dag& dag) : dag_(dag), p_(dag.p()) {
        if (p_ > 12) throw InputError("AllPartialCorrelations: p > 12");
        table_.assign((std::size_t{1} << p_) * p_ * p_, 0.0);
    }

    void compute(std::span<const double> point) {
        const Eigen::MatrixXd K = numeric_concentration(dag_, point);
        const Eigen::MatrixXd Sigma = K.inverse();
        for (int i = 0; i < p_; ++i)
            for (int j = 0; j < p_; ++j) at(0, i, j) = Sigma(i, j) / std::sqrt(Sigma(i, i) * Sigma(j, j));
        const std::uint32_t full = 1u << p_;
        for (std::uint32_t S = 1; S < full; ++S) {
            const int k = 31 - std::countl_zero(S);
            const std::uint32_t prev = S & ~(1u << k);
            for (int i = 0; i < p_; ++i) {
                if (S & (1u << i)) continue;
                const double rik = at(prev, i, k);
                for (int j = i + 1; j < p_; ++j) {
                    if (S & (1u << j)) continue;
                    const double rjk = at(prev, j, k);
                    const double r = (at(prev, i, j) - rik * rjk) / std::sqrt((1 - rik * rik) * (1 - rjk * rjk));
                    at(S, i, j) = r;
                    at(S, j, i) = r;
                }
            }
        }
    }

    /// Same sign convention as partial_correlation, which is the negated
    /// statistical partial correlation. Requires a prior compute(); nodes are 1-based.
    double corr(const Triple& t) const { return -table_[index(t.mask(), t.i - 1, t.j - 1)]; }
    double corr(std::uint32_t mask, int i, int j) const { return -table_[index(mask, i - 1, j - 1)]; }

  private:
    std::size_t index(std::uint32_t S, int i, int j) const {
        return (static_cast<std::size_t>(S) * p_ + i) * p_ + j;
    }
    double& at(std::uint32_t S, int i, int j) { return table_[index(S, i, j)]; }

    Dag dag_;
    int p_;
    std::vector<double> table_;
};

} // namespace pcorr
