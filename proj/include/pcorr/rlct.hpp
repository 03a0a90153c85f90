#pragma once

// Real log canonical thresholds (ell, m) and the rules that combine them.

#include "pcorr/graph_model.hpp"

#include <boost/rational.hpp>

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace pcorr {

using Rational = boost::rational<long long>;

/// Pair (ell, m). Smaller pairs mean fatter tubes: (l1,m1) < (l2,m2) iff
/// l1 < l2, or l1 == l2 and m1 > m2. An infinite ell is the maximum.
class RlctPair {
  public:
    RlctPair() : infinite_(true) {}
    RlctPair(Rational ell, unsigned m) : ell_(ell), m_(m), infinite_(false) {
        if (ell <= 0) throw InputError("RLCT ell must be positive");
        if (m < 1) throw InputError("RLCT multiplicity must be at least 1");
    }
    RlctPair(long long num, long long den, unsigned m) : RlctPair(Rational(num, den), m) {}

    static RlctPair infinity() { return RlctPair(); }

    bool is_infinite() const { return infinite_; }
    Rational ell() const {
        if (infinite_) throw InputError("ell of an infinite RLCT");
        return ell_;
    }
    unsigned m() const {
        if (infinite_) throw InputError("m is undefined for an infinite RLCT");
        return m_;
    }
    double ell_value() const { return infinite_ ? INFINITY : boost::rational_cast<double>(ell_); }

    friend bool operator==(const RlctPair& a, const RlctPair& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.ell_ == b.ell_ && a.m_ == b.m_;
    }

    friend bool operator<(const RlctPair& a, const RlctPair& b) {
        if (a.infinite_) return false;
        if (b.infinite_) return true;
        if (a.ell_ != b.ell_) return a.ell_ < b.ell_;
        return a.m_ > b.m_;
    }
    friend bool operator>(const RlctPair& a, const RlctPair& b) { return b < a; }
    friend bool operator<=(const RlctPair& a, const RlctPair& b) { return !(b < a); }
    friend bool operator>=(const RlctPair& a, const RlctPair& b) { return !(a < b); }

    /// "(1,2)", "(1/2,1)" or "(inf)".
    std::string to_string() const {
        if (infinite_) return "(inf)";
        std::string l = std::to_string(ell_.numerator());
        if (ell_.denominator() != 1) l += "/" + std::to_string(ell_.denominator());
        return "(" + l + "," + std::to_string(m_) + ")";
    }

    static RlctPair parse(std::string text) {
        std::string s;
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        if (s.size() < 3 || s.front() != '(' || s.back() != ')') throw InputError("bad RLCT pair '" + text + "'");
        s = s.substr(1, s.size() - 2);
        if (s == "inf") return infinity();
        auto comma = s.find(',');
        if (comma == std::string::npos) throw InputError("bad RLCT pair '" + text + "'");
        try {
            std::string l = s.substr(0, comma);
            long long num, den = 1;
            if (auto slash = l.find('/'); slash != std::string::npos) {
                num = std::stoll(l.substr(0, slash));
                den = std::stoll(l.substr(slash + 1));
            } else {
                num = std::stoll(l);
            }
            std::size_t used = 0;
            long long m = std::stoll(s.substr(comma + 1), &used);
            if (used != s.size() - comma - 1 || den <= 0 || m < 1) throw InputError("");
            return RlctPair(Rational(num, den), static_cast<unsigned>(m));
        } catch (const std::exception&) {
            throw InputError("bad RLCT pair '" + text + "'");
        }
    }

  private:
    Rational ell_{1};
    unsigned m_ = 1;
    bool infinite_;
};

inline std::ostream& operator<<(std::ostream& os, const RlctPair& p) { return os << p.to_string(); }

/// Monomial rule: ell = min over active i with kappa_i > 0 of
/// (tau_i + 1) / kappa_i, m = number of minimizers.
inline RlctPair rlct_monomial(const std::vector<unsigned>& kappa, const std::vector<unsigned>& tau,
                              const std::vector<bool>& active) {
    if (kappa.size() != tau.size() || kappa.size() != active.size())
        throw InputError("rlct_monomial: kappa, tau and active differ in length");
    bool found = false;
    Rational best;
    unsigned count = 0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        if (!active[i] || kappa[i] == 0) continue;
        Rational r(static_cast<long long>(tau[i]) + 1, kappa[i]);
        if (!found || r < best) {
            best = r;
            count = 1;
            found = true;
        } else if (r == best) {
            ++count;
        }
    }
    return found ? RlctPair(best, count) : RlctPair::infinity();
}

/// Prior-free monomial rule with every coordinate active.
inline RlctPair rlct_monomial(const std::vector<unsigned>& kappa) {
    return rlct_monomial(kappa, std::vector<unsigned>(kappa.size(), 0), std::vector<bool>(kappa.size(), true));
}

inline RlctPair rlct_smooth() { return RlctPair(1, 1, 1); }

inline RlctPair rlct_sos(unsigned d) {
    if (d < 1) throw InputError("rlct_sos: d must be at least 1");
    return RlctPair(Rational(d, 2), 1);
}

/// Product of factors in disjoint variables: minimal ell, multiplicities
/// of the minimizers added.
inline RlctPair rlct_product_disjoint(const std::vector<RlctPair>& parts) {
    if (parts.empty()) throw InputError("rlct_product_disjoint: empty list");
    RlctPair best = RlctPair::infinity();
    for (const auto& p : parts) {
        if (p.is_infinite()) continue;
        if (best.is_infinite() || p.ell() < best.ell()) best = p;
        else if (p.ell() == best.ell()) best = RlctPair(best.ell(), best.m() + p.m());
    }
    return best;
}

/// Number of edges on the unique skeleton path between i and j in a tree.
inline unsigned tree_path_length(const Dag& dag, int i, int j) {
    std::vector<int> prev(dag.p() + 1, 0);
    std::vector<int> queue{i};
    prev[i] = i;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        int v = queue[h];
        for (int w : dag.parents(v))
            if (!prev[w]) prev[w] = v, queue.push_back(w);
        for (int w : dag.children(v))
            if (!prev[w]) prev[w] = v, queue.push_back(w);
    }
    unsigned len = 0;
    for (int v = j; v != i; v = prev[v]) ++len;
    return len;
}

inline RlctPair rlct_tree(const Dag& dag, const Triple& t) {
    if (!dag.is_tree()) throw InputError("rlct_tree: graph is not a collider-free tree");
    if (d_separated(dag, t)) throw InputError("rlct_tree: triple " + t.to_string() + " is d-separated");
    return RlctPair(1, 1, tree_path_length(dag, t.i, t.j));
}

inline RlctPair rlct_graph(const std::map<Triple, RlctPair>& per_triple) {
    if (per_triple.empty()) throw InputError("rlct_graph: no triples");
    RlctPair best = RlctPair::infinity();
    for (const auto& [t, pair] : per_triple)
        if (pair < best) best = pair;
    return best;
}

} // namespace pcorr
