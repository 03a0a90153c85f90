#pragma once

// Directed acyclic graphs on nodes 1..p with edges i -> j, i < j, and the
// conditional-independence triples (i, j | S) over them.

#include "pcorr/error.hpp"
#include "pcorr/poly.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pcorr {

enum class Family { Complete, Chain, Star, Tripart, Bow, Custom };

using Edge = std::pair<int, int>;

class Dag {
  public:
    Dag(int p, std::vector<Edge> edges, Family family = Family::Custom, int family_param = 0)
        : p_(p), edges_(std::move(edges)), family_(family), family_param_(family_param) {
        if (p < 1) throw InputError("a DAG needs at least one node");
        std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
            throw InputError("duplicate edge");
        for (auto [i, j] : edges_) {
            if (i < 1 || j > p || i >= j)
                throw InputError("edge " + std::to_string(i) + "->" + std::to_string(j) +
                                 " violates 1 <= i < j <= p");
        }
        std::vector<std::string> names;
        for (auto [i, j] : edges_) names.push_back(edge_name(i, j));
        ring_ = make_ring(std::move(names));
    }

    /// The families i)-iv) plus chains and stars.
    static Dag make_family(Family family, int p, int p2 = 0) {
        std::vector<Edge> e;
        switch (family) {
        case Family::Complete:
            if (p < 2) throw InputError("complete graph needs p >= 2");
            for (int i = 1; i <= p; ++i)
                for (int j = i + 1; j <= p; ++j) e.emplace_back(i, j);
            return Dag(p, e, family);
        case Family::Chain:
            if (p < 2) throw InputError("chain needs p >= 2");
            for (int k = 1; k < p; ++k) e.emplace_back(k, k + 1);
            return Dag(p, e, family);
        case Family::Star:
            if (p < 2) throw InputError("star needs p >= 2");
            for (int k = 2; k <= p; ++k) e.emplace_back(1, k);
            return Dag(p, e, family);
        case Family::Tripart: {
            if (p2 < 1 || p2 > p - 3) throw InputError("tripartite graph needs 1 <= p' <= p-3");
            const int mid_end = p - p2;
            for (int a : {1, 2})
                for (int b = 3; b <= mid_end; ++b) e.emplace_back(a, b);
            for (int b = 3; b <= mid_end; ++b)
                for (int c = mid_end + 1; c <= p; ++c) e.emplace_back(b, c);
            return Dag(p, e, family, p2);
        }
        case Family::Bow: {
            if (p < 5) throw InputError("bow-tie needs p >= 5");
            Dag base = make_family(Family::Tripart, p, 2);
            e = base.edges();
            e.emplace_back(1, p - 1);
            e.emplace_back(2, p);
            return Dag(p, e, family, 2);
        }
        case Family::Custom:
            break;
        }
        throw InputError("make_family: Custom has no generator");
    }

    static std::string edge_name(int i, int j) {
        if (i < 10 && j < 10) return "a" + std::to_string(i) + std::to_string(j);
        return "a" + std::to_string(i) + "_" + std::to_string(j);
    }

    int p() const { return p_; }
    const std::vector<Edge>& edges() const { return edges_; }
    Family family() const { return family_; }
    int family_param() const { return family_param_; }

    /// Ring of edge parameters, in sorted edge order.
    const RingPtr& ring() const { return ring_; }

    std::optional<std::size_t> edge_index(int i, int j) const {
        auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{i, j});
        if (it == edges_.end() || *it != Edge{i, j}) return std::nullopt;
        return static_cast<std::size_t>(it - edges_.begin());
    }

    bool has_edge(int i, int j) const { return edge_index(i, j).has_value(); }

    std::vector<int> parents(int v) const {
        std::vector<int> out;
        for (auto [i, j] : edges_)
            if (j == v) out.push_back(i);
        return out;
    }

    std::vector<int> children(int v) const {
        std::vector<int> out;
        for (auto [i, j] : edges_)
            if (i == v) out.push_back(j);
        return out;
    }

    /// Shorthand name (K5, chain6, star10, tripart6_2, bow5) or "custom".
    std::string name() const {
        switch (family_) {
        case Family::Complete: return "K" + std::to_string(p_);
        case Family::Chain: return "chain" + std::to_string(p_);
        case Family::Star: return "star" + std::to_string(p_);
        case Family::Tripart: return "tripart" + std::to_string(p_) + "_" + std::to_string(family_param_);
        case Family::Bow: return "bow" + std::to_string(p_);
        case Family::Custom: break;
        }
        return "custom";
    }

    /// Collider-free rooted tree: connected, every node has at most one parent.
    bool is_tree() const {
        if (static_cast<int>(edges_.size()) != p_ - 1) return false;
        for (int v = 1; v <= p_; ++v)
            if (parents(v).size() > 1) return false;
        // p-1 edges with in-degree <= 1 is a forest with one root iff connected.
        std::vector<int> comp(p_ + 1);
        std::iota(comp.begin(), comp.end(), 0);
        auto find = [&](int x) {
            while (comp[x] != x) x = comp[x] = comp[comp[x]];
            return x;
        };
        for (auto [i, j] : edges_) comp[find(i)] = find(j);
        for (int v = 2; v <= p_; ++v)
            if (find(v) != find(1)) return false;
        return true;
    }

    friend bool operator==(const Dag& a, const Dag& b) { return a.p_ == b.p_ && a.edges_ == b.edges_; }

  private:
    int p_;
    std::vector<Edge> edges_;
    Family family_;
    int family_param_;
    RingPtr ring_;
};

/// A conditional independence statement i _||_ j | S, stored with i < j.
struct Triple {
    int i = 0, j = 0;
    std::vector<int> S;

    Triple() = default;
    Triple(int a, int b, std::vector<int> cond) : i(a), j(b), S(std::move(cond)) {
        if (i == j) throw InputError("triple needs distinct nodes");
        if (i > j) std::swap(i, j);
        std::sort(S.begin(), S.end());
        if (std::adjacent_find(S.begin(), S.end()) != S.end()) throw InputError("repeated node in S");
        for (int s : S)
            if (s == i || s == j) throw InputError("conditioning set must not contain i or j");
    }

    void validate(int p) const {
        if (i < 1 || j > p) throw InputError("triple node out of range 1.." + std::to_string(p));
        for (int s : S)
            if (s < 1 || s > p) throw InputError("conditioning node out of range 1.." + std::to_string(p));
    }

    /// R = V \ (S u {i, j}), ascending.
    std::vector<int> rest(int p) const {
        std::vector<int> r;
        for (int v = 1; v <= p; ++v)
            if (v != i && v != j && !std::binary_search(S.begin(), S.end(), v)) r.push_back(v);
        return r;
    }

    std::uint32_t mask() const {
        std::uint32_t m = 0;
        for (int s : S) m |= 1u << (s - 1);
        return m;
    }

    std::string to_string() const {
        std::string s = std::to_string(i) + "," + std::to_string(j) + "|";
        if (S.empty()) return s + "-";
        for (std::size_t k = 0; k < S.size(); ++k) s += (k ? "," : "") + std::to_string(S[k]);
        return s;
    }

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple& a, const Triple& b) {
        if (auto c = a.i <=> b.i; c != 0) return c;
        if (auto c = a.j <=> b.j; c != 0) return c;
        return a.mask() <=> b.mask();
    }
};

/// Comma-separated node list; "-" or "" is the empty set.
inline std::vector<int> parse_node_set(const std::string& text) {
    std::vector<int> out;
    if (text.empty() || text == "-") return out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (tok.empty() || used != tok.size()) throw InputError("bad node list '" + text + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

inline int parse_node(const std::string& text) {
    auto v = parse_node_set(text);
    if (v.size() != 1) throw InputError("bad node '" + text + "'");
    return v.front();
}

/// All DAGs whose edges respect the order 1 < 2 < ... < p (2^(p choose 2) of them).
inline std::vector<Dag> enumerate_ordered_dags(int p) {
    std::vector<Edge> pairs;
    for (int i = 1; i <= p; ++i)
        for (int j = i + 1; j <= p; ++j) pairs.emplace_back(i, j);
    if (pairs.size() > 20) throw InputError("enumerate_ordered_dags: p too large");
    std::vector<Dag> out;
    for (std::uint32_t m = 0; m < (1u << pairs.size()); ++m) {
        std::vector<Edge> e;
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (m & (1u << k)) e.push_back(pairs[k]);
        out.emplace_back(p, std::move(e));
    }
    return out;
}

/// One representative per isomorphism class, by exhaustive permutation
/// minimization of the edge list.
inline std::vector<Dag> enumerate_unlabeled_dags(int p) {
    if (p > 6) throw InputError("enumerate_unlabeled_dags: p too large");
    std::set<std::vector<Edge>> seen;
    std::vector<Dag> out;
    std::vector<int> perm(p);
    for (const Dag& d : enumerate_ordered_dags(p)) {
        std::iota(perm.begin(), perm.end(), 1);
        std::vector<Edge> best;
        bool first = true;
        do {
            std::vector<Edge> e;
            for (auto [i, j] : d.edges()) e.emplace_back(perm[i - 1], perm[j - 1]);
            std::sort(e.begin(), e.end());
            if (first || e < best) {
                best = std::move(e);
                first = false;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (seen.insert(best).second) out.push_back(d);
    }
    return out;
}

} // namespace pcorr
