#pragma once

// Exact sparse multivariate polynomials with arbitrary-precision integer
// coefficients over a named variable ring.

#include "pcorr/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pcorr {

using Integer = boost::multiprecision::cpp_int;

/// Dense index of a variable inside a Ring.
struct VarId {
    std::size_t index = 0;
    friend bool operator==(VarId, VarId) = default;
    friend auto operator<=>(VarId, VarId) = default;
};

/// Immutable list of variable names; the index of a name is its VarId.
class Ring {
  public:
    explicit Ring(std::vector<std::string> names) : names_(std::move(names)) {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (!lookup_.emplace(names_[i], i).second)
                throw InputError("duplicate variable name '" + names_[i] + "'");
        }
    }

    std::size_t arity() const { return names_.size(); }
    const std::string& name(VarId v) const { return names_.at(v.index); }
    const std::vector<std::string>& names() const { return names_; }

    std::optional<VarId> find(std::string_view name) const {
        auto it = lookup_.find(std::string(name));
        if (it == lookup_.end()) return std::nullopt;
        return VarId{it->second};
    }

    VarId var(std::string_view name) const {
        if (auto v = find(name)) return *v;
        throw InputError("unknown variable '" + std::string(name) + "'");
    }

    bool operator==(const Ring& other) const { return names_ == other.names_; }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

using RingPtr = std::shared_ptr<const Ring>;

inline RingPtr make_ring(std::vector<std::string> names) {
    return std::make_shared<const Ring>(std::move(names));
}

inline bool same_ring(const RingPtr& a, const RingPtr& b) {
    return a == b || (a && b && *a == *b);
}

using Exponents = std::vector<std::uint32_t>;

inline std::uint32_t total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), std::uint32_t{0});
}

/// Graded-lex "greater than": higher total degree first, then lex with
/// variable 0 most significant.
struct GrlexGreater {
    bool operator()(const Exponents& a, const Exponents& b) const {
        auto da = total_degree(a), db = total_degree(b);
        if (da != db) return da > db;
        return a > b;
    }
};

class Poly;

/// Per-variable minimum exponent (kappa) and the quotient by that monomial.
struct MonomialShape;

class Poly {
  public:
    using TermMap = std::map<Exponents, Integer, GrlexGreater>;

    Poly() = default;
    explicit Poly(RingPtr ring) : ring_(std::move(ring)) {}

    static Poly constant(RingPtr ring, const Integer& c) {
        Poly p(ring);
        p.add_term(Exponents(p.arity(), 0), c);
        return p;
    }

    static Poly variable(RingPtr ring, VarId v) {
        Poly p(ring);
        Exponents e(p.arity(), 0);
        e.at(v.index) = 1;
        p.add_term(std::move(e), 1);
        return p;
    }

    static Poly variable(RingPtr ring, std::string_view name) {
        auto v = ring->var(name);
        return variable(std::move(ring), v);
    }

    static Poly monomial(RingPtr ring, Exponents e, const Integer& c = 1) {
        Poly p(ring);
        if (e.size() != p.arity()) throw InputError("exponent vector has wrong length");
        p.add_term(std::move(e), c);
        return p;
    }

    const RingPtr& ring() const { return ring_; }
    std::size_t arity() const { return ring_ ? ring_->arity() : 0; }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && pcorr::total_degree(terms_.begin()->first) == 0);
    }

    Integer constant_term() const {
        auto it = terms_.find(Exponents(arity(), 0));
        return it == terms_.end() ? Integer(0) : it->second;
    }

    std::uint32_t total_degree() const {
        return terms_.empty() ? 0 : pcorr::total_degree(terms_.begin()->first);
    }

    std::uint32_t degree(VarId v) const {
        std::uint32_t d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e[v.index]);
        return d;
    }

    bool involves(VarId v) const { return degree(v) > 0; }

    /// Adds c·x^e, pruning the term if it cancels.
    void add_term(Exponents e, const Integer& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(std::move(e), c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Poly operator-() const {
        Poly r(ring_);
        for (const auto& [e, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), e, -c);
        return r;
    }

    Poly& operator+=(const Poly& q) {
        check_ring(q);
        for (const auto& [e, c] : q.terms_) add_term(e, c);
        return *this;
    }

    Poly& operator-=(const Poly& q) {
        check_ring(q);
        for (const auto& [e, c] : q.terms_) add_term(e, -c);
        return *this;
    }

    friend Poly operator+(Poly p, const Poly& q) { return p += q; }
    friend Poly operator-(Poly p, const Poly& q) { return p -= q; }

    friend Poly operator*(const Poly& p, const Poly& q) {
        p.check_ring(q);
        Poly r(p.ring_);
        if (p.is_zero() || q.is_zero()) return r;
        const std::size_t n = p.arity();
        Exponents e(n);
        for (const auto& [ea, ca] : p.terms_) {
            for (const auto& [eb, cb] : q.terms_) {
                for (std::size_t k = 0; k < n; ++k) e[k] = ea[k] + eb[k];
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }

    Poly& operator*=(const Poly& q) { return *this = *this * q; }

    Poly scaled(const Integer& c) const {
        Poly r(ring_);
        if (c == 0) return r;
        for (const auto& [e, v] : terms_) r.terms_.emplace_hint(r.terms_.end(), e, v * c);
        return r;
    }

    Poly pow(unsigned k) const {
        Poly result = constant(ring_, 1);
        Poly base = *this;
        while (k) {
            if (k & 1u) result *= base;
            k >>= 1u;
            if (k) base *= base;
        }
        return result;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        return same_ring(a.ring_, b.ring_) && a.terms_ == b.terms_;
    }

    void check_ring(const Poly& q) const {
        if (!same_ring(ring_, q.ring_)) throw InputError("ring mismatch between polynomials");
    }

  private:
    RingPtr ring_;
    TermMap terms_;
};

struct MonomialShape {
    Exponents kappa;
    Poly cofactor;
};

/// Formal partial derivative.
inline Poly partial(const Poly& p, VarId v) {
    if (v.index >= p.arity()) throw InputError("partial: unknown variable");
    Poly r(p.ring());
    for (const auto& [e, c] : p.terms()) {
        if (e[v.index] == 0) continue;
        Exponents d = e;
        d[v.index] -= 1;
        r.add_term(std::move(d), c * e[v.index]);
    }
    return r;
}

inline Poly partial(const Poly& p, std::string_view name) { return partial(p, p.ring()->var(name)); }

namespace detail {

inline double horner(const std::vector<std::pair<const Exponents*, double>>& terms,
                     std::size_t var, std::span<const double> x) {
    if (terms.empty()) return 0.0;
    if (var == x.size()) {
        double s = 0.0;
        for (const auto& t : terms) s += t.second;
        return s;
    }
    // Group by exponent of `var`, highest first, and run Horner in x[var].
    std::map<std::uint32_t, std::vector<std::pair<const Exponents*, double>>, std::greater<>> groups;
    for (const auto& t : terms) groups[(*t.first)[var]].push_back(t);
    double acc = 0.0;
    std::uint32_t prev = groups.begin()->first;
    for (const auto& [deg, group] : groups) {
        for (std::uint32_t k = deg; k < prev; ++k) acc *= x[var];
        acc += horner(group, var + 1, x);
        prev = deg;
    }
    for (std::uint32_t k = 0; k < prev; ++k) acc *= x[var];
    return acc;
}

} // namespace detail

/// Floating-point evaluation with per-variable Horner grouping.
inline double eval(const Poly& p, std::span<const double> point) {
    if (point.size() != p.arity())
        throw InputError("eval: point has " + std::to_string(point.size()) + " coordinates, ring has " +
                         std::to_string(p.arity()));
    std::vector<std::pair<const Exponents*, double>> terms;
    terms.reserve(p.size());
    for (const auto& [e, c] : p.terms()) terms.emplace_back(&e, c.convert_to<double>());
    return detail::horner(terms, 0, point);
}

/// Simultaneous substitution: variable k of p's ring is replaced by images[k].
/// All images must share one target ring.
inline Poly substitute(const Poly& p, std::span<const Poly> images) {
    if (images.size() != p.arity()) throw InputError("substitute: need one image per variable");
    if (images.empty()) return p;
    const RingPtr& target = images.front().ring();
    for (const auto& img : images)
        if (!same_ring(img.ring(), target)) throw InputError("substitute: images live in different rings");

    std::vector<std::vector<Poly>> powers(images.size());
    auto power = [&](std::size_t var, std::uint32_t k) -> const Poly& {
        auto& cache = powers[var];
        if (cache.empty()) cache.push_back(Poly::constant(target, 1));
        while (cache.size() <= k) cache.push_back(cache.back() * images[var]);
        return cache[k];
    };

    Poly result(target);
    for (const auto& [e, c] : p.terms()) {
        Poly term = Poly::constant(target, c);
        for (std::size_t v = 0; v < e.size(); ++v)
            if (e[v]) term *= power(v, e[v]);
        result += term;
    }
    return result;
}

/// Moves p into a ring whose variable names are a superset of p's.
inline Poly embed(const Poly& p, const RingPtr& target) {
    Poly r(target);
    std::vector<std::size_t> map(p.arity());
    for (std::size_t i = 0; i < p.arity(); ++i) map[i] = target->var(p.ring()->name(VarId{i})).index;
    for (const auto& [e, c] : p.terms()) {
        Exponents t(target->arity(), 0);
        for (std::size_t i = 0; i < e.size(); ++i) t[map[i]] = e[i];
        r.add_term(std::move(t), c);
    }
    return r;
}

inline MonomialShape monomial_content(const Poly& p) {
    if (p.is_zero()) throw InputError("monomial_content of the zero polynomial");
    Exponents kappa = p.terms().begin()->first;
    for (const auto& [e, c] : p.terms())
        for (std::size_t k = 0; k < kappa.size(); ++k) kappa[k] = std::min(kappa[k], e[k]);
    Poly cof(p.ring());
    for (const auto& [e, c] : p.terms()) {
        Exponents d = e;
        for (std::size_t k = 0; k < d.size(); ++k) d[k] -= kappa[k];
        cof.add_term(std::move(d), c);
    }
    return {std::move(kappa), std::move(cof)};
}

inline Poly monomial_of(const RingPtr& ring, const Exponents& e) { return Poly::monomial(ring, e, 1); }

/// Exact division; throws if `den` does not divide `num`.
inline Poly divide_exact(const Poly& num, const Poly& den) {
    num.check_ring(den);
    if (den.is_zero()) throw InputError("division by the zero polynomial");
    if (den.is_constant()) {
        const Integer& d = den.terms().begin()->second;
        Poly q(num.ring());
        for (const auto& [e, c] : num.terms()) {
            if (c % d != 0) throw InputError("divide_exact: coefficient not divisible");
            q.add_term(e, c / d);
        }
        return q;
    }
    const auto& [lead_e, lead_c] = *den.terms().begin();
    Poly rem = num;
    Poly quot(num.ring());
    while (!rem.is_zero()) {
        const auto& [e, c] = *rem.terms().begin();
        Exponents t(e.size());
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (e[k] < lead_e[k]) throw InputError("divide_exact: remainder is nonzero");
            t[k] = e[k] - lead_e[k];
        }
        if (c % lead_c != 0) throw InputError("divide_exact: coefficient not divisible");
        Poly step = Poly::monomial(num.ring(), std::move(t), c / lead_c);
        quot += step;
        rem -= step * den;
    }
    return quot;
}

// ---------------------------------------------------------------------------
// Canonical text rendering and parsing.

inline std::string monomial_string(const Ring& ring, const Exponents& e) {
    std::string s;
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (!e[k]) continue;
        if (!s.empty()) s += '*';
        s += ring.name(VarId{k});
        if (e[k] > 1) s += '^' + std::to_string(e[k]);
    }
    return s;
}

/// Terms in descending graded-lex order, `*` products and `^` powers,
/// separated by " + " / " - ".
inline std::string to_string(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        Integer a = abs(c);
        if (first) {
            if (c < 0) out += '-';
        } else {
            out += c < 0 ? " - " : " + ";
        }
        first = false;
        std::string mono = monomial_string(*p.ring(), e);
        if (mono.empty()) {
            out += a.str();
        } else if (a == 1) {
            out += mono;
        } else {
            out += a.str() + "*" + mono;
        }
    }
    return out;
}

namespace detail {

class PolyParser {
  public:
    PolyParser(std::string_view text, RingPtr ring) : s_(text), ring_(std::move(ring)) {}

    Poly parse() {
        Poly p = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return p;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("polynomial parse error at column " + std::to_string(pos_ + 1) + ": " + what + " in '" +
                         std::string(s_) + "'");
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Poly expr() {
        Poly acc = term();
        for (;;) {
            if (accept('+')) acc += term();
            else if (accept('-')) acc -= term();
            else return acc;
        }
    }

    Poly term() {
        Poly acc = factor();
        while (accept('*')) acc *= factor();
        return acc;
    }

    Poly factor() {
        if (accept('-')) return -factor();
        if (accept('+')) return factor();
        Poly base = atom();
        if (accept('^')) {
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected exponent");
            base = base.pow(static_cast<unsigned>(std::stoul(std::string(s_.substr(start, pos_ - start)))));
        }
        return base;
    }

    Poly atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Poly inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return Poly::constant(ring_, Integer(std::string(s_.substr(start, pos_ - start))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            auto name = s_.substr(start, pos_ - start);
            auto v = ring_->find(name);
            if (!v) fail("unknown variable '" + std::string(name) + "'");
            return Poly::variable(ring_, *v);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view s_;
    RingPtr ring_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Poly parse_poly(std::string_view text, const RingPtr& ring) {
    return detail::PolyParser(text, ring).parse();
}

/// All identifiers appearing in `text`, sorted and deduplicated.
inline std::vector<std::string> identifiers_in(std::string_view text) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < text.size();) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isalpha(c) || c == '_') {
            std::size_t start = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
            ids.emplace_back(text.substr(start, i - start));
        } else {
            ++i;
        }
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

/// Parses `text` in a fresh ring made of its identifiers.
inline Poly parse_poly(std::string_view text) { return parse_poly(text, make_ring(identifiers_in(text))); }

} // namespace pcorr
