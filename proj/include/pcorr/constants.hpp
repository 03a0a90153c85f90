#pragma once

// Leading constants C of V(lambda) ~ C lambda^ell (-ln lambda)^(m-1).

#include "pcorr/graph_model.hpp"
#include "pcorr/rlct.hpp"
#include "pcorr/space.hpp"
#include "pcorr/volume.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <functional>
#include <map>
#include <mutex>

namespace pcorr {

using PointFn = std::function<double(std::span<const double>)>;

struct QuadratureSpec {
    unsigned order = 64;         // Gauss-Legendre nodes per dimension, dims <= 2
    double tol = 1e-8;           // Gauss-Kronrod absolute tolerance, dims 3-4
    std::size_t mc_n = 1000000;  // dims > 4
    std::uint64_t seed = 1;
};

struct Integral {
    double value = 0.0;
    double error = 0.0;  // quadrature error estimate or MC std_err
    std::string method;
};

struct ConstantResult {
    std::string name;
    double value = 0.0;
    std::string method;
    double tol_or_stderr = 0.0;

    nlohmann::json to_json() const {
        return {{"name", name}, {"value", value}, {"method", method}, {"tol_or_stderr", tol_or_stderr},
                {"version", kVersion}};
    }
};

/// Nodes and weights on [-1, 1].
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(unsigned order) {
    if (order < 2) throw InputError("quadrature order must be at least 2");
    static std::mutex mu;
    static std::map<unsigned, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    std::vector<double> x, w;
    for (double z : boost::math::legendre_p_zeros<double>(static_cast<int>(order))) {
        const double d = boost::math::legendre_p_prime(static_cast<int>(order), z);
        const double wz = 2.0 / ((1 - z * z) * d * d);
        x.push_back(z);
        w.push_back(wz);
        if (z != 0.0) {
            x.push_back(-z);
            w.push_back(wz);
        }
    }
    return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace detail {

inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

inline double nested_kronrod(const PointFn& fn, const std::vector<double>& lo, const std::vector<double>& hi,
                             std::vector<double>& x, std::size_t k, double tol, double& err) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    if (k + 1 == lo.size()) {
        double e = 0.0;
        const double v = GK::integrate(
            [&](double t) {
                x[k] = t;
                return fn(x);
            },
            lo[k], hi[k], 10, tol, &e);
        err += e;
        return v;
    }
    double e = 0.0;
    const double v = GK::integrate(
        [&](double t) {
            x[k] = t;
            std::vector<double> inner = x;
            return nested_kronrod(fn, lo, hi, inner, k + 1, tol, err);
        },
        lo[k], hi[k], 10, tol, &e);
    err += e;
    return v;
}

} // namespace detail

/// Integral of fn (Lebesgue measure) over the box [lo, hi].
inline Integral integrate_box(const PointFn& fn, const std::vector<double>& lo, const std::vector<double>& hi,
                              const QuadratureSpec& spec = {}) {
    if (lo.size() != hi.size()) throw InputError("integrate_box: bounds differ in length");
    if (!(spec.tol > 0)) throw InputError("quadrature tolerance must be positive");
    const std::size_t d = lo.size();
    for (std::size_t k = 0; k < d; ++k)
        if (!(hi[k] > lo[k])) throw InputError("integrate_box: empty interval");
    if (d == 0) return {fn({}), 0.0, "point"};
    if (d <= 2) {
        const auto& [z, w] = gauss_legendre(spec.order);
        const std::size_t q = z.size();
        std::vector<double> terms;
        std::vector<double> x(d);
        const std::size_t total = d == 1 ? q : q * q;
        terms.reserve(total);
        for (std::size_t idx = 0; idx < total; ++idx) {
            double wt = 1.0;
            std::size_t r = idx;
            for (std::size_t k = 0; k < d; ++k) {
                const std::size_t a = r % q;
                r /= q;
                const double half = 0.5 * (hi[k] - lo[k]);
                x[k] = lo[k] + half * (z[a] + 1);
                wt *= half * w[a];
            }
            terms.push_back(wt * fn(x));
        }
        const double v = detail::pairwise_sum(terms);
        if (!std::isfinite(v)) throw NumericalError("integrate_box: non-finite quadrature sum");
        return {v, 0.0, "gauss-legendre-" + std::to_string(spec.order)};
    }
    if (d <= 4) {
        std::vector<double> x(d);
        double err = 0.0;
        const double v = detail::nested_kronrod(fn, lo, hi, x, 0, spec.tol, err);
        if (!std::isfinite(v)) throw NumericalError("integrate_box: non-finite quadrature sum");
        return {v, std::max(err, spec.tol), "gauss-kronrod-15"};
    }
    double vol = 1.0;
    for (std::size_t k = 0; k < d; ++k) vol *= hi[k] - lo[k];
    Rng rng(spec.seed);
    std::vector<double> x(d);
    double s = 0.0, s2 = 0.0;
    for (std::size_t n = 0; n < spec.mc_n; ++n) {
        for (std::size_t k = 0; k < d; ++k) x[k] = rng.uniform(lo[k], hi[k]);
        const double v = fn(x);
        s += v;
        s2 += v * v;
    }
    const double N = static_cast<double>(spec.mc_n), mean = s / N;
    const double var = std::max(s2 / N - mean * mean, 0.0);
    return {vol * mean, vol * std::sqrt(var / N), "monte-carlo"};
}

/// C = pi^(d/2) / (2^d Gamma(d/2 + 1)) for the ball sum w_i^2 <= lambda in [-1,1]^d.
inline double ball_constant(unsigned d) {
    if (d < 1) throw InputError("ball_constant: d must be at least 1");
    return std::pow(std::numbers::pi, d / 2.0) / (std::pow(2.0, d) * std::tgamma(d / 2.0 + 1));
}

enum class TreeKind { Chain, Star };

inline Rational tree_constant_exact(TreeKind kind, int p) {
    if (p < 3) throw InputError("tree_constants: p must be at least 3");
    long long v = 1;
    if (kind == TreeKind::Chain) {
        for (int k = 2; k <= p - 2; ++k) v *= k;
        return Rational(1, v);
    }
    return Rational(static_cast<long long>(p) * (p - 1) * (p - 2) / 6);
}

inline double tree_constants(TreeKind kind, int p) {
    return boost::rational_cast<double>(tree_constant_exact(kind, p));
}

/// Root of h on [a, b]: Newton from the midpoint, bisection on a sign change otherwise.
inline std::optional<double> solve_on_interval(const std::function<double(double)>& h,
                                               const std::function<double(double)>& dh, double a, double b) {
    const double ha = h(a), hb = h(b);
    if (ha == 0) return a;
    if (hb == 0) return b;
    double t = 0.5 * (a + b);
    for (int it = 0; it < 60; ++it) {
        const double v = h(t), dv = dh(t);
        if (v == 0) return t;
        if (dv == 0 || !std::isfinite(dv)) break;
        const double next = t - v / dv;
        if (!(next >= a && next <= b)) break;
        if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) return next;
        t = next;
    }
    if (std::signbit(ha) == std::signbit(hb)) return std::nullopt;
    double lo = a, hi = b, hlo = ha;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi), hm = h(mid);
        if (hm == 0) return mid;
        if (std::signbit(hm) == std::signbit(hlo)) {
            lo = mid;
            hlo = hm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// f = num / denom with denom > 0 on the box; the hypersurface is {num = 0}.
/// C = 2 * integral over W of phi / |df/d solve_var| at the root.
inline Integral smooth_constant(const Poly& num, const PointFn& denom, const PointFn& phi, const std::vector<double>& lo,
                                const std::vector<double>& hi, std::size_t solve_var, const QuadratureSpec& spec = {}) {
    const std::size_t d = num.arity();
    if (lo.size() != d || hi.size() != d) throw InputError("smooth_constant: box does not match the ring");
    if (solve_var >= d) throw InputError("smooth_constant: solve variable out of range");
    const CompiledPoly F(num), dF(partial(num, VarId{solve_var}));
    std::vector<double> wlo, whi;
    for (std::size_t k = 0; k < d; ++k)
        if (k != solve_var) {
            wlo.push_back(lo[k]);
            whi.push_back(hi[k]);
        }
    auto integrand = [&](std::span<const double> w) {
        std::vector<double> x(d);
        for (std::size_t k = 0, r = 0; k < d; ++k)
            if (k != solve_var) x[k] = w[r++];
        auto h = [&](double t) {
            x[solve_var] = t;
            return F(x);
        };
        auto dh = [&](double t) {
            x[solve_var] = t;
            return dF(x);
        };
        const auto root = solve_on_interval(h, dh, lo[solve_var], hi[solve_var]);
        if (!root) return 0.0;
        x[solve_var] = *root;
        const double g = std::abs(dF(x));
        if (!(g > 0)) {
            std::string at;
            for (double v : x) at += (at.empty() ? "" : ",") + std::to_string(v);
            throw NumericalError("smooth_constant: vanishing derivative at node (" + at + ")");
        }
        return phi(x) * denom(x) / g;
    };
    auto r = integrate_box(integrand, wlo, whi, spec);
    r.value *= 2;
    r.error *= 2;
    return r;
}

/// f = w^kappa * g with g > 0. The m coordinates with kappa = 1/ell span L^perp.
inline Integral monomial_constant(const std::vector<unsigned>& kappa, const PointFn& g, const PointFn& phi,
                                  const std::vector<double>& lo, const std::vector<double>& hi, const RlctPair& pair,
                                  const QuadratureSpec& spec = {}) {
    const std::size_t d = kappa.size();
    if (lo.size() != d || hi.size() != d) throw InputError("monomial_constant: box does not match kappa");
    if (pair.is_infinite()) throw InputError("monomial_constant: infinite pair");
    const Rational ell = pair.ell();
    const unsigned m = pair.m();
    std::vector<std::size_t> lead, rest;
    for (std::size_t k = 0; k < d; ++k) {
        if (Rational(kappa[k]) * ell == Rational(1) && lead.size() < m)
            lead.push_back(k);
        else
            rest.push_back(k);
    }
    if (lead.size() != m)
        throw InputError("monomial_constant: kappa has fewer than m exponents equal to 1/ell");
    for (std::size_t k : lead)
        if (!(lo[k] < 0 && hi[k] > 0)) throw InputError("monomial_constant: box does not straddle L");
    // Exponent a_k = ell * kappa_k of |w_k|^(-a_k) on the slice.
    std::vector<Rational> a;
    for (std::size_t k : rest) {
        a.push_back(Rational(kappa[k]) * ell);
        if (a.back() >= Rational(1) && lo[k] <= 0 && hi[k] >= 0) throw NumericalError("monomial_constant: non-integrable tail");
    }
    const double elld = boost::rational_cast<double>(ell);
    // Split each singular slice coordinate at 0 and substitute w = +-u^q, q = 1/(1-a).
    struct Piece {
        double sign, q, lo, hi;
    };
    std::vector<std::vector<Piece>> pieces(rest.size());
    for (std::size_t r = 0; r < rest.size(); ++r) {
        const std::size_t k = rest[r];
        if (a[r] == Rational(0) || lo[k] > 0 || hi[k] < 0) {
            pieces[r].push_back({1.0, 1.0, lo[k], hi[k]});
            continue;
        }
        const double q = 1.0 / (1.0 - boost::rational_cast<double>(a[r]));
        if (hi[k] > 0) pieces[r].push_back({1.0, q, 0.0, std::pow(hi[k], 1.0 / q)});
        if (lo[k] < 0) pieces[r].push_back({-1.0, q, 0.0, std::pow(-lo[k], 1.0 / q)});
    }
    double total = 0.0, err = 0.0;
    std::string method = "point";
    std::vector<std::size_t> choice(rest.size(), 0);
    for (;;) {
        std::vector<double> plo, phi_;
        for (std::size_t r = 0; r < rest.size(); ++r) {
            plo.push_back(pieces[r][choice[r]].lo);
            phi_.push_back(pieces[r][choice[r]].hi);
        }
        auto integrand = [&](std::span<const double> u) {
            std::vector<double> x(d, 0.0);
            double jac = 1.0;
            for (std::size_t r = 0; r < rest.size(); ++r) {
                const Piece& pc = pieces[r][choice[r]];
                const double ar = boost::rational_cast<double>(a[r]);
                if (pc.q == 1.0) {
                    x[rest[r]] = u[r];
                    if (ar != 0) jac *= std::pow(std::abs(u[r]), -ar);
                } else {
                    // |w|^(-a) dw = q du after substitution.
                    x[rest[r]] = pc.sign * std::pow(u[r], pc.q);
                    jac *= pc.q;
                }
            }
            return jac * std::pow(g(x), -elld) * phi(x);
        };
        auto r = integrate_box(integrand, plo, phi_, spec);
        total += r.value;
        err += r.error;
        method = r.method;
        std::size_t r2 = 0;
        while (r2 < rest.size() && ++choice[r2] == pieces[r2].size()) choice[r2++] = 0;
        if (r2 == rest.size()) break;
    }
    // (2 ell)^m / (ell (m-1)!)
    Rational pre(1);
    for (unsigned k = 0; k < m; ++k) pre *= 2 * ell;
    pre /= ell;
    for (unsigned k = 2; k < m; ++k) pre /= static_cast<long long>(k);
    const double p = boost::rational_cast<double>(pre);
    return {p * total, p * err, method};
}

/// Integral of h(|x|^2) against the uniform probability measure on the unit k-ball.
inline Integral radial_ball_integral(const std::function<double(double)>& h, unsigned k, const QuadratureSpec& spec = {}) {
    if (k < 1) throw InputError("radial_ball_integral: dimension must be at least 1");
    auto fn = [&](std::span<const double> r) { return h(r[0] * r[0]) * k * std::pow(r[0], static_cast<double>(k - 1)); };
    auto res = integrate_box(fn, {0.0}, {1.0}, spec);
    res.method = "radial-" + res.method;
    return res;
}

/// corr(1,2|4..p) in Tripart_{p,p-3} on [-1,1]^2 x unit ball: C = 1 + int 1/g = 2 + 2/(p-5).
inline Integral tripart_ball_constant(int p, const QuadratureSpec& spec = {}) {
    if (p < 6) throw InputError("tripart_ball_constant: p must be at least 6");
    // Slice prefactor (2*1)^2 / 1 times phi = 1/4 on the (a13, a23) square.
    auto r = radial_ball_integral([](double g) { return (1 + g) / g; }, static_cast<unsigned>(p - 3), spec);
    return r;
}

/// The coefficient-free double integral behind the K_3 statement 1 _||_ 2 | 3.
inline Integral k3_transversal_integral(const QuadratureSpec& spec = {}) {
    auto fn = [](std::span<const double> x) {
        const double a13 = x[0], a23 = x[1];
        return std::sqrt(1 + a23 * a23) * std::sqrt(1 + a13 * a13 + a13 * a13 * a23 * a23);
    };
    return integrate_box(fn, {-1, -1}, {1, 1}, spec);
}

/// Smooth-case constant of corr(i,j|S) for a DAG with uniform prior on the cube.
inline Integral smooth_tube_constant(const Dag& dag, const Triple& t, const ParamSpace& space, std::size_t solve_var,
                                     const QuadratureSpec& spec = {}) {
    if (!space.balls().empty()) throw InputError("smooth_tube_constant: only box parameter spaces are supported");
    const auto c = correlation_polys(dag, t);
    const CompiledPoly di(c.den_i), dj(c.den_j);
    const double phi = 1.0 / space.measure();
    return smooth_constant(
        c.numerator, [&](std::span<const double> x) { return std::sqrt(di(x) * dj(x)); },
        [phi](std::span<const double>) { return phi; }, space.lower(), space.upper(), solve_var, spec);
}

/// Monomial-case constant of corr(i,j|S) with uniform prior on the cube.
inline Integral monomial_tube_constant(const Dag& dag, const Triple& t, const ParamSpace& space, const RlctPair& pair,
                                       const QuadratureSpec& spec = {}) {
    if (!space.balls().empty()) throw InputError("monomial_tube_constant: only box parameter spaces are supported");
    const auto c = correlation_polys(dag, t);
    const auto shape = monomial_content(c.numerator);
    const CompiledPoly cof(shape.cofactor), di(c.den_i), dj(c.den_j);
    const double phi = 1.0 / space.measure();
    std::vector<unsigned> kappa(shape.kappa.begin(), shape.kappa.end());
    return monomial_constant(
        kappa, [&](std::span<const double> x) { return std::abs(cof(x)) / std::sqrt(di(x) * dj(x)); },
        [phi](std::span<const double>) { return phi; }, space.lower(), space.upper(), pair, spec);
}

/// Named constants reported by the CLI.
inline std::vector<std::string> constant_names() {
    return {"k3-1.2g3", "k3-1.2g3-tube", "chain", "star", "star-tube", "tripart-ball", "ball", "xy", "x2y3"};
}

inline ConstantResult named_constant(const std::string& name, int p = 6, const QuadratureSpec& spec = {}) {
    ConstantResult out;
    out.name = name;
    auto take = [&](const Integral& r) {
        out.value = r.value;
        out.method = r.method;
        out.tol_or_stderr = r.error > 0 ? r.error : spec.tol;
    };
    if (name == "k3-1.2g3-tube") {
        Dag k3 = Dag::make_family(Family::Complete, 3);
        const auto a12 = k3.ring()->find("a12");
        take(smooth_tube_constant(k3, Triple(1, 2, {3}), ParamSpace::cube(3), a12->index, spec));
    } else if (name == "k3-1.2g3") {
        take(k3_transversal_integral(spec));
    } else if (name == "chain" || name == "star") {
        out.name = name + std::to_string(p);
        out.value = tree_constants(name == "chain" ? TreeKind::Chain : TreeKind::Star, p);
        out.method = "closed-form";
    } else if (name == "star-tube") {
        out.name = "star" + std::to_string(p) + "-tube";
        Dag s = Dag::make_family(Family::Star, p);
        std::vector<int> S;
        for (int k = 4; k <= p; ++k) S.push_back(k);
        take(monomial_tube_constant(s, Triple(2, 3, S), ParamSpace::cube(p - 1), RlctPair(1, 1, 2), spec));
    } else if (name == "tripart-ball") {
        out.name = "tripart" + std::to_string(p) + "-ball";
        take(tripart_ball_constant(p, spec));
    } else if (name == "ball") {
        out.name = "ball" + std::to_string(p);
        out.value = ball_constant(static_cast<unsigned>(p));
        out.method = "closed-form";
    } else if (name == "xy" || name == "x2y3") {
        const bool xy = name == "xy";
        auto phi = [](std::span<const double>) { return 0.25; };
        auto one = [](std::span<const double>) { return 1.0; };
        take(monomial_constant(xy ? std::vector<unsigned>{1, 1} : std::vector<unsigned>{2, 3}, one, phi, {-1, -1},
                               {1, 1}, xy ? RlctPair(1, 1, 2) : RlctPair(1, 3, 1), spec));
    } else {
        throw InputError("unknown constant '" + name + "'");
    }
    return out;
}

} // namespace pcorr
