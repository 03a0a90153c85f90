#pragma once

// Coordinate-subspace blowups: charts, pullbacks, normal-crossing checks and
// RLCT assembly over the charts of a plan.

#include "pcorr/rlct.hpp"
#include "pcorr/singular.hpp"

#include "json.hpp"

#include <istream>
#include <optional>
#include <sstream>

namespace pcorr {

// ---------------------------------------------------------------------------
// Plans.

struct PlanStep {
    enum Kind { Center, Shift } kind = Center;
    std::vector<std::string> center;  // empty with origin = true means all variables
    bool origin = false;
    std::string var;                  // Shift: var := expr
    std::string expr;
};

struct BlowupPlan {
    std::vector<PlanStep> steps;

    /// Lines `center v1 v2 ...`, `center origin` or `shift var = <poly>`;
    /// `#` starts a comment.
    static BlowupPlan parse(std::istream& in) {
        BlowupPlan plan;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            std::istringstream ls(line);
            std::string word;
            if (!(ls >> word)) continue;
            PlanStep step;
            if (word == "center") {
                step.kind = PlanStep::Center;
                std::string v;
                while (ls >> v) step.center.push_back(v);
                if (step.center.size() == 1 && step.center.front() == "origin") {
                    step.origin = true;
                    step.center.clear();
                } else if (step.center.size() < 2) {
                    throw InputError("plan line " + std::to_string(lineno) + ": a center needs at least two variables");
                }
            } else if (word == "shift") {
                step.kind = PlanStep::Shift;
                std::string rest;
                std::getline(ls, rest);
                auto eq = rest.find('=');
                if (eq == std::string::npos)
                    throw InputError("plan line " + std::to_string(lineno) + ": expected 'shift var = <poly>'");
                std::istringstream vs(rest.substr(0, eq));
                if (!(vs >> step.var)) throw InputError("plan line " + std::to_string(lineno) + ": missing variable");
                step.expr = rest.substr(eq + 1);
                if (step.expr.find_first_not_of(" \t") == std::string::npos)
                    throw InputError("plan line " + std::to_string(lineno) + ": missing expression");
            } else {
                throw InputError("plan line " + std::to_string(lineno) + ": unknown directive '" + word + "'");
            }
            plan.steps.push_back(std::move(step));
        }
        if (plan.steps.empty()) throw InputError("empty blowup plan");
        return plan;
    }

    static BlowupPlan parse(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }
};

// ---------------------------------------------------------------------------
// Charts.

struct BlowupChart {
    RingPtr source;
    RingPtr target;
    std::vector<VarId> center;        // in the source ring
    std::size_t slot = 0;             // index into center of the chart variable
    VarId chart_var;                  // in the target ring
    std::vector<Poly> substitution;   // image of each source variable
    unsigned jacobian_exponent = 0;
};

/// One chart per center variable: the slot variable becomes xi, the others
/// v -> xi * v. Jacobian xi^(c-1).
inline std::vector<BlowupChart> blowup_charts(const RingPtr& ring, const std::vector<VarId>& center,
                                              const std::string& xi_name = "xi") {
    if (center.size() < 2) throw InputError("blowup center needs at least two variables");
    for (std::size_t a = 0; a < center.size(); ++a) {
        if (center[a].index >= ring->arity()) throw InputError("blowup center variable out of range");
        for (std::size_t b = a + 1; b < center.size(); ++b)
            if (center[a] == center[b]) throw InputError("repeated blowup center variable");
    }
    std::string xi = xi_name;
    while (ring->find(xi)) xi += "_";
    std::vector<BlowupChart> charts;
    for (std::size_t k = 0; k < center.size(); ++k) {
        BlowupChart c;
        c.source = ring;
        c.center = center;
        c.slot = k;
        std::vector<std::string> names = ring->names();
        names[center[k].index] = xi;
        c.target = make_ring(std::move(names));
        c.chart_var = center[k];
        const Poly xiv = Poly::variable(c.target, c.chart_var);
        for (std::size_t v = 0; v < ring->arity(); ++v) c.substitution.push_back(Poly::variable(c.target, VarId{v}));
        for (std::size_t j = 0; j < center.size(); ++j)
            if (j != k) c.substitution[center[j].index] = xiv * Poly::variable(c.target, center[j]);
        c.jacobian_exponent = static_cast<unsigned>(center.size() - 1);
        charts.push_back(std::move(c));
    }
    return charts;
}

struct ChartResult {
    unsigned exceptional_exponent = 0;
    Poly residual;
    std::optional<RlctPair> rlct;
};

/// f o rho = xi^e * residual with residual not divisible by xi.
inline ChartResult apply_chart(const Poly& f, const BlowupChart& chart) {
    if (!same_ring(f.ring(), chart.source)) throw InputError("apply_chart: polynomial is not in the chart's source ring");
    Poly g = substitute(f, chart.substitution);
    ChartResult r;
    if (g.is_zero()) {
        r.residual = g;
        return r;
    }
    const std::size_t xi = chart.chart_var.index;
    std::uint32_t e = UINT32_MAX;
    for (const auto& [ex, c] : g.terms()) e = std::min(e, ex[xi]);
    Poly res(chart.target);
    for (const auto& [ex, c] : g.terms()) {
        Exponents d = ex;
        d[xi] -= e;
        res.add_term(std::move(d), c);
    }
    r.exceptional_exponent = e;
    r.residual = std::move(res);
    return r;
}

// ---------------------------------------------------------------------------
// Normal crossing.

struct NormalCrossingResult {
    enum Kind { CertifiedNumeric, Counterexample, Inconclusive } kind = Inconclusive;
    std::vector<double> point;
    std::size_t starts = 0;
    double best_residual = INFINITY;
};

inline const char* to_string(NormalCrossingResult::Kind k) {
    switch (k) {
    case NormalCrossingResult::CertifiedNumeric: return "certified_numeric";
    case NormalCrossingResult::Counterexample: return "counterexample";
    case NormalCrossingResult::Inconclusive: return "inconclusive";
    }
    return "?";
}

inline constexpr std::size_t kCertifyingBudget = 100000;

/// Searches for a solution of g = w_i dg/dw_i (i in coord) = dg/dw_j (j not
/// in coord) = 0 in the box. None at a budget of at least 1e5 starts is
/// reported as certified_numeric.
inline NormalCrossingResult normal_crossing_check(const Poly& g, const std::vector<VarId>& coord_vars,
                                                  const ParamSpace& box, std::size_t budget = kCertifyingBudget,
                                                  std::uint64_t seed = 3) {
    std::vector<char> is_coord(g.arity(), 0);
    for (VarId v : coord_vars) {
        if (v.index >= g.arity()) throw InputError("normal_crossing_check: coordinate variable out of range");
        is_coord[v.index] = 1;
    }
    std::vector<Poly> system{g};
    for (std::size_t v = 0; v < g.arity(); ++v) {
        Poly d = partial(g, VarId{v});
        if (is_coord[v]) d *= Poly::variable(g.ring(), VarId{v});
        if (!d.is_zero()) system.push_back(std::move(d));
    }
    NormalCrossingResult res;
    if (g.is_zero()) {
        res.kind = NormalCrossingResult::Counterexample;
        res.point.assign(g.arity(), 0.0);
        res.best_residual = 0.0;
        return res;
    }
    if (g.is_constant()) {
        res.kind = budget >= kCertifyingBudget ? NormalCrossingResult::CertifiedNumeric : NormalCrossingResult::Inconclusive;
        return res;
    }
    SearchOptions opt;
    opt.budget = budget;
    opt.seed = seed;
    opt.max_hits = 1;
    SearchResult sr = ZeroSearch(system, box).run(opt);
    res.starts = sr.starts;
    res.best_residual = sr.best_residual;
    if (!sr.points.empty()) {
        res.kind = NormalCrossingResult::Counterexample;
        res.point = sr.points.front();
    } else {
        res.kind = budget >= kCertifyingBudget ? NormalCrossingResult::CertifiedNumeric : NormalCrossingResult::Inconclusive;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Interval bounds of a polynomial over a box.

inline std::pair<double, double> interval_range(const Poly& h, const ParamSpace& box) {
    auto mul = [](std::pair<double, double> a, std::pair<double, double> b) {
        double c[] = {a.first * b.first, a.first * b.second, a.second * b.first, a.second * b.second};
        return std::pair{*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
    };
    std::pair<double, double> total{0.0, 0.0};
    for (const auto& [e, coef] : h.terms()) {
        const double c = coef.convert_to<double>();
        std::pair<double, double> t{c, c};
        for (std::size_t v = 0; v < e.size(); ++v) {
            if (!e[v]) continue;
            const double lo = box.lo(v), hi = box.hi(v);
            std::pair<double, double> p;
            if (e[v] % 2 == 1) {
                p = {std::pow(lo, e[v]), std::pow(hi, e[v])};
            } else {
                const double a = std::pow(std::abs(lo), e[v]), b = std::pow(std::abs(hi), e[v]);
                p = {(lo <= 0 && hi >= 0) ? 0.0 : std::min(a, b), std::max(a, b)};
            }
            t = mul(t, p);
        }
        total.first += t.first;
        total.second += t.second;
    }
    return total;
}

// ---------------------------------------------------------------------------
// RLCT over a plan.

struct TraceEntry {
    std::string chart_id;
    std::vector<std::string> vars;
    std::vector<unsigned> kappa;
    std::vector<unsigned> tau;
    bool residual_index = false;  // the residual g entered as index 0
    std::string positivity;
    std::string normal_crossing;
    std::string residual;
    RlctPair pair;
};

struct BlowupResult {
    RlctPair pair;
    std::vector<TraceEntry> trace;

    nlohmann::json trace_json() const {
        nlohmann::json charts = nlohmann::json::array();
        for (const auto& t : trace) {
            nlohmann::json k = nlohmann::json::object(), ta = nlohmann::json::object();
            for (std::size_t v = 0; v < t.vars.size(); ++v) {
                if (t.kappa[v]) k[t.vars[v]] = t.kappa[v];
                if (t.tau[v]) ta[t.vars[v]] = t.tau[v];
            }
            charts.push_back({{"chart", t.chart_id},
                              {"kappa", k},
                              {"tau", ta},
                              {"residual", t.residual},
                              {"residual_index", t.residual_index},
                              {"positivity", t.positivity},
                              {"normal_crossing", t.normal_crossing},
                              {"pair", t.pair.to_string()}});
        }
        return {{"pair", pair.to_string()}, {"charts", charts}};
    }
};

struct BlowupOptions {
    std::size_t nc_budget = kCertifyingBudget;
    std::size_t positivity_samples = 20000;
    std::uint64_t seed = 1;
};

namespace detail {

struct ChartState {
    std::string id;
    Poly f;
    Exponents tau;
    ParamSpace box;
    int level = 0;
};

inline void apply_shift(ChartState& s, const PlanStep& step) {
    const RingPtr& ring = s.f.ring();
    auto v = ring->find(step.var);
    if (!v) return;
    for (const auto& id : identifiers_in(step.expr))
        if (!ring->find(id)) return;
    Poly image = parse_poly(step.expr, ring);
    Poly h = Poly::variable(ring, *v) - image;
    if (h.involves(*v)) throw InputError("shift " + step.var + ": expression must be " + step.var + " plus terms free of it");
    if (s.tau[v->index]) throw InputError("shift " + step.var + ": variable carries a Jacobian exponent");
    std::vector<Poly> images;
    for (std::size_t k = 0; k < ring->arity(); ++k) images.push_back(Poly::variable(ring, VarId{k}));
    images[v->index] = image;
    s.f = substitute(s.f, images);
    auto [hlo, hhi] = interval_range(h, s.box);
    const double lo = s.box.lo(v->index) + hlo, hi = s.box.hi(v->index) + hhi;
    s.box.set_bounds(v->index, lo, hi);
    s.id += "[" + step.var + "]";
}

inline std::vector<ChartState> apply_center(const ChartState& s, const PlanStep& step) {
    const RingPtr& ring = s.f.ring();
    std::vector<VarId> center;
    if (step.origin) {
        for (std::size_t k = 0; k < ring->arity(); ++k) center.push_back(VarId{k});
    } else {
        for (const auto& n : step.center) {
            auto v = ring->find(n);
            if (!v) return {s};
            center.push_back(*v);
        }
    }
    auto charts = blowup_charts(ring, center, "xi" + std::to_string(s.level + 1));
    std::vector<ChartState> out;
    for (const auto& c : charts) {
        ChartState n;
        n.level = s.level + 1;
        n.id = s.id + (s.id.empty() ? "" : "/") + ring->name(center[c.slot]);
        ChartResult r = apply_chart(s.f, c);
        Poly xi_pow = Poly::monomial(c.target, [&] {
            Exponents e(c.target->arity(), 0);
            e[c.chart_var.index] = r.exceptional_exponent;
            return e;
        }());
        n.f = r.residual * xi_pow;
        // Prior monomial pushed through the substitution, times xi^(c-1).
        n.tau = s.tau;
        unsigned xi_tau = c.jacobian_exponent;
        for (VarId v : center) xi_tau += s.tau[v.index];
        n.tau[c.chart_var.index] = xi_tau;
        n.box = ParamSpace::cube(c.target->arity());
        for (std::size_t k = 0; k < c.target->arity(); ++k) {
            const bool in_center = std::find(center.begin(), center.end(), VarId{k}) != center.end();
            if (!in_center || k == c.chart_var.index) n.box.set_bounds(k, s.box.lo(k), s.box.hi(k));
        }
        out.push_back(std::move(n));
    }
    return out;
}

inline TraceEntry analyze_chart(const ChartState& s, const BlowupOptions& opt) {
    TraceEntry t;
    t.chart_id = s.id.empty() ? "root" : s.id;
    t.vars = s.f.ring()->names();
    t.tau.assign(s.tau.begin(), s.tau.end());
    if (s.f.is_zero()) throw NeedsBlowupError("chart " + t.chart_id + ": pullback vanishes identically");
    auto shape = monomial_content(s.f);
    t.kappa.assign(shape.kappa.begin(), shape.kappa.end());
    t.residual = to_string(shape.cofactor);
    const std::size_t d = s.f.arity();
    std::vector<bool> active(d);
    for (std::size_t k = 0; k < d; ++k) active[k] = s.box.lo(k) <= 0.0 && s.box.hi(k) >= 0.0;
    auto pos = positivity_check(shape.cofactor, s.box, opt.positivity_samples, opt.seed);
    t.positivity = to_string(pos.kind);
    if (pos.definite()) {
        t.pair = rlct_monomial(t.kappa, t.tau, active);
        return t;
    }
    std::vector<VarId> coord;
    for (std::size_t k = 0; k < d; ++k)
        if (t.kappa[k] || t.tau[k]) coord.push_back(VarId{k});
    auto nc = normal_crossing_check(shape.cofactor, coord, s.box, opt.nc_budget, opt.seed);
    t.normal_crossing = to_string(nc.kind);
    if (nc.kind != NormalCrossingResult::CertifiedNumeric) {
        std::string why = nc.kind == NormalCrossingResult::Counterexample ? "is not normal crossing"
                                                                          : "could not be certified normal crossing";
        throw NeedsBlowupError("chart " + t.chart_id + ": residual " + t.residual + " " + why);
    }
    t.residual_index = true;
    auto kappa = t.kappa, tau = t.tau;
    kappa.push_back(1);
    tau.push_back(0);
    active.push_back(true);
    t.pair = rlct_monomial(kappa, tau, active);
    return t;
}

} // namespace detail

/// RLCT of f over a cube by following the plan through all charts. Prior
/// exponents tau give the initial weight monomial (all zero for a uniform prior).
inline BlowupResult rlct_via_blowup(const Poly& f, const BlowupPlan& plan, const ParamSpace& space,
                                    const Exponents& prior_tau = {}, const BlowupOptions& opt = {}) {
    if (!space.balls().empty()) throw InputError("rlct_via_blowup: ball blocks are not supported");
    if (space.dim() != f.arity()) throw InputError("rlct_via_blowup: space dimension differs from ring arity");
    detail::ChartState root{"", f, prior_tau.empty() ? Exponents(f.arity(), 0) : prior_tau, space, 0};
    if (root.tau.size() != f.arity()) throw InputError("rlct_via_blowup: prior exponents have the wrong length");
    std::vector<detail::ChartState> states{root};
    for (const auto& step : plan.steps) {
        std::vector<detail::ChartState> next;
        for (auto& s : states) {
            if (step.kind == PlanStep::Shift) {
                detail::apply_shift(s, step);
                next.push_back(std::move(s));
            } else {
                for (auto& c : detail::apply_center(s, step)) next.push_back(std::move(c));
            }
        }
        states = std::move(next);
    }
    BlowupResult result;
    for (const auto& s : states) {
        result.trace.push_back(detail::analyze_chart(s, opt));
        if (result.trace.back().pair < result.pair) result.pair = result.trace.back().pair;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Built-in plans for the worked examples.

struct CatalogEntry {
    std::string name;
    int p = 0;
    std::vector<Edge> edges;  // empty for a bare polynomial entry
    Triple triple;
    std::string poly;         // bare polynomial entries only
    std::string plan;
    RlctPair expected;
};

inline const std::vector<CatalogEntry>& blowup_catalog() {
    static const std::vector<CatalogEntry> catalog = {
        {"four-lines", 0, {}, {}, "x*y*(x+y)*(x-y)", "center origin\n", RlctPair(1, 2, 1)},
        {"k4-minus-13", 4, {{1, 2}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}, Triple(1, 3, {4}), "",
         "center a12 a14 a23 a34\n", RlctPair(1, 1, 1)},
        {"tripart5_1", 5, Dag::make_family(Family::Tripart, 5, 1).edges(), Triple(1, 2, {5}), "",
         "center a35 a45\n"
         "shift a13 = a13 - a14*a45\n"
         "shift a23 = a23 - a24*a45\n"
         "shift a14 = a14 - a13*a35\n"
         "shift a24 = a24 - a23*a35\n",
         RlctPair(1, 1, 3)},
    };
    return catalog;
}

inline const CatalogEntry* find_catalog_entry(const Dag& dag, const Triple& t) {
    for (const auto& e : blowup_catalog())
        if (!e.edges.empty() && e.p == dag.p() && e.edges == dag.edges() && e.triple == t) return &e;
    return nullptr;
}

inline const CatalogEntry* find_catalog_entry(const Poly& f) {
    for (const auto& e : blowup_catalog()) {
        if (e.poly.empty()) continue;
        if (identifiers_in(e.poly) != f.ring()->names()) continue;
        Poly g = parse_poly(e.poly, f.ring());
        if (g == f || g == -f) return &e;
    }
    return nullptr;
}

} // namespace pcorr
