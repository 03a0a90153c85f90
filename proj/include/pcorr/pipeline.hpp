#pragma once

// RLCT of a single polynomial, of one partial correlation and of a graph.

#include "pcorr/blowup.hpp"

namespace pcorr {

struct RlctOptions {
    ClassifyOptions classify;
    BlowupOptions blowup;
    const CertificateStore* certificates = nullptr;
    std::optional<BlowupPlan> plan;  // overrides the built-in catalog
    bool use_catalog = true;
};

struct RlctReport {
    RlctPair pair;
    std::string method;  // zero, monomial, sos_product, smooth, smooth_certificate, blowup
    Exponents kappa;
    PositivityResult positivity;
    std::vector<std::vector<double>> singular_points;
    std::optional<BlowupResult> blowup;

    nlohmann::json to_json() const {
        nlohmann::json j{{"pair", pair.to_string()}, {"method", method}};
        if (!pair.is_infinite()) {
            j["ell"] = pair.ell_value();
            j["m"] = pair.m();
        }
        if (!kappa.empty()) j["kappa"] = kappa;
        if (method != "zero") j["positivity"] = to_string(positivity.kind);
        if (blowup) j["trace"] = blowup->trace_json()["charts"];
        return j;
    }
};

/// Number of variables if g = sum c_k x_k^2 with every c_k > 0, else 0.
inline unsigned diagonal_square_count(const Poly& g) {
    std::vector<char> seen(g.arity(), 0);
    unsigned n = 0;
    for (const auto& [e, c] : g.terms()) {
        if (c <= 0) return 0;
        std::size_t var = e.size();
        for (std::size_t v = 0; v < e.size(); ++v) {
            if (!e[v]) continue;
            if (e[v] != 2 || var != e.size()) return 0;
            var = v;
        }
        if (var == e.size() || seen[var]) return 0;
        seen[var] = 1;
        ++n;
    }
    return n;
}

inline std::vector<bool> active_coordinates(const ParamSpace& space) {
    std::vector<bool> active(space.dim());
    for (std::size_t v = 0; v < space.dim(); ++v) active[v] = space.lo(v) <= 0.0 && space.hi(v) >= 0.0;
    return active;
}

inline RlctReport rlct_of_poly(const Poly& f, const ParamSpace& space, const RlctOptions& opt = {},
                               const std::string& graph = {}, const std::string& triple = {},
                               const CatalogEntry* catalog_hint = nullptr) {
    RlctReport rep;
    if (f.is_zero()) {
        rep.method = "zero";
        return rep;
    }
    if (space.dim() != f.arity()) throw InputError("rlct: space dimension differs from ring arity");
    auto shape = monomial_content(f);
    rep.kappa = shape.kappa;
    std::vector<unsigned> kappa(shape.kappa.begin(), shape.kappa.end());
    const auto active = active_coordinates(space);
    const RlctPair mono = rlct_monomial(kappa, std::vector<unsigned>(kappa.size(), 0), active);

    rep.positivity = positivity_check(shape.cofactor, space, opt.classify.positivity_samples, opt.classify.seed);
    if (rep.positivity.definite()) {
        rep.method = "monomial";
        rep.pair = mono;
        return rep;
    }

    if (unsigned d = diagonal_square_count(shape.cofactor)) {
        bool disjoint = true, all_active = true;
        for (std::size_t v = 0; v < f.arity(); ++v) {
            if (!shape.cofactor.involves(VarId{v})) continue;
            if (kappa[v]) disjoint = false;
            if (!active[v]) all_active = false;
        }
        if (disjoint && all_active) {
            rep.method = "sos_product";
            rep.pair = rlct_product_disjoint({mono, rlct_sos(d)});
            return rep;
        }
    }

    const MinorCertificate* cert = nullptr;
    if (opt.certificates && !graph.empty()) cert = opt.certificates->find(graph, triple);
    if (cert && cert->kind == MinorCertificate::Smooth) {
        rep.method = "smooth_certificate";
        rep.pair = rlct_smooth();
        return rep;
    }
    if (!cert) {
        SearchOptions so;
        so.budget = opt.classify.budget;
        so.seed = opt.classify.seed;
        rep.singular_points = singular_search(jacobian_ideal(f), space, so).points;
        if (rep.singular_points.empty()) {
            if (opt.classify.budget < kCertifyingBudget)
                throw InconclusiveError("no singular point found, but the search budget is below 1e5");
            rep.method = "smooth";
            rep.pair = rlct_smooth();
            return rep;
        }
    }

    std::optional<BlowupPlan> plan = opt.plan;
    if (!plan && opt.use_catalog) {
        const CatalogEntry* entry = catalog_hint ? catalog_hint : find_catalog_entry(f);
        if (entry) plan = BlowupPlan::parse(entry->plan);
    }
    if (!plan) {
        std::string where = triple.empty() ? "" : " for " + triple;
        std::string why = cert ? "certificate lists a singular locus" : "singular point found";
        throw NeedsBlowupError("minor" + where + " is singular (" + why + "); supply a blowup plan");
    }
    rep.blowup = rlct_via_blowup(f, *plan, space, {}, opt.blowup);
    rep.method = "blowup";
    rep.pair = rep.blowup->pair;
    return rep;
}

inline RlctReport rlct_of_triple(const Dag& dag, const Triple& t, const ParamSpace& space, const RlctOptions& opt = {}) {
    t.validate(dag.p());
    if (d_separated(dag, t)) {
        RlctReport rep;
        rep.method = "zero";
        return rep;
    }
    const Poly f = almost_principal_minor(dag, t);
    return rlct_of_poly(f, space, opt, dag.name(), t.to_string(), opt.use_catalog ? find_catalog_entry(dag, t) : nullptr);
}

struct GraphRlct {
    RlctPair pair;
    std::map<Triple, RlctReport> per_triple;
};

/// Minimum pair over the d-connected triples.
inline GraphRlct rlct_of_dag(const Dag& dag, const ParamSpace& space, const RlctOptions& opt = {}) {
    GraphRlct g;
    for (const auto& t : d_connected_triples(dag)) {
        auto rep = rlct_of_triple(dag, t, space, opt);
        if (rep.pair < g.pair) g.pair = rep.pair;
        g.per_triple.emplace(t, std::move(rep));
    }
    return g;
}

} // namespace pcorr
