#pragma once

// Jacobian ideals, numeric singular-point search, positivity evidence,
// minor classification and CAS export.

#include "pcorr/dag.hpp"
#include "pcorr/search.hpp"

#include <boost/random/sobol.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace pcorr {

struct IdealPresentation {
    RingPtr ring;
    std::vector<Poly> generators;
    std::string label;
};

/// f together with its nonzero first partials, deduplicated.
inline IdealPresentation jacobian_ideal(const Poly& f, std::string label = {}) {
    if (f.is_zero()) throw InputError("jacobian_ideal of the zero polynomial");
    IdealPresentation ideal{f.ring(), {f}, std::move(label)};
    for (std::size_t v = 0; v < f.arity(); ++v) {
        Poly d = partial(f, VarId{v});
        if (d.is_zero()) continue;
        if (std::find(ideal.generators.begin(), ideal.generators.end(), d) == ideal.generators.end())
            ideal.generators.push_back(std::move(d));
    }
    return ideal;
}

inline SearchResult singular_search(const IdealPresentation& ideal, const ParamSpace& space,
                                    const SearchOptions& opt = {}) {
    return ZeroSearch(ideal.generators, space).run(opt);
}

enum class ExportStyle { Plain, Macaulay2, Singular };

inline ExportStyle parse_export_style(const std::string& s) {
    if (s == "plain") return ExportStyle::Plain;
    if (s == "m2" || s == "macaulay2") return ExportStyle::Macaulay2;
    if (s == "singular") return ExportStyle::Singular;
    throw InputError("unknown export style '" + s + "' (plain, m2, singular)");
}

inline std::string export_ideal(const IdealPresentation& ideal, ExportStyle style = ExportStyle::Plain) {
    if (ideal.generators.empty()) throw InputError("export_ideal: no generators");
    const auto& names = ideal.ring->names();
    std::ostringstream os;
    auto joined = [&](const char* sep) {
        std::string s;
        for (std::size_t k = 0; k < names.size(); ++k) s += (k ? sep : "") + names[k];
        return s;
    };
    switch (style) {
    case ExportStyle::Plain:
        if (!ideal.label.empty()) os << "# " << ideal.label << "\n";
        os << "vars " << joined(" ") << "\n";
        for (const auto& g : ideal.generators) os << to_string(g) << "\n";
        break;
    case ExportStyle::Macaulay2:
        if (!ideal.label.empty()) os << "-- " << ideal.label << "\n";
        os << "R = QQ[" << joined(",") << "];\nI = ideal(\n";
        for (std::size_t k = 0; k < ideal.generators.size(); ++k)
            os << "  " << to_string(ideal.generators[k]) << (k + 1 < ideal.generators.size() ? ",\n" : "\n");
        os << ");\n";
        break;
    case ExportStyle::Singular:
        if (!ideal.label.empty()) os << "// " << ideal.label << "\n";
        os << "ring r = 0,(" << joined(",") << "),dp;\nideal I =\n";
        for (std::size_t k = 0; k < ideal.generators.size(); ++k)
            os << "  " << to_string(ideal.generators[k]) << (k + 1 < ideal.generators.size() ? ",\n" : ";\n");
        break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Positivity.

struct PositivityResult {
    enum Kind { Certificate, PositiveNumeric, SignChange, Inconclusive } kind = Inconclusive;
    int sign = 0;             // +1 / -1 when sign-definite
    double min_abs = INFINITY;
    std::size_t samples = 0;
    std::vector<double> point;  // a zero or sign-change witness

    bool definite() const { return kind == Certificate || kind == PositiveNumeric; }
};

inline const char* to_string(PositivityResult::Kind k) {
    switch (k) {
    case PositivityResult::Certificate: return "certificate";
    case PositivityResult::PositiveNumeric: return "positive_numeric";
    case PositivityResult::SignChange: return "sign_change";
    case PositivityResult::Inconclusive: return "inconclusive";
    }
    return "?";
}

/// Sign c of the constant term if every other term has even exponents and
/// a coefficient of sign c; 0 otherwise.
inline int even_power_certificate(const Poly& g) {
    const Integer c = g.constant_term();
    if (c == 0) return 0;
    const int sign = c > 0 ? 1 : -1;
    for (const auto& [e, coef] : g.terms()) {
        if ((coef > 0 ? 1 : -1) != sign) return 0;
        for (auto x : e)
            if (x % 2) return 0;
    }
    return sign;
}

inline PositivityResult positivity_check(const Poly& g, const ParamSpace& space, std::size_t n_samples = 100000,
                                         std::uint64_t seed = 7) {
    PositivityResult res;
    const std::size_t d = g.arity();
    if (space.dim() != d) throw InputError("positivity_check: space dimension differs from ring arity");
    if (g.is_zero()) {
        res.kind = PositivityResult::SignChange;
        res.min_abs = 0.0;
        res.point.assign(d, 0.0);
        return res;
    }
    if (int s = even_power_certificate(g)) {
        res.kind = PositivityResult::Certificate;
        res.sign = s;
        res.min_abs = abs(g.constant_term()).convert_to<double>();
        return res;
    }
    if (g.is_constant()) {
        res.kind = PositivityResult::Certificate;
        res.sign = g.constant_term() > 0 ? 1 : -1;
        res.min_abs = abs(g.constant_term()).convert_to<double>();
        return res;
    }

    CompiledPoly cg(g);
    bool pos = false, neg = false;
    std::vector<std::pair<double, std::vector<double>>> smallest;  // kept sorted, size <= 16
    std::vector<double> x(d);
    auto visit = [&](const std::vector<double>& pt) {
        if (!space.contains(pt, 1e-12)) return;
        const double v = cg(pt.data());
        ++res.samples;
        if (v > 0) pos = true;
        if (v < 0) neg = true;
        const double a = std::abs(v);
        if (a < res.min_abs) res.min_abs = a;
        if ((v == 0 || (pos && neg)) && res.point.empty()) res.point = pt;
        if (smallest.size() < 16 || a < smallest.back().first) {
            smallest.emplace_back(a, pt);
            std::sort(smallest.begin(), smallest.end(),
                      [](const auto& l, const auto& r) { return l.first < r.first; });
            if (smallest.size() > 16) smallest.pop_back();
        }
    };

    std::fill(x.begin(), x.end(), 0.0);
    visit(x);
    if (d <= 16) {
        for (std::uint32_t m = 0; m < (1u << d); ++m) {
            for (std::size_t v = 0; v < d; ++v) x[v] = (m >> v) & 1u ? space.hi(v) : space.lo(v);
            visit(x);
        }
    }
    if (d > 0 && n_samples > 0) {
        boost::random::sobol qrng(static_cast<unsigned>(d));
        qrng.seed(seed);
        const double scale = 1.0 / (static_cast<double>(qrng.max()) + 1.0);
        for (std::size_t s = 0; s < n_samples; ++s) {
            for (std::size_t v = 0; v < d; ++v) {
                const double u = (static_cast<double>(qrng()) + 0.5) * scale;
                x[v] = space.lo(v) + (space.hi(v) - space.lo(v)) * u;
            }
            visit(x);
        }
    }
    if (pos && neg) {
        res.kind = PositivityResult::SignChange;
        return res;
    }
    if (!res.point.empty()) {
        res.kind = PositivityResult::SignChange;
        return res;
    }
    // Local descent on g^2 from the samples closest to a zero.
    ZeroSearch search({g}, space);
    SearchOptions opt;
    opt.budget = 0;
    opt.max_hits = 1;
    for (const auto& [a, pt] : smallest) {
        SearchResult r = search.run_from(pt, opt);
        if (!r.points.empty()) {
            res.kind = PositivityResult::SignChange;
            res.point = r.points.front();
            res.min_abs = 0.0;
            return res;
        }
        res.min_abs = std::min(res.min_abs, r.best_residual);
    }
    if (res.samples == 0 || res.min_abs < 1e-7) {
        res.kind = PositivityResult::Inconclusive;
        return res;
    }
    res.kind = PositivityResult::PositiveNumeric;
    res.sign = pos ? 1 : -1;
    return res;
}

// ---------------------------------------------------------------------------
// Classification.

enum class Verdict { ZeroPolynomial, MonomialTimesPositive, SmoothNumeric, NeedsBlowup };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::ZeroPolynomial: return "zero";
    case Verdict::MonomialTimesPositive: return "monomial";
    case Verdict::SmoothNumeric: return "smooth";
    case Verdict::NeedsBlowup: return "needs_blowup";
    }
    return "?";
}

struct Classification {
    Verdict verdict = Verdict::ZeroPolynomial;
    Exponents kappa;
    PositivityResult positivity;
    std::size_t search_budget = 0;
    std::vector<std::vector<double>> singular_points;
    bool from_certificate = false;
};

struct ClassifyOptions {
    std::size_t budget = 100000;
    std::size_t positivity_samples = 100000;
    std::uint64_t seed = 1;
};

inline Classification classify_minor(const Poly& f, const ParamSpace& space, const ClassifyOptions& opt = {}) {
    Classification c;
    if (f.is_zero()) return c;
    auto shape = monomial_content(f);
    c.kappa = shape.kappa;
    c.positivity = positivity_check(shape.cofactor, space, opt.positivity_samples, opt.seed);
    if (c.positivity.definite()) {
        c.verdict = Verdict::MonomialTimesPositive;
        return c;
    }
    SearchOptions so;
    so.budget = opt.budget;
    so.seed = opt.seed;
    c.search_budget = opt.budget;
    c.singular_points = singular_search(jacobian_ideal(f), space, so).points;
    c.verdict = c.singular_points.empty() ? Verdict::SmoothNumeric : Verdict::NeedsBlowup;
    return c;
}

// ---------------------------------------------------------------------------
// Certificates: "<graph> <i> <j> <S> smooth" or
// "<graph> <i> <j> <S> singular-locus g1; g2; ...".

struct MinorCertificate {
    enum Kind { Smooth, SingularLocus } kind = Smooth;
    std::vector<std::string> generators;
};

class CertificateStore {
  public:
    static std::string key(const std::string& graph, const std::string& triple) { return graph + " " + triple; }

    void add(const std::string& graph, const std::string& triple, MinorCertificate cert) {
        certs_[key(graph, triple)] = std::move(cert);
    }

    const MinorCertificate* find(const std::string& graph, const std::string& triple) const {
        auto it = certs_.find(key(graph, triple));
        return it == certs_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return certs_.size(); }

    /// Triples are written "i j S" with S comma-separated or "-".
    static CertificateStore parse(std::istream& in) {
        CertificateStore store;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            std::istringstream ls(line);
            std::string graph, i, j, S, kind;
            if (!(ls >> graph)) continue;
            if (!(ls >> i >> j >> S >> kind))
                throw InputError("certificate line " + std::to_string(lineno) + ": expected '<graph> <i> <j> <S> <kind>'");
            MinorCertificate cert;
            if (kind == "smooth") {
                cert.kind = MinorCertificate::Smooth;
            } else if (kind == "singular-locus") {
                cert.kind = MinorCertificate::SingularLocus;
                std::string rest;
                std::getline(ls, rest);
                std::istringstream gs(rest);
                std::string g;
                while (std::getline(gs, g, ';')) {
                    auto b = g.find_first_not_of(" \t"), e = g.find_last_not_of(" \t");
                    if (b != std::string::npos) cert.generators.push_back(g.substr(b, e - b + 1));
                }
                if (cert.generators.empty())
                    throw InputError("certificate line " + std::to_string(lineno) + ": empty singular locus");
            } else {
                throw InputError("certificate line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
            }
            store.add(graph, Triple(parse_node(i), parse_node(j), parse_node_set(S)).to_string(), std::move(cert));
        }
        return store;
    }

  private:
    std::map<std::string, MinorCertificate> certs_;
};

} // namespace pcorr
