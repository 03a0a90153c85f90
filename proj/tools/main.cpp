#include "pcorr/pcorr.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace pcorr;

namespace {

struct Common {
    std::string out;
    std::string format = "text";
    std::uint64_t seed = 1;
    std::size_t n = 1000000;
    unsigned threads = 0;
    std::string grid = "default";
};

struct Target {
    std::vector<std::string> args;  // graph [i j [S]] or graph union
    std::string poly;
    std::size_t box = 0;
    int ball_node = 0;

    bool has_poly() const { return !poly.empty(); }

    Dag graph() const {
        if (args.empty()) throw InputError("expected a graph (e.g. chain6, K5, tripart6_2) or --poly");
        return parse_graph(args[0]);
    }

    bool has_triple() const { return args.size() >= 3; }

    Triple triple(const Dag& d) const {
        if (args.size() < 3 || args.size() > 4) throw InputError("expected <graph> <i> <j> [S]");
        Triple t(parse_node(args[1]), parse_node(args[2]), args.size() == 4 ? parse_node_set(args[3]) : std::vector<int>{});
        t.validate(d.p());
        return t;
    }

    Poly parsed_poly() const {
        Poly f = parse_poly(poly);
        if (box && box != f.arity())
            throw InputError("--box " + std::to_string(box) + " but the polynomial has " + std::to_string(f.arity()) +
                             " variables");
        return f;
    }

    ParamSpace poly_space(const Poly& f) const { return ParamSpace::cube(box ? box : f.arity()); }
};

void add_target(CLI::App* cmd, Target& t, bool poly = true) {
    cmd->add_option("args", t.args, "graph [i j [S]]; S is comma-separated, '-' for empty");
    if (poly) {
        cmd->add_option("--poly", t.poly, "polynomial instead of a graph");
        cmd->add_option("--box", t.box, "dimension of the cube [-1,1]^d for --poly");
    }
    cmd->add_option("--ball-node", t.ball_node, "put the edges leaving this node on the unit ball");
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw InputError("cannot write '" + path + "'");
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

VolumeOptions volume_options(const Common& c) {
    VolumeOptions o;
    o.n = c.n;
    o.seed = c.seed;
    o.threads = c.threads;
    if (auto g = parse_grid(c.grid); !g.empty()) o.grid = std::move(g);
    return o;
}

void write_curve(std::ostream& os, const VolumeCurve& c, const std::string& format) {
    if (format == "json")
        os << c.to_json().dump(2) << "\n";
    else
        c.write_csv(os);
}

void require_format(const std::string& f, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (f == a) return;
    throw InputError("unsupported --format '" + f + "'");
}

int cmd_minor(const Target& t, const Common& c) {
    require_format(c.format, {"text", "json"});
    Dag d = t.graph();
    Triple tr = t.triple(d);
    Output out(c.out);
    if (c.format == "json") {
        auto cp = correlation_polys(d, tr);
        nlohmann::json j{{"graph", d.name()},
                         {"triple", tr.to_string()},
                         {"minor", to_string(cp.numerator)},
                         {"den_i", to_string(cp.den_i)},
                         {"den_j", to_string(cp.den_j)},
                         {"d_separated", d_separated(d, tr)},
                         {"version", kVersion}};
        out.os() << j.dump(2) << "\n";
    } else {
        out.os() << to_string(almost_principal_minor(d, tr)) << "\n";
    }
    return 0;
}

int cmd_volume(const Target& t, const Common& c) {
    require_format(c.format, {"text", "csv", "json"});
    const auto opt = volume_options(c);
    VolumeCurve curve;
    if (t.has_poly()) {
        Poly f = t.parsed_poly();
        curve = poly_volume(f, t.poly_space(f), opt);
        curve.label = "poly " + to_string(f);
    } else {
        Dag d = t.graph();
        ParamSpace space = graph_space(d, t.ball_node);
        if (t.args.size() == 1 || (t.args.size() == 2 && t.args[1] == "union")) {
            curve = union_volume(d, space, opt);
            curve.label = d.name() + " union";
        } else {
            Triple tr = t.triple(d);
            curve = tube_volume(d, tr, space, opt);
            curve.label = d.name() + " " + tr.to_string();
        }
    }
    Output out(c.out);
    write_curve(out.os(), curve, c.format);
    return 0;
}

struct RlctFlags {
    std::string plan;
    std::string certificates;
    std::size_t budget = 100000;
};

int cmd_rlct(const Target& t, const Common& c, const RlctFlags& f) {
    require_format(c.format, {"text", "json"});
    RlctOptions opt;
    opt.classify.budget = f.budget;
    opt.classify.seed = c.seed;
    CertificateStore store;
    if (!f.certificates.empty()) {
        std::istringstream in(read_text_file(f.certificates));
        store = CertificateStore::parse(in);
        opt.certificates = &store;
    }
    if (!f.plan.empty()) opt.plan = BlowupPlan::parse(read_text_file(f.plan));
    Output out(c.out);
    auto emit = [&](const RlctReport& rep, const std::string& what) {
        if (c.format == "json") {
            auto j = rep.to_json();
            j["target"] = what;
            j["seed"] = c.seed;
            j["budget"] = f.budget;
            j["version"] = kVersion;
            out.os() << j.dump(2) << "\n";
            return;
        }
        out.os() << rep.pair.to_string() << "\n";
        out.os() << "method " << rep.method << "\n";
        if (rep.blowup) out.os() << rep.blowup->trace_json().dump(2) << "\n";
    };
    if (t.has_poly()) {
        Poly p = t.parsed_poly();
        emit(rlct_of_poly(p, t.poly_space(p), opt), to_string(p));
        return 0;
    }
    Dag d = t.graph();
    ParamSpace space = graph_space(d, t.ball_node);
    if (t.args.size() == 1) {
        auto g = rlct_of_dag(d, space, opt);
        if (c.format == "json") {
            nlohmann::json per = nlohmann::json::object();
            for (const auto& [tr, rep] : g.per_triple) per[tr.to_string()] = rep.to_json();
            out.os() << nlohmann::json{{"graph", d.name()}, {"pair", g.pair.to_string()}, {"triples", per},
                                       {"seed", c.seed}, {"version", kVersion}}
                            .dump(2)
                     << "\n";
        } else {
            out.os() << g.pair.to_string() << "\n";
            std::map<std::string, int> by;
            for (const auto& [tr, rep] : g.per_triple) ++by[rep.pair.to_string() + " " + rep.method];
            for (const auto& [k, v] : by) out.os() << k << " " << v << "\n";
        }
        return 0;
    }
    Triple tr = t.triple(d);
    emit(rlct_of_triple(d, tr, space, opt), d.name() + " " + tr.to_string());
    return 0;
}

struct FitFlags {
    std::string curve;
    std::string pair;
    double lo = 1e-5, hi = 1e-1;
    bool weighted = false;
};

int cmd_fit(const FitFlags& f, const Common& c) {
    require_format(c.format, {"text", "json", "csv"});
    if (f.pair.empty()) throw InputError("fit needs --pair, e.g. --pair \"(1,2)\"");
    std::istringstream in(read_text_file(f.curve));
    auto curve = VolumeCurve::read_csv(in);
    FitOptions fo;
    fo.lo = f.lo;
    fo.hi = f.hi;
    fo.weighted = f.weighted;
    auto fit = fit_constants(curve, RlctPair::parse(f.pair), fo);
    Output out(c.out);
    if (c.format == "csv") {
        write_fit_csv(out.os(), curve, fit);
    } else if (c.format == "json") {
        auto j = fit.to_json();
        j["curve"] = curve.label;
        j["n"] = curve.n;
        j["seed"] = curve.seed;
        out.os() << j.dump(2) << "\n";
    } else {
        out.os() << std::setprecision(10);
        for (std::size_t k = 0; k < fit.coeffs.size(); ++k) {
            out.os() << "C" << fit.m - 1 - k << " " << fit.coeffs[k];
            if (k < fit.coeff_std_err.size()) out.os() << " +- " << fit.coeff_std_err[k];
            out.os() << "\n";
        }
        out.os() << "points " << fit.points << " residual " << fit.residual_norm << "\n";
    }
    return 0;
}

struct ConstFlags {
    std::string pair;
    std::string solve_var;
    unsigned order = 64;
    double tol = 1e-8;
};

/// A variable whose partial of the numerator is a nonzero constant.
std::size_t linear_solve_var(const Poly& num) {
    for (std::size_t v = 0; v < num.arity(); ++v) {
        Poly d = partial(num, VarId{v});
        if (!d.is_zero() && d.is_constant()) return v;
    }
    throw InputError("no variable enters the minor linearly; pass --solve-var");
}

int cmd_constants(const Target& t, const Common& c, const ConstFlags& f) {
    require_format(c.format, {"text", "json"});
    QuadratureSpec spec;
    spec.order = f.order;
    spec.tol = f.tol;
    spec.seed = c.seed;
    spec.mc_n = c.n;
    ConstantResult res;
    if (t.args.empty()) throw InputError("constants needs a name or a graph triple");
    const auto names = constant_names();
    if (std::find(names.begin(), names.end(), t.args[0]) != names.end()) {
        if (t.args.size() > 2) throw InputError("expected: constants <name> [p]");
        const int p = t.args.size() == 2 ? parse_node(t.args[1]) : 6;
        res = named_constant(t.args[0], p, spec);
    } else {
        Dag d = t.graph();
        Triple tr = t.triple(d);
        ParamSpace space = graph_space(d, t.ball_node);
        res.name = d.name() + " " + tr.to_string();
        RlctOptions ro;
        ro.classify.seed = c.seed;
        auto rep = rlct_of_triple(d, tr, space, ro);
        Integral r;
        if (rep.method == "monomial" || rep.method == "sos_product") {
            if (rep.method == "sos_product") throw InputError("the cofactor vanishes on the slice; no monomial constant");
            r = monomial_tube_constant(d, tr, space, f.pair.empty() ? rep.pair : RlctPair::parse(f.pair), spec);
        } else if (rep.method == "smooth" || rep.method == "smooth_certificate") {
            const auto cp = correlation_polys(d, tr);
            const std::size_t v = f.solve_var.empty() ? linear_solve_var(cp.numerator) : d.ring()->var(f.solve_var).index;
            r = smooth_tube_constant(d, tr, space, v, spec);
        } else {
            throw InputError("no constant formula for method '" + rep.method + "'");
        }
        res.value = r.value;
        res.method = rep.method + "/" + r.method;
        res.tol_or_stderr = r.error > 0 ? r.error : spec.tol;
    }
    Output out(c.out);
    if (c.format == "json")
        out.os() << res.to_json().dump(2) << "\n";
    else
        out.os() << std::setprecision(12) << res.name << " " << res.value << " (" << res.method << ")\n";
    return 0;
}

struct ReproFlags {
    std::string id;
    int p = 6;
    bool unlabeled = false;
};

int cmd_reproduce(const ReproFlags& f, const Common& c) {
    namespace fs = std::filesystem;
    const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    fs::create_directories(dir);
    nlohmann::json report{{"id", f.id}, {"version", kVersion}, {"seed", c.seed}, {"n", c.n}};
    bool ok = true;
    if (f.id == "table1" || f.id == "table2") {
        const int p = f.id == "table1" ? 3 : 4;
        RlctOptions ro;
        ro.classify.seed = c.seed;
        auto t = classification_table(p, !f.unlabeled, ro);
        std::ofstream os(dir / (f.id + ".csv"));
        t.write_csv(os, f.id + (f.unlabeled ? " unlabeled" : " ordered") + " dags=" + std::to_string(t.dags));
        nlohmann::json checks = nlohmann::json::array();
        if (p == 3 && !f.unlabeled) {
            const bool pass = t.cell("Monomial", "(1,1)") == 21 && t.cell("Monomial", "(1,2)") == 3 &&
                              t.cell("Smooth", "(1,1)") == 3 && t.total == 27;
            checks.push_back({{"description", "Monomial 21+3, Smooth 3, total 27"}, {"passed", pass}});
            ok = pass;
        } else if (p == 4 && !f.unlabeled) {
            checks.push_back({{"description", "total 965 triples"}, {"passed", t.total == 965}});
            ok = t.total == 965;
        }
        report["checks"] = checks;
        report["total"] = t.total;
        std::cout << f.id << ": " << t.total << " triples over " << t.dags << " DAGs\n";
        for (const auto& [row, m] : t.counts)
            for (const auto& [pair, n] : m) std::cout << "  " << row << " " << pair << " " << n << "\n";
    } else {
        auto fig = reproduce_figure(f.id, f.p, volume_options(c));
        nlohmann::json files = nlohmann::json::array();
        for (std::size_t k = 0; k < fig.curves.size(); ++k) {
            std::string name = fig.curves[k].label;
            for (char& ch : name)
                if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
            const std::string file = f.id + "_" + name + ".csv";
            std::ofstream os(dir / file);
            fig.curves[k].write_csv(os);
            files.push_back(file);
        }
        report["files"] = files;
        report["checks"] = nlohmann::json::array();
        for (const auto& ch : fig.checks) {
            report["checks"].push_back(ch.to_json());
            std::cout << (ch.passed ? "PASS " : "FAIL ") << ch.description << "\n";
        }
        ok = fig.passed();
    }
    std::ofstream(dir / (f.id + "_report.json")) << report.dump(2) << "\n";
    return ok ? 0 : 1;
}

int cmd_export(const Target& t, const Common& c, const std::string& style) {
    IdealPresentation ideal;
    if (t.has_poly()) {
        ideal = jacobian_ideal(t.parsed_poly(), "poly");
    } else {
        Dag d = t.graph();
        Triple tr = t.triple(d);
        Poly f = almost_principal_minor(d, tr);
        if (f.is_zero()) throw InputError("the minor is zero (d-separated triple)");
        ideal = jacobian_ideal(f, d.name() + " " + tr.to_string());
    }
    Output out(c.out);
    out.os() << export_ideal(ideal, parse_export_style(style));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial-correlation hypersurfaces: minors, RLCTs, tube volumes and constants"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* cmd, bool sampling) {
        cmd->add_option("--out", common.out, "output file (directory for reproduce)");
        cmd->add_option("--format", common.format, "text, csv or json");
        cmd->add_option("--seed", common.seed, "random seed");
        if (sampling) {
            cmd->add_option("--n", common.n, "Monte Carlo sample count");
            cmd->add_option("--threads", common.threads, "worker cap (0 = hardware)");
            cmd->add_option("--grid", common.grid, "comma-separated lambdas or 'default'");
        }
    };

    Target target;
    auto* minor = app.add_subcommand("minor", "print det(K_{iR,jR})");
    add_target(minor, target, false);
    add_common(minor, false);

    auto* volume = app.add_subcommand("volume", "Monte Carlo tube or union volume curve");
    add_target(volume, target);
    add_common(volume, true);

    RlctFlags rf;
    auto* rlct = app.add_subcommand("rlct", "real log canonical threshold of a minor, graph or polynomial");
    add_target(rlct, target);
    add_common(rlct, false);
    rlct->add_option("--plan", rf.plan, "blowup plan file");
    rlct->add_option("--certificates", rf.certificates, "certificate file");
    rlct->add_option("--budget", rf.budget, "singular-search restarts");

    FitFlags ff;
    auto* fit = app.add_subcommand("fit", "fit asymptotic coefficients to a volume curve");
    fit->add_option("curve", ff.curve, "curve CSV written by 'volume'")->required();
    fit->add_option("--pair", ff.pair, "RLCT pair, e.g. (1,2)");
    fit->add_option("--lo", ff.lo, "window lower end");
    fit->add_option("--hi", ff.hi, "window upper end");
    fit->add_flag("--weighted", ff.weighted, "inverse-variance weights");
    add_common(fit, false);

    ConstFlags cf;
    auto* constants = app.add_subcommand("constants", "leading constant C by closed form or quadrature");
    add_target(constants, target, false);
    add_common(constants, true);
    constants->add_option("--pair", cf.pair, "override the RLCT pair");
    constants->add_option("--solve-var", cf.solve_var, "variable to solve for (smooth case)");
    constants->add_option("--order", cf.order, "Gauss-Legendre order");
    constants->add_option("--tol", cf.tol, "adaptive quadrature tolerance");

    ReproFlags rpf;
    auto* repro = app.add_subcommand("reproduce", "figure and table data: fig2 fig4 fig6a fig6b table1 table2");
    repro->add_option("id", rpf.id)->required();
    repro->add_option("--p", rpf.p, "number of nodes for fig2/fig4");
    repro->add_flag("--unlabeled", rpf.unlabeled, "tables over isomorphism classes");
    add_common(repro, true);

    std::string style = "plain";
    auto* exp = app.add_subcommand("export", "Jacobian ideal for an external CAS");
    add_target(exp, target);
    add_common(exp, false);
    exp->add_option("--style", style, "plain, macaulay2 or singular");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*minor) return cmd_minor(target, common);
        if (*volume) return cmd_volume(target, common);
        if (*rlct) return cmd_rlct(target, common, rf);
        if (*fit) return cmd_fit(ff, common);
        if (*constants) return cmd_constants(target, common, cf);
        if (*repro) return cmd_reproduce(rpf, common);
        if (*exp) return cmd_export(target, common, style);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const InconclusiveError& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
