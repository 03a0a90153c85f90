#pragma once

// Figure and table data sets with their qualitative checks.

#include "pcorr/io.hpp"
#include "pcorr/pipeline.hpp"
#include "pcorr/volume.hpp"

namespace pcorr {

struct OrderingCheck {
    std::string description;
    bool passed = true;
    double worst_margin = 0.0;  // most negative (upper - lower + slack) seen, in units of V

    nlohmann::json to_json() const {
        return {{"description", description}, {"passed", passed}, {"worst_margin", worst_margin}};
    }
};

/// lower(lambda) <= upper(lambda) + sigmas * sqrt(se_l^2 + se_u^2) for every grid lambda in [lambda_min, lambda_max].
inline OrderingCheck check_below(const VolumeCurve& lower, const VolumeCurve& upper, double sigmas, double lambda_min,
                                 std::string description,
                                 double lambda_max = std::numeric_limits<double>::infinity()) {
    if (lower.lambda != upper.lambda) throw InputError("check_below: curves use different grids");
    OrderingCheck c;
    c.description = std::move(description);
    c.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lower.size(); ++k) {
        if (lower.lambda[k] < lambda_min * (1 - 1e-9) || lower.lambda[k] > lambda_max * (1 + 1e-9)) continue;
        const double slack = sigmas * std::hypot(lower.std_err[k], upper.std_err[k]);
        const double margin = upper.estimate[k] - lower.estimate[k] + slack;
        c.worst_margin = std::min(c.worst_margin, margin);
        if (margin < 0) c.passed = false;
    }
    return c;
}

struct FigureData {
    std::string id;
    std::vector<VolumeCurve> curves;
    std::vector<OrderingCheck> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const OrderingCheck& c) { return c.passed; });
    }
};

inline std::vector<std::string> figure_ids() { return {"fig2", "fig4", "fig6a", "fig6b"}; }

inline FigureData reproduce_figure(const std::string& id, int p, const VolumeOptions& opt) {
    FigureData fig;
    fig.id = id;
    auto union_of = [&](const Dag& d) {
        auto c = union_volume(d, graph_space(d), opt);
        c.label = d.name() + " union";
        return c;
    };
    if (id == "fig2") {
        fig.curves.push_back(union_of(Dag::make_family(Family::Chain, p)));
        fig.curves.push_back(union_of(Dag::make_family(Family::Star, p)));
        fig.checks.push_back(check_below(fig.curves[1], fig.curves[0], 2.0, 0.0, "star union below chain union"));
    } else if (id == "fig4") {
        for (Dag d : {Dag::make_family(Family::Complete, p), Dag::make_family(Family::Chain, p),
                      Dag::make_family(Family::Star, p), Dag::make_family(Family::Tripart, p, 2),
                      Dag::make_family(Family::Bow, p)})
            fig.curves.push_back(union_of(d));
        fig.checks.push_back(check_below(fig.curves[2], fig.curves[1], 2.0, 0.0, "star union below chain union"));
        const double smallest = fig.curves[0].lambda.back();
        fig.checks.push_back(check_below(fig.curves[0], fig.curves[1], 2.0, smallest,
                                         "complete union below chain union at the smallest lambda", smallest));
    } else if (id == "fig6a" || id == "fig6b") {
        const bool a = id == "fig6a";
        Dag d = a ? Dag::make_family(Family::Tripart, 5, 2) : Dag::make_family(Family::Bow, 5);
        const Triple solid = a ? Triple(1, 2, {4, 5}) : Triple(4, 5, {3});
        const Triple dashed = a ? Triple(1, 2, {3}) : Triple(4, 5, {});
        auto curves = graph_volumes(d, {solid, dashed}, graph_space(d), opt);
        curves.pop_back();  // union
        curves[0].label = d.name() + " " + solid.to_string();
        curves[1].label = d.name() + " " + dashed.to_string();
        fig.curves = curves;
        fig.checks.push_back(check_below(curves[1], curves[0], 2.0, 1e-4,
                                         curves[0].label + " above " + curves[1].label + " for lambda >= 1e-4"));
    } else {
        throw InputError("unknown figure '" + id + "'");
    }
    return fig;
}

/// Row label for a classified triple.
inline std::string table_row(const std::string& method) {
    if (method == "monomial" || method == "sos_product") return "Monomial";
    if (method == "smooth" || method == "smooth_certificate") return "Smooth";
    if (method == "blowup") return "Blowup";
    return "Singular";
}

struct TableData {
    int p = 3;
    bool ordered = true;
    std::size_t dags = 0;
    std::map<std::string, std::map<std::string, int>> counts;  // row -> pair -> count
    int total = 0;

    int row_total(const std::string& row) const {
        auto it = counts.find(row);
        if (it == counts.end()) return 0;
        int s = 0;
        for (const auto& [k, v] : it->second) s += v;
        return s;
    }

    int cell(const std::string& row, const std::string& pair) const {
        auto it = counts.find(row);
        if (it == counts.end()) return 0;
        auto jt = it->second.find(pair);
        return jt == it->second.end() ? 0 : jt->second;
    }

    void write_csv(std::ostream& os, const std::string& header) const {
        os << "# pcorr " << kVersion << " " << header << "\n";
        os << "row,pair,count\n";
        for (const auto& [row, m] : counts)
            for (const auto& [pair, c] : m) os << row << ",\"" << pair << "\"," << c << "\n";
        os << "Subtotal,all," << total << "\n";
    }
};

/// Classification counts over the d-connected triples of all DAGs on p nodes.
/// ordered: DAGs respecting 1 < ... < p; otherwise one DAG per isomorphism class.
inline TableData classification_table(int p, bool ordered, const RlctOptions& opt = {}) {
    TableData t;
    t.p = p;
    t.ordered = ordered;
    const auto dags = ordered ? enumerate_ordered_dags(p) : enumerate_unlabeled_dags(p);
    t.dags = dags.size();
    for (const auto& d : dags) {
        if (d.edges().empty()) continue;
        for (const auto& tr : d_connected_triples(d)) {
            std::string row, pair;
            try {
                auto rep = rlct_of_triple(d, tr, graph_space(d), opt);
                row = table_row(rep.method);
                pair = rep.pair.to_string();
            } catch (const InconclusiveError&) {
                row = "Singular";
                pair = "unresolved";
            }
            ++t.counts[row][pair];
            ++t.total;
        }
    }
    return t;
}

} // namespace pcorr
