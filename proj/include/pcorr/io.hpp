#pragma once

// Graph shorthand, DAG files and small text helpers shared by the CLI and samples.

#include "pcorr/dag.hpp"
#include "pcorr/space.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace pcorr {

/// First line p, then one "i j" per edge; '#' starts a comment.
inline Dag read_dag(std::istream& in) {
    std::string line;
    int p = -1;
    std::vector<Edge> edges;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::vector<long> nums;
        long v;
        while (ls >> v) nums.push_back(v);
        if (!ls.eof()) throw InputError("DAG file line " + std::to_string(lineno) + ": expected integers");
        if (nums.empty()) continue;
        if (p < 0) {
            if (nums.size() != 1) throw InputError("DAG file: first line must hold p");
            p = static_cast<int>(nums[0]);
            continue;
        }
        if (nums.size() != 2) throw InputError("DAG file line " + std::to_string(lineno) + ": expected 'i j'");
        edges.emplace_back(static_cast<int>(nums[0]), static_cast<int>(nums[1]));
    }
    if (p < 0) throw InputError("DAG file is empty");
    return Dag(p, edges);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// K5, complete5, chain6, star10, tripart6_2, bow5, or a DAG file path.
inline Dag parse_graph(const std::string& text) {
    static const std::regex re(R"(^(K|k|complete|chain|star|tripart|bow)(\d+)(?:_(\d+))?$)");
    std::smatch m;
    if (std::regex_match(text, m, re)) {
        const std::string kind = m[1];
        const int p = std::stoi(m[2]);
        const bool has2 = m[3].matched;
        if (has2 && kind != "tripart") throw InputError("graph '" + text + "': only tripart takes a second parameter");
        if (kind == "tripart") {
            if (!has2) throw InputError("graph '" + text + "': write tripart<p>_<p'>");
            return Dag::make_family(Family::Tripart, p, std::stoi(m[3]));
        }
        if (kind == "K" || kind == "k" || kind == "complete") return Dag::make_family(Family::Complete, p);
        if (kind == "chain") return Dag::make_family(Family::Chain, p);
        if (kind == "star") return Dag::make_family(Family::Star, p);
        return Dag::make_family(Family::Bow, p);
    }
    std::ifstream in(text);
    if (!in) throw InputError("unknown graph '" + text + "' (not a family shorthand or readable DAG file)");
    return read_dag(in);
}

/// Uniform cube over the edges, optionally with the edges leaving `ball_node` constrained to the unit ball.
inline ParamSpace graph_space(const Dag& dag, int ball_node = 0) {
    auto s = ParamSpace::cube(dag.edges().size());
    if (ball_node) {
        std::vector<std::size_t> block;
        for (int c : dag.children(ball_node)) block.push_back(*dag.edge_index(ball_node, c));
        if (block.empty()) throw InputError("node " + std::to_string(ball_node) + " has no outgoing edges");
        s.add_ball(block, 1.0);
    }
    return s;
}

/// "1e-1,1e-2" or "default".
inline std::vector<double> parse_grid(const std::string& text) {
    if (text.empty() || text == "default") return {};
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (tok.empty() || used != tok.size()) throw InputError("bad grid value '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace pcorr
