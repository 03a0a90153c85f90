// Minors and RLCTs of the d-connected triples of a small graph.

#include "pcorr/pcorr.hpp"

#include <iostream>

using namespace pcorr;

int main(int argc, char** argv) {
    Dag d = parse_graph(argc > 1 ? argv[1] : "tripart5_2");
    const auto space = graph_space(d);
    std::cout << d.name() << ": " << d.edges().size() << " edges\n";
    RlctPair best;
    bool complete = true;
    for (const auto& t : d_connected_triples(d)) {
        std::cout << "  " << t.to_string() << "  ";
        try {
            auto rep = rlct_of_triple(d, t, space);
            if (rep.pair < best) best = rep.pair;
            std::cout << rep.pair << "  " << rep.method;
        } catch (const InconclusiveError& e) {
            complete = false;
            std::cout << "unresolved";
        }
        std::cout << "  " << to_string(almost_principal_minor(d, t)) << "\n";
    }
    std::cout << "graph RLCT " << best << (complete ? "" : " (over the resolved triples)") << "\n";
}
