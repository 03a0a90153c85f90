// Monte Carlo tube volume of a chain's end-to-end correlation and its asymptotic fit.

#include "pcorr/pcorr.hpp"

#include <iostream>

using namespace pcorr;

int main(int argc, char** argv) {
    const int p = argc > 1 ? std::stoi(argv[1]) : 5;
    Dag chain = Dag::make_family(Family::Chain, p);
    const Triple t(1, p, {});
    VolumeOptions opt;
    opt.n = 1000000;
    auto curve = tube_volume(chain, t, graph_space(chain), opt);
    auto pair = rlct_of_triple(chain, t, graph_space(chain)).pair;
    FitOptions w;
    w.weighted = true;
    auto fit = fit_constants(curve, pair, w);
    std::cout << chain.name() << " " << t.to_string() << " pair " << pair << "\n";
    std::cout << "leading " << fit.leading() << " +- " << fit.coeff_std_err.front() << ", exact "
              << tree_constants(TreeKind::Chain, p) << "\n";
    for (std::size_t k = 0; k < curve.size(); k += 4)
        std::cout << "  lambda " << curve.lambda[k] << "  V " << curve.estimate[k] << "  fit "
                  << fit.predict(curve.lambda[k]) << "\n";
}
