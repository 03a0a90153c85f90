// Every named constant with its method and error estimate.

#include "pcorr/pcorr.hpp"

#include <iomanip>
#include <iostream>

using namespace pcorr;

int main() {
    std::cout << std::setprecision(12);
    for (const auto& name : constant_names()) {
        auto c = named_constant(name, 6);
        std::cout << std::left << std::setw(16) << c.name << std::setw(20) << c.value << c.method << "  ("
                  << c.tol_or_stderr << ")\n";
    }
}
