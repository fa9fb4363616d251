// Acceptance suite: one pass/fail line per criterion.
//   tmx_acceptance            run all 12 criteria
//   tmx_acceptance --only 3,5 run a subset
//   tmx_acceptance --quick    sub-minute identity checks only
//   tmx_acceptance --list     list criterion ids and names
#include <cstring>
#include <iostream>
#include <sstream>
#include <vector>

#include "tmx/verify.hpp"

int main(int argc, char** argv) {
    std::vector<int> only;
    bool quick = false;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--quick")) {
            quick = true;
        } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) only.push_back(std::stoi(tok));
        } else if (!std::strcmp(argv[i], "--list")) {
            std::cout << "criteria 1..12: bubble-identities, s0-closed-form, "
                         "disk-potential-theory, green-symmetry-positivity, "
                         "functional-correctness, maximizer-contracts, lambda0-extremality, "
                         "p2-attainment-below-4pi, p3-perturbation-insensitivity, "
                         "radial-expansion, monotonicity-scan, determinism-io\n";
            return 0;
        } else {
            std::cerr << "unknown argument: " << argv[i] << "\n";
            return 2;
        }
    }
    auto results = tmx::run_verification(only, quick, &std::cout);
    int fails = 0;
    for (const auto& r : results) fails += r.pass ? 0 : 1;
    if (results.empty()) {
        std::cerr << "no criteria selected\n";
        return 2;
    }
    std::cout << (fails ? std::to_string(fails) + " criterion(s) failed" : "all criteria passed")
              << std::endl;
    return fails ? 1 : 0;
}
