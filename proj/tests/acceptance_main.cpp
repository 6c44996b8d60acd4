// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <cstdio>
#include <iostream>

#include "nodalset/acceptance.hpp"
#include "nodalset/parallel.hpp"

int main() {
    const auto results = nodalset::run_acceptance(nodalset::AcceptanceTolerances{}, {}, nodalset::worker_count());
    std::cout << nodalset::format_results(results);
    int failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
