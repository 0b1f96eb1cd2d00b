// Acceptance gate: one line per criterion, nonzero exit on any failure.
// Budget/workers/seed can be overridden through the environment for local
// iteration; defaults are the contract values.

#include <cstdio>
#include <cstdlib>

#include "hyperconv/acceptance.hpp"

int main() {
    hyperconv::AcceptanceOptions o;
    if (const char* e = std::getenv("HYPERCONV_SEED"))
        o.seed = std::strtoull(e, nullptr, 10);
    if (const char* e = std::getenv("HYPERCONV_ACCEPTANCE_BUDGET"))
        o.budget = std::strtol(e, nullptr, 10);
    if (const char* e = std::getenv("HYPERCONV_ACCEPTANCE_WORKERS"))
        o.workers = (int)std::strtol(e, nullptr, 10);

    auto results = hyperconv::run_acceptance(o);
    int failed = 0;
    for (const auto& r : results) {
        if (!r.pass)
            ++failed;
        std::printf("%s  criterion %2d: %s — %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", (int)results.size() - failed,
                results.size());
    return failed == 0 ? 0 : 1;
}
