#include <doctest.h>

#include "pursuit/errors.hpp"
#include "pursuit/metrics.hpp"
#include "pursuit/rng.hpp"

using namespace pursuit;

TEST_CASE("ci95_half_width against tabulated t quantiles") {
    const std::vector<double> five{1, 2, 3, 4, 5};
    // t(0.975, 4) = 2.776445; sample sd = sqrt(2.5).
    CHECK(ci95_half_width(five) == doctest::Approx(2.776445 * std::sqrt(2.5) / std::sqrt(5.0)).epsilon(1e-6));
    const std::vector<double> one{3};
    CHECK(ci95_half_width(one) == 0.0);
    CHECK(mean(five) == 3.0);
}

TEST_CASE("smooth") {
    const std::vector<double> x{1, 5, 2, 8};
    CHECK(smooth(x, 1) == x);
    CHECK(smooth(x, 2) == std::vector<double>{1, 3, 3.5, 5});
    CHECK(smooth(x, 10) == std::vector<double>{1, 3, 8.0 / 3.0, 4});
    CHECK_THROWS_AS(smooth(x, 0), PreconditionError);
}

TEST_CASE("learning_curve") {
    Rng rng(3);
    std::vector<std::vector<double>> runs(5, std::vector<double>(50));
    for (auto& r : runs) {
        for (auto& v : r) v = standard_normal(rng);
    }
    for (const auto& p : learning_curve(runs, 5)) {
        CHECK(p.lo <= p.mean);
        CHECK(p.mean <= p.hi);
    }
    runs[2].pop_back();
    CHECK_THROWS_AS(learning_curve(runs, 5), PreconditionError);
}

TEST_CASE("confidence band narrows with more runs") {
    auto width = [](std::size_t n) {
        Rng rng(10);
        double total = 0.0;
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<std::vector<double>> runs(n, std::vector<double>(1));
            for (auto& r : runs) r[0] = standard_normal(rng);
            const auto c = learning_curve(runs, 1);
            total += c[0].hi - c[0].lo;
        }
        return total / 200.0;
    };
    CHECK(width(8) < width(4));
    CHECK(width(4) < width(2));
}
