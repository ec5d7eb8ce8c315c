#include "vatom/ergodicity.hpp"
#include "vatom/errors.hpp"
#include "vatom/kdtree.hpp"
#include "vatom/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace vatom;

namespace {

std::vector<double> alternating(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i % 2);
    return v;
}

// Cell sequence of an iid process that sits in cell 1 with probability p.
CellSequence iid_cells(std::size_t n, double p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform() < p ? 0.5 : (rng.uniform() < 0.5 ? 0.0 : 1.0);
    return coarse_grain(v, 3);
}

}  // namespace

TEST_CASE("coarse graining examples") {
    const auto c = coarse_grain(alternating(1000), 2);
    CHECK(c.measures[0] == doctest::Approx(0.5));
    CHECK(c.measures[1] == doctest::Approx(0.5));

    const auto u = coarse_grain(uniform_noise(200000, 5), 10);
    double sum = 0.0;
    for (double m : u.measures) {
        CHECK(std::abs(m - 0.1) < 5 * std::sqrt(0.09 / 200000));
        sum += m;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));

    const auto flat = coarse_grain(std::vector<double>(50, 2.0), 8);
    CHECK(flat.degenerate);
    CHECK(flat.n_cells == 1);

    CHECK_THROWS_AS(coarse_grain(std::vector<double>{}, 4), InsufficientData);
    CHECK_THROWS_AS(coarse_grain(std::vector<double>{1.0, NAN}, 4), InvalidInput);
}

TEST_CASE("property: cell measures sum to one") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto v = white_noise(1000 + seed * 37, seed);
        for (int cells : {2, 7, 40, 500}) {
            const auto c = coarse_grain(v, cells);
            std::uint64_t total = 0;
            for (double m : c.measures) total += static_cast<std::uint64_t>(std::llround(m * static_cast<double>(v.size())));
            CHECK(total == v.size());
        }
    }
}

TEST_CASE("period-2 returns") {
    const auto c = coarse_grain(alternating(1000), 2);
    for (int target : {0, 1}) {
        const auto s = first_return_distribution(c, target);
        CHECK(s.normalized()[2] == doctest::Approx(1.0));
        const auto s3 = kth_return_distribution(c, target, 3);
        CHECK(s3.normalized()[6] == doctest::Approx(1.0));
    }
    CHECK(top_bin_mass(first_return_distribution(c, 0), 1) == doctest::Approx(1.0));
}

TEST_CASE("return conventions differ on dwelling") {
    // cell 1 occupied on 0,1,2 then 6,7: one return of 6 with exit, four of (1,1,4,1) without
    const std::vector<double> v{1, 1, 1, 0, 0, 0, 1, 1, 0, 0};
    const auto c = coarse_grain(v, 2);
    const auto exit = first_return_distribution(c, 1, ReturnConvention::exit_required);
    CHECK(exit.sample_count == 1);
    CHECK(exit.mean_return == 6.0);
    const auto every = first_return_distribution(c, 1, ReturnConvention::every_visit);
    CHECK(every.sample_count == 4);
    CHECK(every.mean_return == doctest::Approx(7.0 / 4.0));
}

TEST_CASE("iid cell process: geometric returns with mean 1/p") {
    const double p = 0.1;
    const auto c = iid_cells(400000, p, 9);
    const auto s = first_return_distribution(c, 1, ReturnConvention::every_visit);
    CHECK(s.mean_return == doctest::Approx(1.0 / p).epsilon(0.03));
    const auto phi = s.normalized();
    for (int tau : {1, 2, 5, 10}) {
        const double geometric = p * std::pow(1.0 - p, tau - 1);
        CHECK(phi[static_cast<std::size_t>(tau)] == doctest::Approx(geometric).epsilon(0.08));
    }
    // histogram mass equals the number of returns
    CHECK(std::accumulate(s.histogram.begin(), s.histogram.end(), std::uint64_t{0}) == s.sample_count);

    // k-th return matches the negative binomial law
    const auto s2 = kth_return_distribution(c, 1, 2, ReturnConvention::every_visit, true);
    const auto phi2 = s2.normalized();
    for (int tau : {2, 5, 12, 25}) {
        const double nb = (tau - 1) * p * p * std::pow(1.0 - p, tau - 2);
        CHECK(phi2[static_cast<std::size_t>(tau)] == doctest::Approx(nb).epsilon(0.12));
    }

    const auto fit = exponential_tail_fit(s, 2);
    CHECK(fit.r_squared > 0.99);
    CHECK(fit.rate == doctest::Approx(-std::log(1.0 - p)).epsilon(0.1));
}

TEST_CASE("successive returns of an uncorrelated process pass the chi-square test") {
    const auto c = iid_cells(1000000, 0.05, 21);
    for (int k : {2, 3, 4}) {
        const auto r = successive_returns_test(c, 1, k);
        CHECK(r.dof > 5);
        CHECK(r.p_value > 0.01);
    }
    // strictly periodic returns have a point-mass phi_1 whose convolution is exact
    CHECK_THROWS_AS(successive_returns_test(c, 1, 1), InvalidInput);
}

TEST_CASE("correlated returns fail the chi-square test") {
    // Alternate long and short gaps: phi_1 is two spikes but phi_2 is one.
    std::vector<double> v;
    for (int rep = 0; rep < 20000; ++rep) {
        v.push_back(1.0);
        for (int i = 0; i < 2; ++i) v.push_back(0.0);
        v.push_back(1.0);
        for (int i = 0; i < 9; ++i) v.push_back(0.0);
    }
    const auto c = coarse_grain(v, 2);
    CHECK(successive_returns_test(c, 1, 2).p_value < 1e-6);
}

TEST_CASE("Kac lemma") {
    // period 4 through 0, 1, 2, 3: the cell [0, k) is visited k times per period
    std::vector<double> v(10000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 4);
    const std::vector<Interval> cells{{0.0, 0.0}, {0.0, 1.5}, {0.0, 2.5}, {0.0, 3.5}};
    const auto r = mean_recurrence_vs_measure(v, cells, ReturnConvention::every_visit, 1);
    for (std::size_t c = 0; c < 4; ++c) {
        CHECK(r.points[c].inverse_measure == doctest::Approx(4.0 / static_cast<double>(c + 1)));
        CHECK(r.points[c].mean_return == doctest::Approx(4.0 / static_cast<double>(c + 1)).epsilon(1e-3));
    }
    CHECK(r.slope == doctest::Approx(1.0).epsilon(1e-3));

    const auto u = uniform_noise(1000000, 17);
    const auto nested = nested_cells(0.5, 0.5, 6);
    const auto k = mean_recurrence_vs_measure(u, nested);
    CHECK(k.slope == doctest::Approx(1.0).epsilon(0.1));
    CHECK(k.r_squared > 0.99);
    for (const auto& p : k.points) CHECK(p.mean_return * p.measure == doctest::Approx(1.0).epsilon(0.1));

    // the smallest cells hold about 250 visits and are flagged below 1000
    const auto starving = mean_recurrence_vs_measure(u, nested_cells(0.5, 0.5, 12), ReturnConvention::every_visit, 1000);
    CHECK(starving.points.back().dropped);
    CHECK(starving.used < 12);
    CHECK_THROWS_AS(mean_recurrence_vs_measure(u, nested_cells(0.5, 0.5, 3)), InvalidInput);
}

TEST_CASE("return map") {
    const auto v = sinusoid(1000, 40.0);
    const auto m = return_map(v, 1);
    CHECK(m.size() == 999);
    // cos(w t) and cos(w(t+1)) lie on x^2 - 2 c x y + y^2 = s^2
    const double w = 2 * M_PI / 40.0;
    for (const auto& [x, y] : m) {
        CHECK(x * x - 2 * std::cos(w) * x * y + y * y == doctest::Approx(std::sin(w) * std::sin(w)).epsilon(1e-9));
    }
    const auto flat = return_map(std::vector<double>(10, 3.0), 2);
    CHECK(flat.size() == 8);
    for (const auto& pt : flat) CHECK(pt == std::pair{3.0, 3.0});
    CHECK_THROWS_AS(return_map(v, 0), InvalidInput);
}

TEST_CASE("k-d tree agrees with brute force") {
    Rng rng(3);
    const std::size_t rows = 3000, dim = 4;
    std::vector<double> pts(rows * dim);
    for (auto& x : pts) x = std::floor(rng.uniform() * 20.0);  // many ties
    std::vector<std::size_t> ids(rows);
    std::iota(ids.begin(), ids.end(), 0);
    const KdTree tree(pts.data(), rows, dim, ids);
    for (std::size_t q = 0; q < rows; q += 7) {
        auto accept = [&](std::size_t j) { return (j > q ? j - q : q - j) > 5; };
        const auto hit = tree.nearest(&pts[q * dim], accept);
        double best = INFINITY;
            for (std::size_t j = 0; j < rows; ++j) {
            if (!accept(j)) continue;
            double d2 = 0;
            for (std::size_t a = 0; a < dim; ++a) d2 += std::pow(pts[q * dim + a] - pts[j * dim + a], 2);
            best = std::min(best, d2);
        }
        // ties make the id ambiguous, the distance is not
        CHECK(hit.dist2 == best);
        CHECK(accept(hit.id));
    }
}

TEST_CASE("delay helpers") {
    const auto s = sinusoid(20000, 40.0);
    // quarter period, up to the finite-sample bias of the estimator
    const int delay = default_delay(s);
    CHECK(delay >= 10);
    CHECK(delay <= 11);
    CHECK(dominant_period(s) == doctest::Approx(40.0).epsilon(0.01));
    const auto r = autocorrelation(s, 40);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[20] == doctest::Approx(-1.0).epsilon(0.01));
}

TEST_CASE("FNN on calibration signals") {
    FnnOptions o;
    o.d_max = 6;
    const auto clean = fnn_embedding_dimension(sinusoid(20000, 50.0), o);
    CHECK(clean.d_min >= 1);
    CHECK(clean.d_min <= 2);

    const auto logistic = fnn_embedding_dimension(logistic_map(20000), o);
    CHECK(logistic.d_min >= 1);
    CHECK(logistic.d_min <= 2);
    // beyond d_min the fraction does not grow
    for (std::size_t d = static_cast<std::size_t>(logistic.d_min); d < logistic.fnn_fraction.size(); ++d) {
        CHECK(logistic.fnn_fraction[d] <= logistic.fnn_fraction[d - 1] + 1e-4);
    }

    o.d_max = 5;
    const auto noise = fnn_embedding_dimension(white_noise(5000, 8), o);
    CHECK(noise.saturated);
    CHECK(noise.d_min == 0);
    CHECK(noise.fnn_fraction.back() > 0.01);

    o.d_max = 10;
    CHECK_THROWS_AS(fnn_embedding_dimension(sinusoid(50, 20.0), o), InsufficientData);
}

TEST_CASE("FNN fractions do not depend on the thread count") {
    const auto v = noisy_sinusoid(8000, 37.0, 50.0, 4);
    FnnOptions a, b;
    a.threads = 1;
    b.threads = 3;
    CHECK(fnn_embedding_dimension(v, a).fnn_fraction == fnn_embedding_dimension(v, b).fnn_fraction);
}

TEST_CASE("Rosenstein calibration") {
    LyapunovOptions o;
    o.dim = 1;
    o.delay = 1;
    o.theiler = 0;
    o.k_max = 20;
    const auto logistic = logistic_map(100000);
    const auto r = rosenstein_mle(logistic, o);
    CHECK(std::abs(r.slope - std::log(2.0)) < 0.05);

    // direct average of ln|f'(x)| = ln|4 - 8x| along the orbit
    double direct = 0.0;
    for (double x : logistic) direct += std::log(std::abs(4.0 - 8.0 * x));
    direct /= static_cast<double>(logistic.size());
    CHECK(direct == doctest::Approx(std::log(2.0)).epsilon(0.01));

    LyapunovOptions s;
    s.dim = 2;
    s.delay = 12;
    s.k_max = 60;
    for (double period : {50.0, 37.7, 61.803}) {
        CHECK(std::abs(rosenstein_mle(sinusoid(100000, period), s).slope) < 0.005);
    }
}

TEST_CASE("property: Rosenstein slope is scale invariant and thread independent") {
    auto v = logistic_map(30000, 0.41);
    LyapunovOptions o;
    o.dim = 2;
    o.delay = 1;
    o.theiler = 0;
    o.k_max = 15;
    o.fit_range = std::pair{0, 6};
    o.threads = 1;
    const auto base = rosenstein_mle(v, o);
    for (auto& x : v) x *= 37.5;
    o.threads = 4;
    const auto scaled = rosenstein_mle(v, o);
    CHECK(scaled.slope == doctest::Approx(base.slope).epsilon(0.05));
    CHECK(scaled.intercept == doctest::Approx(base.intercept + std::log(37.5)).epsilon(1e-6));
}

TEST_CASE("auto fit range finds the straight part") {
    std::vector<double> curve;
    for (int k = 0; k <= 60; ++k) curve.push_back(k < 10 ? -5.0 + 0.02 * k : k < 40 ? -4.8 + 0.1 * (k - 10) : -1.8);
    const auto [lo, hi] = auto_fit_range(curve);
    CHECK(lo >= 9);
    CHECK(hi <= 41);
    CHECK(hi - lo >= 28);
}
