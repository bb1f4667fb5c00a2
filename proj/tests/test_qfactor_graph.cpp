#include "oracles.hpp"

#include "qslam/errors.hpp"
#include "qslam/qfactor_graph.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace qslam;

namespace {

double distance_between(const StateVector& a, const StateVector& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

std::size_t true_state(const std::vector<Vec2>& lm, const TripletId& t)
{
    return oracle::edc().classify(oracle::to_frame(lm[std::size_t(t.a)], lm[std::size_t(t.b)], lm[std::size_t(t.c)]));
}

// noisy estimate around the truth: 0.7 on it, the rest on three other states
StateVector noisy_unary(std::size_t truth, Rng& rng)
{
    std::vector<double> v(20, 0.0);
    v[truth] = 0.7;
    std::uniform_int_distribution<std::size_t> pick(0, 19);
    for (int n = 0; n < 3; ++n)
        v[pick(rng)] += 0.1;
    return StateVector(v);
}

QualitativeFactorGraph chain(std::optional<StateVector> first)
{
    QualitativeFactorGraph g;
    const int a = g.add_variable({0, 1, 2}, std::move(first));
    const int b = g.add_variable({1, 2, 3});
    const int c = g.add_variable({0, 1, 3});
    g.add_factor({a, b, c});
    return g;
}

} // namespace

TEST_CASE("information score")
{
    CHECK(information_score(StateVector::uniform(20)) == doctest::Approx(0.0));
    CHECK(information_score(StateVector::delta(20, 3)) == 1.0);
    std::vector<double> two(20, 0.0);
    two[1] = two[7] = 0.5;
    CHECK(information_score(StateVector(two)) == doctest::Approx(1.0 - std::log(2.0) / std::log(20.0)).epsilon(1e-12));
    CHECK(information_score(StateVector(two)) == doctest::Approx(0.7686).epsilon(1e-4));
}

TEST_CASE("single factor: both unseen nodes take the slice marginals in one commit")
{
    const CompositionTensor& t = oracle::small_edc_tensor();
    const std::size_t s = t.entries()[10].i;
    QualitativeFactorGraph g = chain(StateVector::delta(20, s));
    const PropagationTrace trace = propagate(g, t);
    REQUIRE(trace.commits.size() == 1);
    CHECK(trace.commits[0] == std::vector<int>{1, 2});

    const StateVector u = StateVector::uniform(20), seen = StateVector::delta(20, s);
    const auto on_b = oracle::contract(t, 1, seen, u);
    const auto on_d = oracle::contract(t, 2, seen, u);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(g.variable(1).belief[i] == doctest::Approx(on_b[i]).epsilon(1e-12));
        CHECK(g.variable(2).belief[i] == doctest::Approx(on_d[i]).epsilon(1e-12));
    }
    CHECK(g.variable(1).updated);
    CHECK(g.variable(1).isc == doctest::Approx(information_score(g.variable(1).belief)).epsilon(1e-12));
    CHECK(g.variable(0).belief == seen);

    // single factor: propagation is exact
    const auto exact = eliminate_exact(g, t);
    for (int id = 0; id < 3; ++id)
        CHECK(distance_between(exact[std::size_t(id)], g.variable(id).belief) < 1e-12);
}

TEST_CASE("unreachable nodes end uniform")
{
    const CompositionTensor& t = oracle::small_edc_tensor();
    QualitativeFactorGraph g = chain(StateVector::delta(20, t.entries()[0].i));
    const int island = g.add_variable({5, 6, 7});
    propagate(g, t);
    CHECK_FALSE(g.variable(island).updated);
    CHECK(g.variable(island).isc == 0.0);
    CHECK(g.variable(island).belief == StateVector::uniform(20));

    QualitativeFactorGraph blind = chain(std::nullopt);
    const PropagationTrace none = propagate(blind, t);
    CHECK(none.commits.empty());
    for (const VariableNode& v : blind.variables())
        CHECK(v.belief == StateVector::uniform(20));
}

TEST_CASE("propagation tracks exact elimination on small random graphs")
{
    const CompositionTensor& t = oracle::small_edc_tensor();
    Rng rng(71);
    std::uniform_real_distribution<double> xs(-3.0, 3.0), ys(-3.0, 4.0);
    int cases = 0, close = 0;
    while (cases < 200) {
        const int n_lm = 4 + int(rng() % 2);
        std::vector<Vec2> lm;
        for (int i = 0; i < n_lm; ++i)
            lm.push_back({xs(rng), ys(rng)});
        std::uniform_int_distribution<int> pick(0, n_lm - 1);
        const std::size_t n_factors = 1 + rng() % 3;
        std::set<std::array<int, 4>> quads;
        while (quads.size() < n_factors) {
            std::array<int, 4> q{pick(rng), pick(rng), pick(rng), pick(rng)};
            if (std::set<int>(q.begin(), q.end()).size() == 4)
                quads.insert(q);
        }
        std::vector<TripletId> triplets;
        std::vector<std::array<TripletId, 3>> ftrip;
        for (const auto& q : quads) {
            std::array<TripletId, 3> f{TripletId{q[0], q[1], q[2]}, TripletId{q[1], q[2], q[3]}, TripletId{q[0], q[1], q[3]}};
            for (const TripletId& x : f)
                if (std::find(triplets.begin(), triplets.end(), x) == triplets.end())
                    triplets.push_back(x);
            ftrip.push_back(f);
        }
        if (triplets.size() > 6)
            continue;

        QualitativeFactorGraph g;
        const std::size_t n_seen = std::max<std::size_t>(1, triplets.size() / 2);
        for (std::size_t i = 0; i < triplets.size(); ++i)
            g.add_variable(triplets[i], i < n_seen ? std::optional(noisy_unary(true_state(lm, triplets[i]), rng))
                                                   : std::nullopt);
        for (const auto& f : ftrip)
            g.add_factor({*g.find(f[0]), *g.find(f[1]), *g.find(f[2])});

        const auto exact = eliminate_exact(g, t);
        const PropagationTrace trace = propagate(g, t);
        ++cases;
        bool ok = true;
        for (const auto& commit : trace.commits)
            for (int id : commit)
                ok = ok && distance_between(g.variable(id).belief, exact[g.index_of(id)]) <= 0.35;
        close += ok ? 1 : 0;

        // every node is committed at most once and never more iterations than variables
        std::set<int> committed;
        for (const auto& commit : trace.commits)
            for (int id : commit) {
                CHECK_FALSE(g.variable(id).seen);
                CHECK(committed.insert(id).second);
            }
        CHECK(trace.commits.size() <= g.variables().size());
        for (const VariableNode& v : g.variables()) {
            CHECK(v.belief.sum() == doctest::Approx(1.0));
            CHECK(v.isc >= 0.0);
            CHECK(v.isc <= 1.0);
        }
    }
    MESSAGE("cases within 0.35 of exact elimination: " << close << " / " << cases);
    CHECK(close >= 160);
}

TEST_CASE("topology score decay")
{
    QualitativeFactorGraph g = chain(StateVector::delta(20, 0));
    topology_score(g, 0.5);
    CHECK(g.variable(0).tsc == 1.0);
    CHECK(g.variable(1).tsc == doctest::Approx(0.5));
    CHECK(g.variable(2).tsc == doctest::Approx(0.5));

    // selection mode: two seen sources start at 1 whatever their estimates
    QualitativeFactorGraph two;
    const int a = two.add_variable({0, 1, 2}, StateVector::uniform(20));
    const int b = two.add_variable({1, 2, 3}, StateVector::uniform(20));
    const int c = two.add_variable({0, 1, 3});
    two.add_factor({a, b, c});
    topology_score(two, 0.5, true);
    CHECK(two.variable(c).tsc == doctest::Approx(0.75));

    // all seen: no iterations, tsc equals the information score
    QualitativeFactorGraph all;
    std::vector<double> half(20, 0.0);
    half[0] = half[1] = 0.5;
    const int x = all.add_variable({0, 1, 2}, StateVector(half));
    const int y = all.add_variable({1, 2, 3}, StateVector::delta(20, 4));
    const int z = all.add_variable({0, 1, 3}, StateVector::uniform(20));
    all.add_factor({x, y, z});
    const PropagationTrace trace = topology_score(all, 0.5);
    CHECK(trace.commits.empty());
    CHECK(all.variable(x).tsc == doctest::Approx(information_score(StateVector(half))));
    CHECK(all.variable(y).tsc == 1.0);
    CHECK(all.variable(z).tsc == doctest::Approx(0.0));

    CHECK_THROWS_AS(topology_score(g, 0.0), ArgumentError);
    CHECK_THROWS_AS(topology_score(g, 1.0), ArgumentError);
}

TEST_CASE("two-source decay evaluates the reduced factor")
{
    // sources with information scores 0.8 and 0.6 are built from two-state splits
    auto with_score = [](double target) {
        // bisection on the mass of one state against the rest spread uniformly
        double lo = 1.0 / 20, hi = 1.0;
        for (int n = 0; n < 200; ++n) {
            const double m = 0.5 * (lo + hi);
            std::vector<double> v(20, (1.0 - m) / 19);
            v[0] = m;
            (information_score(StateVector(v)) < target ? lo : hi) = m;
        }
        std::vector<double> v(20, (1.0 - lo) / 19);
        v[0] = lo;
        return StateVector(v);
    };
    QualitativeFactorGraph g;
    const int a = g.add_variable({0, 1, 2}, with_score(0.8));
    const int b = g.add_variable({1, 2, 3}, with_score(0.6));
    const int c = g.add_variable({0, 1, 3});
    g.add_factor({a, b, c});
    topology_score(g, 0.5);
    CHECK(g.variable(a).tsc == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(g.variable(b).tsc == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(g.variable(c).tsc == doctest::Approx(0.525).epsilon(1e-9));
}

TEST_CASE("scores decay strictly along a path")
{
    // seen 0 -> factor {0,1,2} -> factor {2,3,4} -> factor {4,5,6}
    QualitativeFactorGraph g;
    g.add_variable({0, 1, 2}, StateVector::delta(20, 0));
    for (int k = 1; k < 7; ++k)
        g.add_variable({k, k + 10, k + 20});
    g.add_factor({0, 1, 2});
    g.add_factor({2, 3, 4});
    g.add_factor({4, 5, 6});
    const PropagationTrace trace = topology_score(g, 0.5);
    CHECK(trace.commits.size() == 3);
    CHECK(g.variable(2).tsc == doctest::Approx(0.5));
    CHECK(g.variable(4).tsc == doctest::Approx(0.25));
    CHECK(g.variable(6).tsc == doctest::Approx(0.125));
    CHECK(g.variable(2).tsc > g.variable(4).tsc);
    CHECK(g.variable(4).tsc > g.variable(6).tsc);

    composition_level(g);
    CHECK(*g.variable(0).cl == 0);
    CHECK(*g.variable(1).cl == 1);
    CHECK(*g.variable(4).cl == 2);
    CHECK(*g.variable(6).cl == 3);
    CHECK(g.variable(6).cl_score == 0.0);
    CHECK(g.variable(0).cl_score == 1.0);
    CHECK(g.variable(2).cl_score == doctest::Approx(2.0 / 3));
}

TEST_CASE("composition level takes the smaller source level")
{
    // 1 and 2 reach level 1; the tie at level 2 goes to the earlier factor {2, 3, 4}, so
    // factor {1, 3, 5} closes with sources at levels 1 and 2
    QualitativeFactorGraph g;
    g.add_variable({0, 1, 2}, StateVector::delta(20, 0));
    for (int k = 1; k < 6; ++k)
        g.add_variable({k, k + 10, k + 20});
    g.add_factor({0, 1, 2});
    g.add_factor({2, 3, 4});
    g.add_factor({1, 3, 5});
    const int island = g.add_variable({40, 41, 42});
    const PropagationTrace trace = composition_level(g);
    REQUIRE(trace.commits.size() == 3);
    CHECK(trace.commits[1] == std::vector<int>{3, 4});
    CHECK(trace.commits[2] == std::vector<int>{5});
    CHECK(*g.variable(1).cl == 1);
    CHECK(*g.variable(3).cl == 2);
    CHECK(*g.variable(5).cl == 2);
    CHECK_FALSE(g.variable(island).cl.has_value());
    CHECK(g.variable(island).cl_score == 0.0);
}

TEST_CASE("connectivity score")
{
    QualitativeFactorGraph g;
    for (int k = 0; k < 10; ++k)
        g.add_variable({k, k + 10, k + 20});
    for (VariableNode& v : g.variables())
        v.tsc = 0.3;
    CHECK(connectivity_score(g) == 0.0);
    for (std::size_t k = 0; k < 10; ++k)
        g.variables()[k].tsc = 0.05 + 0.1 * double(k);
    CHECK(connectivity_score(g) == doctest::Approx(std::log(10.0)).epsilon(1e-12));

    Rng rng(72);
    for (VariableNode& v : g.variables())
        v.tsc = uniform(rng, 0.0, 1.0);
    const double before = connectivity_score(g);
    std::vector<double> scores;
    for (const VariableNode& v : g.variables())
        scores.push_back(v.tsc);
    std::shuffle(scores.begin(), scores.end(), rng);
    for (std::size_t k = 0; k < 10; ++k)
        g.variables()[k].tsc = scores[k];
    CHECK(connectivity_score(g) == before);
}

TEST_CASE("exact elimination")
{
    const CompositionTensor& t = oracle::small_edc_tensor();
    QualitativeFactorGraph lone;
    std::vector<double> v(20, 1.0);
    v[2] = 5.0;
    lone.add_variable({0, 1, 2}, StateVector(v));
    const auto m = eliminate_exact(lone, t);
    CHECK(m[0][2] == doctest::Approx(5.0 / 24));

    QualitativeFactorGraph big;
    for (int k = 0; k < 9; ++k)
        big.add_variable({k, k + 10, k + 20});
    CHECK_THROWS_AS(eliminate_exact(big, t), ArgumentError);
    CHECK_THROWS_AS(propagate(big, CompositionTensor(6)), ArgumentError);
}

TEST_CASE("graph structure and files")
{
    QualitativeFactorGraph g = chain(StateVector::delta(20, 2));
    CHECK_THROWS_AS(g.add_variable({0, 1, 2}), ArgumentError);
    CHECK_THROWS_AS(g.add_factor({0, 0, 1}), ArgumentError);
    CHECK_THROWS_AS(g.add_factor({0, 1, 17}), ArgumentError);
    CHECK_THROWS_AS(g.set_unary(1, StateVector::uniform(20)), ArgumentError);

    propagate(g, oracle::small_edc_tensor());
    topology_score(g);
    const QualitativeFactorGraph back = QualitativeFactorGraph::from_json(g.to_json());
    REQUIRE(back.variables().size() == 3);
    for (int id = 0; id < 3; ++id) {
        CHECK(back.variable(id).triplet == g.variable(id).triplet);
        CHECK(back.variable(id).seen == g.variable(id).seen);
        CHECK(back.variable(id).belief == g.variable(id).belief);
        CHECK(back.variable(id).tsc == g.variable(id).tsc);
    }
    CHECK(back.factors().size() == 1);
    CHECK(*back.unary(0) == *g.unary(0));
    CHECK_THROWS_AS(QualitativeFactorGraph::from_json(nlohmann::json{{"variables", 3}}), ConfigError);
}
