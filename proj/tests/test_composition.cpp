#include "oracles.hpp"

#include "qslam/composition.hpp"
#include "qslam/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace qslam;

namespace {

StateVector random_vector(Rng& rng, std::size_t d)
{
    std::vector<double> v(d);
    for (double& x : v)
        x = uniform(rng, 0.0, 1.0);
    StateVector s(std::move(v));
    s.normalize();
    return s;
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("qslam_test_" + name);
}

} // namespace

TEST_CASE("probabilistic and deterministic builds are normalised")
{
    const CompositionTensor& t = oracle::small_edc_tensor();
    CHECK(t.dim() == 20);
    CHECK(t.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(t.partition_name == "edc");

    TensorBuildOptions o;
    o.samples_per_region = 50;
    o.mode = CompositionMode::deterministic;
    const CompositionTensor det = build_tensor(SpacePartition::bundled("double_cross"), o);
    CHECK(det.sum() == doctest::Approx(1.0).epsilon(1e-9));
    std::set<double> values;
    for (const auto& e : det.entries())
        values.insert(e.value);
    CHECK(values.size() == 1);
}

TEST_CASE("builds are reproducible under a fixed seed")
{
    TensorBuildOptions o;
    o.samples_per_region = 40;
    o.seed = 3;
    const SpacePartition dc = SpacePartition::bundled("double_cross");
    const CompositionTensor a = build_tensor(dc, o), b = build_tensor(dc, o);
    const auto ea = a.entries(), eb = b.entries();
    REQUIRE(ea.size() == eb.size());
    for (std::size_t n = 0; n < ea.size(); ++n) {
        CHECK(ea[n].i == eb[n].i);
        CHECK(ea[n].value == eb[n].value);
    }
    o.threads = 3;
    const CompositionTensor c = build_tensor(dc, o);
    const auto ec = c.entries();
    REQUIRE(ec.size() == ea.size());
    for (std::size_t n = 0; n < ea.size(); ++n)
        CHECK(ec[n].value == ea[n].value);
}

TEST_CASE("deterministic support is stable against a denser probabilistic build")
{
    // the double cross has few, wide intersections: supports agree exactly
    const SpacePartition dc = SpacePartition::bundled("double_cross");
    TensorBuildOptions o;
    o.samples_per_region = 100;
    o.mode = CompositionMode::deterministic;
    const CompositionTensor det = build_tensor(dc, o);
    o.samples_per_region = 400;
    o.mode = CompositionMode::probabilistic;
    const CompositionTensor dense = build_tensor(dc, o);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            for (std::size_t k = 0; k < 6; ++k)
                CHECK((det(i, j, k) > 0) == (dense(i, j, k) > 0));
}

TEST_CASE("QCT1 files round trip")
{
    const CompositionTensor& t = oracle::small_edc_tensor();
    const auto path = temp_path("roundtrip.qct");
    t.save(path);
    const CompositionTensor back = CompositionTensor::load(path);
    CHECK(back.dim() == t.dim());
    CHECK(back.partition_name == t.partition_name);
    CHECK(back.sample_count == t.sample_count);
    CHECK(back.seed == t.seed);
    CHECK(back.mode == t.mode);
    const auto a = t.entries(), b = back.entries();
    REQUIRE(a.size() == b.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        CHECK(a[n].i == b[n].i);
        CHECK(a[n].j == b[n].j);
        CHECK(a[n].k == b[n].k);
        CHECK(a[n].value == b[n].value);
    }
    {
        std::ofstream bad(path, std::ios::binary);
        bad << "QCT0garbage";
    }
    CHECK_THROWS_AS(CompositionTensor::load(path), ParseError);
    {
        std::ofstream cut(path, std::ios::binary);
        cut.write("QCT1", 4);
    }
    CHECK_THROWS_AS(CompositionTensor::load(path), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("joint probability")
{
    const CompositionTensor& t = oracle::small_edc_tensor();
    const auto entries = t.entries();
    const auto& e = entries.front();
    const std::size_t d = t.dim();
    CHECK(joint_probability(t, StateVector::delta(d, e.i), StateVector::delta(d, e.j), StateVector::delta(d, e.k), e.i,
                            e.j, e.k) == e.value);
    // find a zero entry
    std::size_t zi = 0, zj = 0, zk = 0;
    for (std::size_t n = 0; n < d * d * d; ++n)
        if (t(n / (d * d), (n / d) % d, n % d) == 0.0) {
            zi = n / (d * d), zj = (n / d) % d, zk = n % d;
            break;
        }
    const StateVector u = StateVector::uniform(d);
    CHECK(joint_probability(t, u, u, u, zi, zj, zk) == 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                total += joint_probability(t, u, u, u, i, j, k);
    CHECK(total == doctest::Approx(1.0 / double(d * d * d)).epsilon(1e-9));
    CHECK_THROWS_AS(joint_probability(t, u, u, u, d, 0, 0), ArgumentError);
}

TEST_CASE("marginals of deltas are normalised slices")
{
    const CompositionTensor& t = oracle::small_edc_tensor();
    const auto e = t.entries()[t.entries().size() / 2];
    const std::size_t d = t.dim();
    const MarginalResult m = marginal(t, StateVector::delta(d, e.j), StateVector::delta(d, e.k));
    CHECK(m.informative);
    double slice = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        slice += t(i, e.j, e.k);
    for (std::size_t i = 0; i < d; ++i)
        CHECK(m.belief[i] == doctest::Approx(t(i, e.j, e.k) / slice).epsilon(1e-12));
}

TEST_CASE("marginals match the triple-loop contraction on every slot")
{
    const CompositionTensor& t = oracle::small_edc_tensor();
    Rng rng(51);
    for (int n = 0; n < 30; ++n) {
        const StateVector u = random_vector(rng, 20), v = random_vector(rng, 20);
        for (int slot = 0; slot < 3; ++slot) {
            const auto ref = oracle::contract(t, slot, u, v);
            const MarginalResult m = marginal_onto(t, slot, u, v);
            double worst = 0.0;
            for (std::size_t i = 0; i < 20; ++i)
                worst = std::max(worst, std::abs(m.belief[i] - ref[i]));
            CHECK(worst <= 1e-12);
            CHECK(m.belief.sum() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("a vanishing contraction is flagged and uniform")
{
    CompositionTensor t(3);
    t.set(0, 0, 0, 1.0);
    const MarginalResult m = marginal(t, StateVector::delta(3, 1), StateVector::delta(3, 2));
    CHECK_FALSE(m.informative);
    CHECK(m.belief[0] == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(marginal(t, StateVector::uniform(4), StateVector::uniform(3)), ArgumentError);
    CHECK_THROWS_AS(marginal_onto(t, 3, StateVector::uniform(3), StateVector::uniform(3)), ArgumentError);
}

TEST_CASE("composition modes parse")
{
    CHECK(composition_mode_from_string(to_string(CompositionMode::deterministic)) == CompositionMode::deterministic);
    CHECK_THROWS_AS(composition_mode_from_string("fuzzy"), ArgumentError);
    TensorBuildOptions o;
    o.samples_per_region = 0;
    CHECK_THROWS_AS(build_tensor(SpacePartition::bundled("double_cross"), o), ArgumentError);
}
