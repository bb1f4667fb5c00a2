#include "oracles.hpp"

#include "qslam/errors.hpp"
#include "qslam/experiment.hpp"
#include "qslam/io.hpp"
#include "qslam/mrclam.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace qslam;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("qslam_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path fixture_dir = fs::path(QSLAM_DATA_DIR) / "mrclam_fixture";

} // namespace

TEST_CASE("scenario files round trip with angles in degrees")
{
    const auto grid = gen_experiment_grid({NoiseConfig{deg2rad(2.0), deg2rad(5.0)}}, 3, 3, 121);
    const fs::path dir = scratch("scen");
    save_scenarios(dir / "s.json", grid);
    const nlohmann::json doc = read_json_file(dir / "s.json");
    CHECK(doc.at("scenarios")[0].at("noise").at("sigma_v_deg") == 2);
    CHECK(doc.at("scenarios")[0].at("noise").at("sigma_w_deg") == 5);

    const auto back = load_scenarios(dir / "s.json");
    REQUIRE(back.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back[k].id == grid[k].id);
        CHECK(back[k].seed == grid[k].seed);
        CHECK(back[k].noise.sigma_v == doctest::Approx(grid[k].noise.sigma_v).epsilon(1e-12));
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(back[k].trajectory[i].x == grid[k].trajectory[i].x);
            CHECK(back[k].trajectory[i].alpha == doctest::Approx(grid[k].trajectory[i].alpha).epsilon(1e-12));
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(std::abs(wrap_angle(back[k].observations[i].bearings[j] - grid[k].observations[i].bearings[j])) <
                      1e-12);
        }
        REQUIRE(back[k].actions.size() == 2);
        CHECK(back[k].actions[1].from_index == grid[k].actions[1].from_index);
        CHECK(std::abs(wrap_angle(back[k].actions[1].psi - grid[k].actions[1].psi)) < 1e-12);
    }

    // a single bare scenario is accepted too
    write_json_file(dir / "one.json", scenario_to_json(grid[0]));
    CHECK(load_scenarios(dir / "one.json").size() == 1);
}

TEST_CASE("malformed JSON reports the line")
{
    const fs::path dir = scratch("badjson");
    write_text_file(dir / "bad.json", "{\n  \"scenarios\": [\n    {\"id\": 1,,}\n  ]\n}\n");
    try {
        read_json_file(dir / "bad.json");
        FAIL("no exception");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.offset() > 20);
    }
    write_text_file(dir / "shape.json", "{\"scenarios\": [{\"id\": \"x\"}]}");
    CHECK_THROWS_AS(load_scenarios(dir / "shape.json"), ConfigError);
}

TEST_CASE("results rows round trip and bad rows are located")
{
    ResultRow r;
    r.scenario_id = "s4";
    r.triplet = {0, 1, 2};
    r.solver = SolverVariant::baseline;
    r.sigma_v_deg = 2;
    r.sigma_w_deg = 5;
    r.views = 3;
    r.gt_state = 17;
    r.metrics = {0.1234567890123, 0.5, 1.25, 0.2, 0.4, 0.9, 3};
    const std::string text = results_csv(std::vector<ResultRow>{r, r});
    CHECK(text.substr(0, text.find('\n')) == results_csv_header());
    const auto back = parse_results_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].scenario_id == "s4");
    CHECK(back[0].triplet == r.triplet);
    CHECK(back[0].solver == SolverVariant::baseline);
    CHECK(back[0].gt_state == 17);
    CHECK(back[0].metrics.dmse == r.metrics.dmse);
    CHECK(back[0].metrics.gt_rating == 3);
    CHECK(results_csv(back) == text);

    const std::string broken = results_csv_header() + "\n" + results_csv_line(r) + "\ns5,0-1-2,fast,2\n";
    try {
        parse_results_csv(broken);
        FAIL("no exception");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.offset() == results_csv_header().size() + 1 + results_csv_line(r).size() + 1);
    }
    CHECK_THROWS_AS(parse_results_csv("nope\n"), ParseError);
}

TEST_CASE("percentile table matches the frozen copy")
{
    const std::vector<NoiseConfig> grid{{deg2rad(2.0), deg2rad(5.0)}, {deg2rad(4.0), deg2rad(8.0)}};
    const auto scenarios = gen_experiment_grid(grid, 4, 3, 122);
    BatchOptions o;
    o.variants = {SolverVariant::fast, SolverVariant::baseline};
    o.seed = 3;
    std::vector<ResultRow> rows;
    for (const SolveRecord& rec : solve_batch(scenarios, oracle::edc(), o))
        rows.push_back(rec.row);
    const std::string table = percentile_table(rows);

    // 2 solvers x 2 noise cells x 7 metrics, plus the header
    CHECK(std::count(table.begin(), table.end(), '\n') == 29);
    CHECK(table.substr(0, table.find('\n')) == "solver,sigma_v_deg,sigma_w_deg,count,metric,p25,p50,p75");

    const fs::path golden = fs::path(QSLAM_TEST_DIR) / "golden" / "eval_table.csv";
    if (std::getenv("QSLAM_UPDATE_GOLDEN"))
        write_text_file(golden, table);
    REQUIRE(fs::exists(golden));
    CHECK(slurp(golden) == table);
}

TEST_CASE("batches do not depend on the thread count")
{
    const auto scenarios = gen_experiment_grid({NoiseConfig{deg2rad(2.0), deg2rad(5.0)}}, 6, 3, 123);
    BatchOptions o;
    o.variants = {SolverVariant::fast, SolverVariant::baseline};
    auto csv = [&](unsigned threads) {
        o.threads = threads;
        std::vector<ResultRow> rows;
        for (const SolveRecord& rec : solve_batch(scenarios, oracle::edc(), o))
            rows.push_back(rec.row);
        return results_csv(rows);
    };
    const std::string one = csv(1);
    CHECK(one == csv(3));
    CHECK(one == csv(1));
}

TEST_CASE("zero-noise solves give zero error rows")
{
    const auto scenarios = gen_experiment_grid({NoiseConfig{}}, 5, 3, 124);
    BatchOptions o;
    o.variants = {SolverVariant::full};
    int exact = 0;
    for (const SolveRecord& rec : solve_batch(scenarios, oracle::edc(), o)) {
        CHECK(rec.error.empty());
        exact += rec.row.metrics.dmse < 1e-9 ? 1 : 0;
        CHECK(rec.row.gt_state >= 1);
        CHECK(rec.row.gt_state <= 20);
    }
    MESSAGE("exact rows: " << exact << " / 5");
    CHECK(exact >= 1);
}

TEST_CASE("parallel_for covers every index and forwards exceptions")
{
    std::vector<int> hit(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { hit[i] += 1; });
    CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7)
                                         throw ArgumentError("seven");
                                 }),
                    ArgumentError);
}

TEST_CASE("fixture ingestion")
{
    const MrclamBundle b = load_mrclam(fixture_dir);
    REQUIRE(b.robots.size() == 2);
    CHECK(b.landmark_gt.size() == 15);
    const MrclamIngest in = ingest_mrclam(b);
    REQUIRE(in.scenarios.size() == 2);
    CHECK(in.unknown_barcodes > 0);
    CHECK(in.robot_measurements > 0);

    for (const Scenario& s : in.scenarios) {
        const auto triplets = observed_triplets(s);
        MESSAGE(s.id << ": " << triplets.size() << " triplets");
        CHECK(triplets.size() >= 16);
        CHECK(triplets.size() <= 230);
        for (const TripletId& t : triplets) {
            CHECK(t.a < t.b);
            CHECK(t.b < t.c);
            const TripletFrameData d = to_triplet_frame(s, t);
            CHECK(d.observations.size() >= 3);
            CHECK(d.actions.size() == d.observations.size() - 1);
            for (std::size_t i = 1; i < d.observations.size(); ++i)
                CHECK(d.observations[i].time_index > d.observations[i - 1].time_index);

            // ground truth state through an independent frame transform
            const Vec2 c = oracle::to_frame(s.landmarks.at(t.a), s.landmarks.at(t.b), s.landmarks.at(t.c));
            const TripletTruth truth = triplet_truth(d, oracle::edc());
            if (const auto ref = oracle::edc_state(c, 4e-3))
                CHECK(truth.landmark_state == *ref);
            CHECK(distance(c, d.landmark_c) < 1e-9);
        }
    }
}

TEST_CASE("a view needs three landmarks")
{
    MrclamBundle b;
    b.landmark_gt = {{6, {2.0, 0.0}}, {7, {2.0, 1.0}}, {8, {3.0, 0.5}}};
    b.barcode_to_subject = {{60, 6}, {70, 7}, {80, 8}};
    MrclamRobot r;
    r.robot = 1;
    // slow translation, fast turning: within a view the heading moves far more than the parallax
    for (int k = 0; k <= 200; ++k)
        r.groundtruth.push_back({0.1 * k, -1.0 + 0.003 * k, 0.2 * std::sin(0.02 * k), 0.4 * std::sin(0.3 * k)});
    auto sight = [&](double t, int barcode) {
        Pose2 p;
        REQUIRE(interpolate_pose(r.groundtruth, t, p));
        const int subject = b.barcode_to_subject.at(barcode);
        r.measurements.push_back({t, barcode, distance(p.position(), b.landmark_gt.at(subject)),
                                  bearing_to(b.landmark_gt.at(subject), p)});
    };
    // t = 1: two landmarks only; t = 4, 8, 12, 16: all three
    sight(1.0, 60);
    sight(1.1, 70);
    for (double t : {4.0, 8.0, 12.0, 16.0}) {
        sight(t, 60);
        sight(t + 0.02, 70);
        sight(t + 0.04, 80);
    }
    r.measurements.push_back({5.0, 99, 1.0, 0.1});
    b.robots.push_back(r);

    const MrclamIngest in = ingest_mrclam(b);
    REQUIRE(in.scenarios.size() == 1);
    const Scenario& s = in.scenarios[0];
    CHECK(in.unknown_barcodes == 1);
    REQUIRE(s.observations.size() == 4);
    for (const Observation& o : s.observations) {
        CHECK(o.triplet == TripletId{6, 7, 8});
        const Pose2& p = s.trajectory.at(std::size_t(o.time_index));
        // bearings are re-referenced to the view heading, so they agree with the stored pose
        for (std::size_t k = 0; k < 3; ++k) {
            const int id = k == 0 ? 6 : k == 1 ? 7 : 8;
            CHECK(std::abs(wrap_angle(o.bearings[k] - bearing_to(s.landmarks.at(id), p))) < 2e-3);
        }
    }
    CHECK(s.actions.size() == 3);

    // at zero noise the fast solver recovers the landmark state
    const TripletFrameData d = to_triplet_frame(s, {6, 7, 8});
    Rng rng(7);
    const TripletPosterior post = solve_fast(d.observations, d.actions, s.noise, oracle::edc(), {}, rng);
    CHECK(post.landmark_state.argmax() == triplet_truth(d, oracle::edc()).landmark_state);
}

TEST_CASE("ground truth interpolation")
{
    const std::vector<MrclamPose> gt{{0.0, 0.0, 0.0, 3.0}, {1.0, 2.0, 4.0, -3.0}};
    Pose2 p;
    REQUIRE(interpolate_pose(gt, 0.25, p));
    CHECK(p.x == doctest::Approx(0.5));
    CHECK(p.y == doctest::Approx(1.0));
    // shortest arc from 3 to -3 passes through pi
    CHECK(std::abs(wrap_angle(p.alpha - (3.0 + 0.25 * (2.0 * kPi - 6.0)))) < 1e-12);
    CHECK_FALSE(interpolate_pose(gt, -0.1, p));
    CHECK_FALSE(interpolate_pose(gt, 1.1, p));
}

TEST_CASE("malformed dataset files")
{
    const fs::path dir = scratch("mrclam_bad");
    for (const auto& e : fs::directory_iterator(fixture_dir))
        fs::copy_file(e.path(), dir / e.path().filename());
    {
        std::ofstream out(dir / "Robot2_Measurement.dat", std::ios::app);
        out << "12.5\t7\tabc\t0.1\n";
    }
    try {
        load_mrclam(dir);
        FAIL("no exception");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("Robot2_Measurement.dat") != std::string::npos);
        CHECK(e.line() > 1);
    }

    const fs::path back = scratch("mrclam_backwards");
    for (const auto& e : fs::directory_iterator(fixture_dir))
        fs::copy_file(e.path(), back / e.path().filename());
    {
        std::ofstream out(back / "Robot1_Groundtruth.dat", std::ios::app);
        out << "0.05\t0\t0\t0\n";
    }
    CHECK_THROWS_AS(load_mrclam(back), ParseError);
    CHECK_THROWS_AS(load_mrclam(scratch("mrclam_empty")), ConfigError);
}
