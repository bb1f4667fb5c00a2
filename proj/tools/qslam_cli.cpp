#include "qslam/composition.hpp"
#include "qslam/errors.hpp"
#include "qslam/experiment.hpp"
#include "qslam/io.hpp"
#include "qslam/mrclam.hpp"
#include "qslam/qfactor_graph.hpp"
#include "qslam/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace qslam;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string partition = "edc";
    fs::path out_dir = ".";
    std::optional<double> sigma_v_deg;
    std::optional<double> sigma_w_deg;
    int views = 3;
    std::size_t scenarios = 300;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    app->add_option("--threads", c.threads, "Worker threads")->capture_default_str();
    app->add_option("--partition", c.partition, "Bundled partition name or JSON path")->capture_default_str();
    app->add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str();
    app->add_option("--sigma-v-deg", c.sigma_v_deg, "Bearing noise, degrees");
    app->add_option("--sigma-w-deg", c.sigma_w_deg, "Heading noise, degrees");
    app->add_option("--views", c.views, "Views per triplet")->capture_default_str();
    app->add_option("--scenarios", c.scenarios, "Scenarios to generate (per grid cell for grids)")->capture_default_str();
}

std::optional<NoiseConfig> noise_override(const Common& c)
{
    if (!c.sigma_v_deg && !c.sigma_w_deg)
        return std::nullopt;
    if (!c.sigma_v_deg || !c.sigma_w_deg)
        throw ArgumentError("--sigma-v-deg and --sigma-w-deg go together");
    return NoiseConfig{deg2rad(*c.sigma_v_deg), deg2rad(*c.sigma_w_deg)};
}

/// One graph, with its scenario when the file holds graph scenarios.
struct GraphInput {
    std::string id;
    QualitativeFactorGraph graph;
    std::optional<Scenario> scenario;
    double coverage_rate = 0.0;
};

/// Accepts a bare graph, one graph scenario, or {"graph_scenarios": [...]}.
std::vector<GraphInput> load_graphs(const fs::path& path)
{
    const nlohmann::json doc = read_json_file(path);
    std::vector<GraphInput> out;
    auto add = [&](const nlohmann::json& j) {
        if (!j.contains("scenario")) {
            out.push_back({"graph" + std::to_string(out.size()), QualitativeFactorGraph::from_json(j.at("graph")),
                           std::nullopt, 0.0});
            return;
        }
        GraphScenario g = graph_scenario_from_json(j);
        std::string id = g.scenario.id.empty() ? "graph" + std::to_string(out.size()) : g.scenario.id;
        out.push_back({std::move(id), std::move(g.graph), std::move(g.scenario), g.coverage_rate});
    };
    if (doc.contains("graph_scenarios"))
        for (const auto& j : doc["graph_scenarios"])
            add(j);
    else if (doc.contains("graph"))
        add(doc);
    else
        out.push_back({"graph0", QualitativeFactorGraph::from_json(doc), std::nullopt, 0.0});
    return out;
}

void save_graphs(const fs::path& path, const std::vector<GraphInput>& graphs)
{
    nlohmann::json list = nlohmann::json::array();
    for (const GraphInput& in : graphs) {
        if (in.scenario)
            list.push_back(
                graph_scenario_to_json({*in.scenario, in.graph, in.coverage_rate, connectivity_score(in.graph)}));
        else
            list.push_back({{"graph", in.graph.to_json()}});
    }
    write_json_file(path, {{"graph_scenarios", list}});
}

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// ---------------------------------------------------------------------------

int run_gen(const Common& c, const std::string& kind, const GraphScenarioConfig& gcfg)
{
    const NoiseConfig noise = noise_override(c).value_or(NoiseConfig{deg2rad(2.0), deg2rad(5.0)});
    if (kind == "triplet") {
        std::vector<Scenario> out = gen_experiment_grid({noise}, c.scenarios, c.views, c.seed);
        save_scenarios(c.out_dir / "scenarios.json", out);
        std::cout << "scenarios " << out.size() << "\n";
    } else if (kind == "grid") {
        std::vector<Scenario> out = gen_experiment_grid(default_noise_grid(), c.scenarios, c.views, c.seed);
        save_scenarios(c.out_dir / "scenarios.json", out);
        std::cout << "scenarios " << out.size() << "\n";
    } else if (kind == "graph") {
        GraphScenarioConfig cfg = gcfg;
        cfg.views = c.views;
        cfg.noise = noise;
        nlohmann::json doc;
        doc["graph_scenarios"] = nlohmann::json::array();
        for (std::size_t k = 0; k < c.scenarios; ++k) {
            Rng rng = stream_rng(c.seed, k);
            GraphScenario g = gen_graph_scenario(cfg, rng);
            g.scenario.id = "graph" + std::to_string(k);
            doc["graph_scenarios"].push_back(graph_scenario_to_json(g));
        }
        write_json_file(c.out_dir / "graph_scenarios.json", doc);
        std::cout << "graph scenarios " << c.scenarios << "\n";
    } else {
        throw ArgumentError("unknown scenario kind '" + kind + "'");
    }
    return 0;
}

int run_build_tensor(const Common& c, std::size_t samples, const std::string& mode, std::optional<fs::path> out,
                     bool reuse)
{
    const SpacePartition partition = SpacePartition::bundled(c.partition);
    TensorBuildOptions opt;
    opt.samples_per_region = samples;
    opt.mode = mode == "prob" ? CompositionMode::probabilistic
                              : mode == "det" ? CompositionMode::deterministic : composition_mode_from_string(mode);
    opt.seed = c.seed;
    opt.threads = c.threads;
    const fs::path path = out.value_or(c.out_dir / (partition.name() + "_" + to_string(opt.mode) + "_" +
                                                    std::to_string(samples) + "_s" + std::to_string(c.seed) + ".qct"));
    if (reuse && fs::exists(path)) {
        const CompositionTensor cached = CompositionTensor::load(path);
        if (cached.partition_name == partition.name() && cached.mode == opt.mode && cached.sample_count == samples &&
            cached.seed == c.seed && cached.dim() == partition.size()) {
            std::cout << "nonzeros " << cached.nonzero_count() << " (cached " << path.string() << ")\n";
            return 0;
        }
    }
    const CompositionTensor t = build_tensor(partition, opt);
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    t.save(path);
    std::cout << "nonzeros " << t.nonzero_count() << "\n";
    return 0;
}

int run_solve(const Common& c, const std::vector<fs::path>& inputs, const std::vector<std::string>& solvers)
{
    const SpacePartition partition = SpacePartition::bundled(c.partition);
    std::vector<Scenario> scenarios;
    for (const fs::path& p : inputs) {
        auto more = load_scenarios(p);
        scenarios.insert(scenarios.end(), more.begin(), more.end());
    }
    BatchOptions opt;
    opt.variants.clear();
    for (const std::string& s : solvers)
        opt.variants.push_back(solver_variant_from_string(s));
    opt.seed = c.seed;
    opt.threads = c.threads;
    opt.noise = noise_override(c);
    const auto records = solve_batch(scenarios, partition, opt);

    std::vector<ResultRow> rows;
    nlohmann::json posteriors = nlohmann::json::array();
    std::size_t failures = 0;
    for (const SolveRecord& r : records) {
        rows.push_back(r.row);
        const Scenario& sc = scenarios[r.job.scenario];
        nlohmann::json j = posterior_to_json(sc.id, r.job.triplet, r.posterior, opt.noise.value_or(sc.noise), r.row.views);
        if (!r.error.empty()) {
            j["error"] = r.error;
            ++failures;
        }
        posteriors.push_back(std::move(j));
    }
    write_text_file(c.out_dir / "results.csv", results_csv(rows));
    write_text_file(c.out_dir / "timings.csv", timings_csv(rows));
    write_json_file(c.out_dir / "posteriors.json", {{"posteriors", posteriors}});
    std::cout << "solved " << rows.size() << " triplets";
    if (failures)
        std::cout << " (" << failures << " failed, uniform estimate recorded)";
    std::cout << "\n";
    return 0;
}

/// Fills each seen variable's unary from its observations.
void solve_seen(GraphInput& in, const SpacePartition& partition, SolverVariant variant, std::uint64_t seed)
{
    if (!in.scenario)
        return;
    const auto present = observed_triplets(*in.scenario);
    SolverParams params;
    for (VariableNode& v : in.graph.variables()) {
        if (!v.seen || std::find(present.begin(), present.end(), v.triplet) == present.end())
            continue;
        const TripletFrameData data = to_triplet_frame(*in.scenario, v.triplet);
        Rng rng = stream_rng(seed, std::uint64_t(v.id));
        try {
            TripletPosterior post =
                solve(variant, data.observations, data.actions, in.scenario->noise, partition, params, rng);
            in.graph.set_unary(v.id, post.landmark_state);
        } catch (const Error& e) {
            std::cerr << "warning: triplet " << format_triplet(v.triplet) << ": " << e.what() << "\n";
        }
    }
}

std::map<int, std::size_t> truth_states(const GraphInput& in, const SpacePartition& partition)
{
    std::map<int, std::size_t> gt;
    if (!in.scenario)
        return gt;
    for (const VariableNode& v : in.graph.variables()) {
        TripletFrameData data;
        try {
            data = to_triplet_frame(*in.scenario, v.triplet);
        } catch (const Error&) {
            continue;
        }
        gt[v.id] = partition.classify(data.landmark_c);
    }
    return gt;
}

int run_propagate(const Common& c, const fs::path& graph_path, const std::optional<fs::path>& tensor_path,
                  const std::string& seen_solver)
{
    if (!tensor_path)
        throw ConfigError("propagate needs --tensor (build one with build-tensor)");
    if (!fs::exists(*tensor_path))
        throw ConfigError("tensor file " + tensor_path->string() + " does not exist (build one with build-tensor)");
    const CompositionTensor tensor = CompositionTensor::load(*tensor_path);
    const SpacePartition partition = SpacePartition::bundled(c.partition);
    std::vector<GraphInput> graphs = load_graphs(graph_path);

    std::string csv = "graph_id,variable_id,triplet,seen,updated,isc,map_state,gt_state,dmse,gt_rating\n";
    std::size_t variables = 0;
    for (GraphInput& in : graphs) {
        if (seen_solver != "none")
            solve_seen(in, partition, solver_variant_from_string(seen_solver), c.seed);
        propagate(in.graph, tensor);
        const auto gt = truth_states(in, partition);
        for (const VariableNode& v : in.graph.variables()) {
            csv += in.id + "," + std::to_string(v.id) + "," + format_triplet(v.triplet) + "," + (v.seen ? "1" : "0") +
                   "," + (v.updated ? "1" : "0") + "," + fixed(v.isc) + "," + std::to_string(v.belief.argmax() + 1) + ",";
            if (auto it = gt.find(v.id); it != gt.end())
                csv += std::to_string(it->second + 1) + "," + fixed(dmse(v.belief, it->second)) + "," +
                       std::to_string(gt_rating(v.belief, it->second));
            else
                csv += ",,";
            csv += "\n";
        }
        variables += in.graph.variables().size();
    }
    save_graphs(c.out_dir / "propagated.json", graphs);
    write_text_file(c.out_dir / "isc.csv", csv);
    std::cout << "graphs " << graphs.size() << ", variables " << variables << "\n";
    return 0;
}

int run_tscore(const Common& c, const fs::path& graph_path, double alpha, bool selection)
{
    std::vector<GraphInput> graphs = load_graphs(graph_path);
    std::string csv = "graph_id,variable_id,triplet,seen,tsc,composition_level,cl_score\n";
    std::string summary = "graph_id,connectivity\n";
    for (GraphInput& in : graphs) {
        topology_score(in.graph, alpha, selection);
        composition_level(in.graph);
        for (const VariableNode& v : in.graph.variables())
            csv += in.id + "," + std::to_string(v.id) + "," + format_triplet(v.triplet) + "," + (v.seen ? "1" : "0") +
                   "," + fixed(v.tsc) + "," + (v.cl ? std::to_string(*v.cl) : std::string()) + "," +
                   fixed(v.cl_score) + "\n";
        summary += in.id + "," + fixed(connectivity_score(in.graph)) + "\n";
    }
    write_text_file(c.out_dir / "tscore.csv", csv);
    write_text_file(c.out_dir / "connectivity.csv", summary);
    std::cout << "graphs " << graphs.size() << "\n";
    return 0;
}

int run_eval(const Common& c, const std::optional<fs::path>& posteriors_path, const std::vector<fs::path>& scenario_paths,
             const std::optional<fs::path>& results_path)
{
    std::vector<ResultRow> rows;
    if (results_path) {
        std::ifstream in(*results_path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open " + results_path->string());
        std::stringstream ss;
        ss << in.rdbuf();
        rows = parse_results_csv(ss.str());
    } else {
        if (!posteriors_path || scenario_paths.empty())
            throw ArgumentError("eval needs --posteriors with --scenarios, or --results");
        const SpacePartition partition = SpacePartition::bundled(c.partition);
        std::map<std::string, Scenario> by_id;
        for (const fs::path& p : scenario_paths)
            for (Scenario& s : load_scenarios(p))
                by_id.emplace(s.id, std::move(s));
        const nlohmann::json doc = read_json_file(*posteriors_path);
        for (const auto& j : doc.at("posteriors")) {
            const std::string id = j.at("scenario_id").get<std::string>();
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw ArgumentError("no ground truth for scenario '" + id + "'");
            const auto tj = j.at("triplet");
            const TripletId triplet{tj.at(0).get<int>(), tj.at(1).get<int>(), tj.at(2).get<int>()};
            const TripletTruth truth = triplet_truth(to_triplet_frame(it->second, triplet), partition);
            StateVector est(j.at("landmark_state").get<std::vector<double>>());
            if (est.size() != partition.size())
                throw ArgumentError("posterior size does not match partition " + partition.name());
            ResultRow r;
            r.scenario_id = id;
            r.triplet = triplet;
            r.solver = solver_variant_from_string(j.at("solver").get<std::string>());
            r.sigma_v_deg = j.at("sigma_v_deg").get<double>();
            r.sigma_w_deg = j.at("sigma_w_deg").get<double>();
            r.views = j.at("views").get<int>();
            r.gt_state = int(truth.landmark_state) + 1;
            r.metrics = evaluate(est, truth.landmark_state, partition);
            rows.push_back(std::move(r));
        }
    }
    const std::string table = percentile_table(rows);
    write_text_file(c.out_dir / "eval.csv", table);
    std::cout << table;
    return 0;
}

int run_ingest(const Common& c, const fs::path& dir, const MrclamOptions& base)
{
    MrclamOptions opt = base;
    opt.noise = noise_override(c).value_or(NoiseConfig{deg2rad(2.0), deg2rad(5.0)});
    const MrclamIngest ingest = ingest_mrclam(load_mrclam(dir), opt);
    save_scenarios(c.out_dir / "mrclam_scenarios.json", ingest.scenarios);
    for (const Scenario& s : ingest.scenarios)
        std::cout << s.id << ": triplets " << observed_triplets(s).size() << ", views " << s.trajectory.size()
                  << ", observations " << s.observations.size() << "\n";
    if (ingest.unknown_barcodes)
        std::cerr << "warning: skipped " << ingest.unknown_barcodes << " measurements with unknown barcodes\n";
    if (ingest.outside_groundtruth)
        std::cerr << "warning: skipped " << ingest.outside_groundtruth << " views outside the ground truth span\n";
    std::cout << "robot-to-robot measurements ignored: " << ingest.robot_measurements << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Qualitative triplet SLAM toolkit"};
    app.require_subcommand(1);

    Common c;

    auto* gen = app.add_subcommand("gen", "Generate scenario files");
    std::string kind = "triplet";
    GraphScenarioConfig gcfg;
    add_common(gen, c);
    gen->add_option("--kind", kind, "triplet | grid | graph")->capture_default_str();
    gen->add_option("--landmarks", gcfg.landmarks, "Graph scenarios: landmarks")->capture_default_str();
    gen->add_option("--factors", gcfg.factors, "Graph scenarios: composition factors")->capture_default_str();
    gen->add_option("--coverage", gcfg.coverage_rate, "Graph scenarios: seen fraction")->capture_default_str();
    gen->add_option("--candidates", gcfg.candidates, "Graph scenarios: candidates per scenario")->capture_default_str();

    auto* bt = app.add_subcommand("build-tensor", "Build a composition tensor");
    std::size_t samples = 10000;
    std::string mode = "prob";
    std::optional<fs::path> tensor_out;
    add_common(bt, c);
    bt->add_option("--samples", samples, "Samples per region")->capture_default_str();
    bt->add_option("--mode", mode, "prob | det")->capture_default_str();
    bool reuse = false;
    bt->add_option("--out", tensor_out, "Tensor file (default <out-dir>/<partition>_<mode>_<samples>_s<seed>.qct)");
    bt->add_flag("--reuse", reuse, "Keep an existing file built with the same settings");

    auto* sv = app.add_subcommand("solve", "Solve every observed triplet");
    std::vector<fs::path> inputs;
    std::vector<std::string> solvers{"full", "fast", "baseline"};
    add_common(sv, c);
    sv->add_option("--input", inputs, "Scenario files")->required();
    sv->add_option("--solver", solvers, "full, fast, baseline (comma separated)")->delimiter(',')->capture_default_str();

    auto* pr = app.add_subcommand("propagate", "Propagate beliefs through composition factors");
    fs::path graph_path;
    std::optional<fs::path> tensor_path;
    std::string seen_solver = "fast";
    add_common(pr, c);
    pr->add_option("--graph", graph_path, "Graph or graph scenario JSON")->required();
    pr->add_option("--tensor", tensor_path, "Tensor file");
    pr->add_option("--seen-solver", seen_solver, "Solver for seen triplets of a graph scenario, or none")
        ->capture_default_str();

    auto* ts = app.add_subcommand("tscore", "Topology scores and composition levels");
    double alpha = 0.5;
    bool selection = false;
    add_common(ts, c);
    ts->add_option("--graph", graph_path, "Graph or graph scenario JSON")->required();
    ts->add_option("--alpha", alpha, "Information decay per composition")->capture_default_str();
    ts->add_flag("--selection-mode", selection, "Seen nodes start at 1");

    auto* ev = app.add_subcommand("eval", "Percentile tables of the metrics");
    std::optional<fs::path> posteriors_path, results_path;
    std::vector<fs::path> scenario_paths;
    add_common(ev, c);
    ev->add_option("--posteriors", posteriors_path, "posteriors.json from solve");
    ev->add_option("--scenario-file", scenario_paths, "Scenario files holding the ground truth");
    ev->add_option("--results", results_path, "results.csv from solve, instead of posteriors");

    auto* ing = app.add_subcommand("ingest-mrclam", "Turn an MRCLAM dataset directory into scenarios");
    fs::path mr_dir;
    MrclamOptions mopt;
    add_common(ing, c);
    ing->add_option("--dir", mr_dir, "Dataset directory")->required();
    ing->add_option("--window", mopt.group_window, "Seconds grouped into one view")->capture_default_str();
    ing->add_option("--min-spacing", mopt.min_spacing, "Seconds between views of a triplet")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen)
            return run_gen(c, kind, gcfg);
        if (*bt)
            return run_build_tensor(c, samples, mode, tensor_out, reuse);
        if (*sv)
            return run_solve(c, inputs, solvers);
        if (*pr)
            return run_propagate(c, graph_path, tensor_path, seen_solver);
        if (*ts)
            return run_tscore(c, graph_path, alpha, selection);
        if (*ev)
            return run_eval(c, posteriors_path, scenario_paths, results_path);
        if (*ing)
            return run_ingest(c, mr_dir, mopt);
    } catch (const ParseError& e) {
        std::cerr << "parse error (line " << e.line() << ", byte " << e.offset() << "): " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
