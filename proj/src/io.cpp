#include "qslam/io.hpp"

#include "qslam/errors.hpp"
#include "qslam/stats.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace qslam {

namespace fs = std::filesystem;

nlohmann::json read_json_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            line += text[i] == '\n' ? 1 : 0;
        throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what(), e.byte, line);
    }
}

void write_text_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << text;
}

void write_json_file(const fs::path& path, const nlohmann::json& doc)
{
    write_text_file(path, doc.dump(1) + "\n");
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double noise_degrees(double rad) { return std::round(rad2deg(rad) * 1e9) / 1e9; }

std::string format_triplet(const TripletId& t)
{
    return std::to_string(t.a) + "-" + std::to_string(t.b) + "-" + std::to_string(t.c);
}

TripletId parse_triplet(const std::string& s)
{
    TripletId t;
    char d1 = 0, d2 = 0;
    std::istringstream in(s);
    if (!(in >> t.a >> d1 >> t.b >> d2 >> t.c) || d1 != '-' || d2 != '-')
        throw ArgumentError("bad triplet '" + s + "'");
    return t;
}

namespace {

double read_deg(const nlohmann::json& j) { return deg2rad(j.get<double>()); }

nlohmann::json triplet_json(const TripletId& t) { return {t.a, t.b, t.c}; }

TripletId triplet_from(const nlohmann::json& j) { return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()}; }

} // namespace

nlohmann::json scenario_to_json(const Scenario& s)
{
    nlohmann::json doc;
    doc["id"] = s.id;
    doc["seed"] = s.seed;
    doc["noise"] = {{"sigma_v_deg", noise_degrees(s.noise.sigma_v)}, {"sigma_w_deg", noise_degrees(s.noise.sigma_w)}};
    doc["landmarks"] = nlohmann::json::array();
    for (const auto& [id, p] : s.landmarks)
        doc["landmarks"].push_back({{"id", id}, {"x", p.x}, {"y", p.y}});
    doc["trajectory"] = nlohmann::json::array();
    for (const Pose2& p : s.trajectory)
        doc["trajectory"].push_back({{"x", p.x}, {"y", p.y}, {"alpha_deg", rad2deg(p.alpha)}});
    doc["observations"] = nlohmann::json::array();
    for (const Observation& o : s.observations)
        doc["observations"].push_back({{"t", o.time_index},
                                       {"triplet", triplet_json(o.triplet)},
                                       {"bearings_deg",
                                        {rad2deg(o.bearings[0]), rad2deg(o.bearings[1]), rad2deg(o.bearings[2])}}});
    doc["actions"] = nlohmann::json::array();
    for (const Action& a : s.actions)
        doc["actions"].push_back({{"from", a.from_index}, {"t", a.time_index}, {"psi_deg", rad2deg(a.psi)}});
    return doc;
}

Scenario scenario_from_json(const nlohmann::json& doc)
{
    try {
        Scenario s;
        s.id = doc.value("id", "");
        s.seed = doc.value("seed", std::uint64_t{0});
        if (doc.contains("noise")) {
            s.noise.sigma_v = read_deg(doc["noise"].at("sigma_v_deg"));
            s.noise.sigma_w = read_deg(doc["noise"].at("sigma_w_deg"));
        }
        for (const auto& l : doc.at("landmarks"))
            s.landmarks[l.at("id").get<int>()] = {l.at("x").get<double>(), l.at("y").get<double>()};
        for (const auto& p : doc.at("trajectory"))
            s.trajectory.push_back({p.at("x").get<double>(), p.at("y").get<double>(), read_deg(p.at("alpha_deg"))});
        for (const auto& o : doc.at("observations")) {
            Observation ob;
            ob.time_index = o.at("t").get<int>();
            ob.triplet = triplet_from(o.at("triplet"));
            for (std::size_t k = 0; k < 3; ++k)
                ob.bearings[k] = wrap_angle(read_deg(o.at("bearings_deg").at(k)));
            s.observations.push_back(ob);
        }
        for (const auto& a : doc.value("actions", nlohmann::json::array()))
            s.actions.push_back({a.at("t").get<int>(), a.at("from").get<int>(), wrap_angle(read_deg(a.at("psi_deg")))});
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    }
}

std::vector<Scenario> load_scenarios(const fs::path& path)
{
    nlohmann::json doc = read_json_file(path);
    std::vector<Scenario> out;
    if (doc.contains("scenarios")) {
        for (const auto& s : doc["scenarios"])
            out.push_back(scenario_from_json(s));
    } else if (doc.contains("scenario")) {
        out.push_back(scenario_from_json(doc["scenario"]));
    } else {
        out.push_back(scenario_from_json(doc));
    }
    return out;
}

void save_scenarios(const fs::path& path, std::span<const Scenario> scenarios)
{
    nlohmann::json doc;
    doc["scenarios"] = nlohmann::json::array();
    for (const Scenario& s : scenarios)
        doc["scenarios"].push_back(scenario_to_json(s));
    write_json_file(path, doc);
}

nlohmann::json graph_scenario_to_json(const GraphScenario& g)
{
    return {{"scenario", scenario_to_json(g.scenario)},
            {"graph", g.graph.to_json()},
            {"coverage_rate", g.coverage_rate},
            {"connectivity", g.connectivity}};
}

GraphScenario graph_scenario_from_json(const nlohmann::json& doc)
{
    try {
        GraphScenario g;
        g.scenario = scenario_from_json(doc.at("scenario"));
        g.graph = QualitativeFactorGraph::from_json(doc.at("graph"));
        g.coverage_rate = doc.value("coverage_rate", 0.5);
        g.connectivity = doc.value("connectivity", 0.0);
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed graph scenario: ") + e.what());
    }
}

std::string results_csv_header()
{
    return "scenario_id,triplet,solver,sigma_v_deg,sigma_w_deg,views,gt_state,dmse,gmd,entropy,gt_rating,"
           "gt_likelihood,gt_likelihood_ratio,likelihood_ratio";
}

std::string results_csv_line(const ResultRow& r)
{
    const MetricReport& m = r.metrics;
    std::string s = r.scenario_id + "," + format_triplet(r.triplet) + "," + to_string(r.solver) + "," +
                    format_number(r.sigma_v_deg) + "," + format_number(r.sigma_w_deg) + "," + std::to_string(r.views) +
                    "," + std::to_string(r.gt_state) + "," + format_number(m.dmse) + "," + format_number(m.gmd) + "," +
                    format_number(m.entropy) + "," + std::to_string(m.gt_rating) + "," + format_number(m.gt_likelihood) +
                    "," + format_number(m.gt_likelihood_ratio) + "," + format_number(m.likelihood_ratio);
    return s;
}

std::string results_csv(std::span<const ResultRow> rows)
{
    std::string out = results_csv_header() + "\n";
    for (const ResultRow& r : rows)
        out += results_csv_line(r) + "\n";
    return out;
}

std::vector<ResultRow> parse_results_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0, offset = 0;
    std::vector<ResultRow> rows;
    auto fail = [&](const std::string& why) {
        throw ParseError("results line " + std::to_string(line_no) + ": " + why, offset, line_no);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t here = offset;
        offset += line.size() + 1;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line_no == 1) {
            if (line != results_csv_header())
                fail("unexpected header");
            continue;
        }
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            f.push_back(cell);
        if (f.size() != 14) {
            offset = here;
            fail("expected 14 fields");
        }
        try {
            ResultRow r;
            r.scenario_id = f[0];
            r.triplet = parse_triplet(f[1]);
            r.solver = solver_variant_from_string(f[2]);
            r.sigma_v_deg = std::stod(f[3]);
            r.sigma_w_deg = std::stod(f[4]);
            r.views = std::stoi(f[5]);
            r.gt_state = std::stoi(f[6]);
            r.metrics.dmse = std::stod(f[7]);
            r.metrics.gmd = std::stod(f[8]);
            r.metrics.entropy = std::stod(f[9]);
            r.metrics.gt_rating = std::stoi(f[10]);
            r.metrics.gt_likelihood = std::stod(f[11]);
            r.metrics.gt_likelihood_ratio = std::stod(f[12]);
            r.metrics.likelihood_ratio = std::stod(f[13]);
            rows.push_back(std::move(r));
        } catch (const std::exception& e) {
            offset = here;
            fail(e.what());
        }
    }
    return rows;
}

std::string timings_csv(std::span<const ResultRow> rows)
{
    std::string out = "scenario_id,triplet,solver,wall_time_ms\n";
    for (const ResultRow& r : rows)
        out += r.scenario_id + "," + format_triplet(r.triplet) + "," + to_string(r.solver) + "," +
               format_number(r.wall_time_ms) + "\n";
    return out;
}

nlohmann::json posterior_to_json(const std::string& scenario_id, const TripletId& triplet, const TripletPosterior& post,
                                 const NoiseConfig& noise, int views)
{
    auto vec = [](const StateVector& v) { return std::vector<double>(v.values().begin(), v.values().end()); };
    nlohmann::json j{{"scenario_id", scenario_id},
                     {"triplet", triplet_json(triplet)},
                     {"solver", to_string(post.variant)},
                     {"sigma_v_deg", noise_degrees(noise.sigma_v)},
                     {"sigma_w_deg", noise_degrees(noise.sigma_w)},
                     {"views", views},
                     {"landmark_state", vec(post.landmark_state)},
                     {"map_state", post.landmark_state.argmax() + 1},
                     {"hypotheses", post.hypothesis_count},
                     {"live_hypotheses", post.live_hypotheses},
                     {"degraded", post.degraded}};
    j["camera_states"] = nlohmann::json::array();
    for (const StateVector& c : post.camera_states)
        j["camera_states"].push_back(vec(c));
    return j;
}

std::string percentile_table(std::span<const ResultRow> rows)
{
    using Key = std::tuple<std::string, double, double>;
    std::map<Key, std::vector<const ResultRow*>> groups;
    for (const ResultRow& r : rows)
        groups[{to_string(r.solver), r.sigma_v_deg, r.sigma_w_deg}].push_back(&r);

    const std::pair<const char*, double (*)(const MetricReport&)> metrics[] = {
        {"dmse", [](const MetricReport& m) { return m.dmse; }},
        {"gmd", [](const MetricReport& m) { return m.gmd; }},
        {"entropy", [](const MetricReport& m) { return m.entropy; }},
        {"gt_rating", [](const MetricReport& m) { return double(m.gt_rating); }},
        {"gt_likelihood", [](const MetricReport& m) { return m.gt_likelihood; }},
        {"gt_likelihood_ratio", [](const MetricReport& m) { return m.gt_likelihood_ratio; }},
        {"likelihood_ratio", [](const MetricReport& m) { return m.likelihood_ratio; }},
    };
    auto fixed = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", v);
        return std::string(buf);
    };
    std::string out = "solver,sigma_v_deg,sigma_w_deg,count,metric,p25,p50,p75\n";
    for (const auto& [key, members] : groups) {
        for (const auto& [name, get] : metrics) {
            std::vector<double> xs;
            for (const ResultRow* r : members)
                xs.push_back(get(r->metrics));
            out += std::get<0>(key) + "," + format_number(std::get<1>(key)) + "," + format_number(std::get<2>(key)) + "," +
                   std::to_string(members.size()) + "," + name + "," + fixed(percentile(xs, 0.25)) + "," +
                   fixed(percentile(xs, 0.5)) + "," + fixed(percentile(xs, 0.75)) + "\n";
        }
    }
    return out;
}

} // namespace qslam
