#pragma once

#include "qslam/metrics.hpp"
#include "qslam/simulation.hpp"
#include "qslam/triplet_solver.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace qslam {

/// Parses a JSON file; syntax errors become ParseError with byte offset and line.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

/// Shortest text that reads back to the same double.
std::string format_number(double v);
/// Noise levels in degrees, rounded to 1e-9 so 2 deg prints as 2.
double noise_degrees(double rad);
std::string format_triplet(const TripletId& t); // "a-b-c"
TripletId parse_triplet(const std::string& s);

// Scenario files store angles in degrees.
nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& doc);
/// A file holds either one scenario or {"scenarios": [...]}.
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);
void save_scenarios(const std::filesystem::path& path, std::span<const Scenario> scenarios);

nlohmann::json graph_scenario_to_json(const GraphScenario& g);
GraphScenario graph_scenario_from_json(const nlohmann::json& doc);

/// One solved triplet. States are 1-based region indices.
struct ResultRow {
    std::string scenario_id;
    TripletId triplet;
    SolverVariant solver = SolverVariant::fast;
    double sigma_v_deg = 0.0;
    double sigma_w_deg = 0.0;
    int views = 0;
    int gt_state = 1;
    MetricReport metrics;
    double wall_time_ms = 0.0; // kept out of the results file so reruns compare byte for byte
};

std::string results_csv_header();
std::string results_csv_line(const ResultRow& row);
std::string results_csv(std::span<const ResultRow> rows);
std::vector<ResultRow> parse_results_csv(const std::string& text);
/// scenario_id,triplet,solver,wall_time_ms
std::string timings_csv(std::span<const ResultRow> rows);

nlohmann::json posterior_to_json(const std::string& scenario_id, const TripletId& triplet,
                                 const TripletPosterior& post, const NoiseConfig& noise, int views);

/// Rows grouped by (solver, sigma_v, sigma_w); one line per metric with 25th, 50th and 75th percentiles.
std::string percentile_table(std::span<const ResultRow> rows);

} // namespace qslam
