#include "qslam/mrclam.hpp"

#include "qslam/angles.hpp"
#include "qslam/errors.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace qslam {

namespace fs = std::filesystem;

namespace {

/// Numeric rows of a whitespace separated file, each with at least `columns` values.
std::vector<std::vector<double>> read_table(const fs::path& path, std::size_t columns)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0, offset = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t here = offset;
        offset += line.size() + 1;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size())
                    throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError(path.filename().string() + ":" + std::to_string(line_no) + ": bad number '" + tok +
                                     "'",
                                 here, line_no);
            }
        }
        if (row.size() < columns)
            throw ParseError(path.filename().string() + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(columns) + " columns",
                             here, line_no);
        rows.push_back(std::move(row));
    }
    return rows;
}

void require_monotone(const std::vector<double>& times, const fs::path& path)
{
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] < times[i - 1])
            throw ParseError(path.filename().string() + ": timestamps go backwards at row " + std::to_string(i + 1),
                             0, 0);
}

} // namespace

MrclamBundle load_mrclam(const fs::path& dir)
{
    MrclamBundle b;
    for (const auto& r : read_table(dir / "Barcodes.dat", 2))
        b.barcode_to_subject[int(r[1])] = int(r[0]);
    for (const auto& r : read_table(dir / "Landmark_Groundtruth.dat", 3))
        b.landmark_gt[int(r[0])] = {r[1], r[2]};

    const std::regex gt_name(R"(Robot(\d+)_Groundtruth\.dat)");
    std::vector<int> robots;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, m, gt_name))
            robots.push_back(std::stoi(m[1]));
    }
    std::sort(robots.begin(), robots.end());
    for (int n : robots) {
        MrclamRobot robot;
        robot.robot = n;
        const fs::path gt_path = dir / ("Robot" + std::to_string(n) + "_Groundtruth.dat");
        const fs::path ms_path = dir / ("Robot" + std::to_string(n) + "_Measurement.dat");
        std::vector<double> times;
        for (const auto& r : read_table(gt_path, 4)) {
            robot.groundtruth.push_back({r[0], r[1], r[2], r[3]});
            times.push_back(r[0]);
        }
        require_monotone(times, gt_path);
        times.clear();
        if (fs::exists(ms_path)) {
            for (const auto& r : read_table(ms_path, 4)) {
                robot.measurements.push_back({r[0], int(r[1]), r[2], r[3]});
                times.push_back(r[0]);
            }
            require_monotone(times, ms_path);
        }
        b.robots.push_back(std::move(robot));
    }
    if (b.robots.empty())
        throw ConfigError("no RobotN_Groundtruth.dat files in " + dir.string());
    return b;
}

bool interpolate_pose(const std::vector<MrclamPose>& gt, double t, Pose2& out)
{
    if (gt.empty() || t < gt.front().t || t > gt.back().t)
        return false;
    auto hi = std::lower_bound(gt.begin(), gt.end(), t, [](const MrclamPose& p, double v) { return p.t < v; });
    if (hi->t == t || hi == gt.begin()) {
        out = {hi->x, hi->y, wrap_angle(hi->theta)};
        return true;
    }
    auto lo = std::prev(hi);
    const double u = (t - lo->t) / (hi->t - lo->t);
    out.x = lo->x + u * (hi->x - lo->x);
    out.y = lo->y + u * (hi->y - lo->y);
    out.alpha = wrap_angle(lo->theta + u * wrap_angle(hi->theta - lo->theta));
    return true;
}

namespace {

struct View {
    double t = 0.0;
    std::map<int, double> bearings; // landmark subject -> bearing
};

struct TripletViews {
    std::vector<std::size_t> views; // indices into the robot's view list
    double last_t = 0.0;
    Vec2 last_position;
};

} // namespace

MrclamIngest ingest_mrclam(const MrclamBundle& bundle, const MrclamOptions& options)
{
    MrclamIngest result;
    for (const MrclamRobot& robot : bundle.robots) {
        // group measurements into views
        std::vector<View> views;
        std::vector<Pose2> view_poses;
        std::size_t i = 0;
        const auto& ms = robot.measurements;
        while (i < ms.size()) {
            const double t0 = ms[i].t;
            View v;
            double t_sum = 0.0;
            int count = 0;
            for (; i < ms.size() && ms[i].t - t0 <= options.group_window; ++i) {
                auto sub = bundle.barcode_to_subject.find(ms[i].barcode);
                if (sub == bundle.barcode_to_subject.end()) {
                    ++result.unknown_barcodes;
                    continue;
                }
                if (!bundle.landmark_gt.contains(sub->second)) {
                    ++result.robot_measurements;
                    continue;
                }
                Pose2 at;
                if (!interpolate_pose(robot.groundtruth, ms[i].t, at)) {
                    ++result.outside_groundtruth;
                    continue;
                }
                // global bearing for now; made body-frame once the view's heading is known
                v.bearings.emplace(sub->second, wrap_angle(ms[i].bearing + at.alpha)); // first sighting wins
                t_sum += ms[i].t;
                ++count;
            }
            if (v.bearings.size() < 3)
                continue;
            v.t = t_sum / count;
            Pose2 pose;
            if (!interpolate_pose(robot.groundtruth, v.t, pose)) {
                ++result.outside_groundtruth;
                continue;
            }
            for (auto& [id, phi] : v.bearings)
                phi = wrap_angle(phi - pose.alpha);
            views.push_back(std::move(v));
            view_poses.push_back(pose);
        }

        // accept views per triplet subject to spacing
        std::map<TripletId, TripletViews> tracks;
        for (std::size_t k = 0; k < views.size(); ++k) {
            std::vector<int> ids;
            for (const auto& [id, phi] : views[k].bearings)
                ids.push_back(id);
            for (std::size_t a = 0; a < ids.size(); ++a)
                for (std::size_t b = a + 1; b < ids.size(); ++b)
                    for (std::size_t c = b + 1; c < ids.size(); ++c) {
                        TripletViews& tv = tracks[TripletId{ids[a], ids[b], ids[c]}];
                        const Vec2 here = view_poses[k].position();
                        if (!tv.views.empty() && (views[k].t - tv.last_t < options.min_spacing ||
                                                  distance(here, tv.last_position) < options.min_displacement))
                            continue;
                        tv.views.push_back(k);
                        tv.last_t = views[k].t;
                        tv.last_position = here;
                    }
        }

        Scenario s;
        s.id = "robot" + std::to_string(robot.robot);
        s.noise = options.noise;
        s.landmarks = bundle.landmark_gt;
        std::map<std::size_t, int> pose_index; // view -> trajectory slot
        std::set<std::pair<int, int>> have_action;
        for (const auto& [id, tv] : tracks) {
            if (int(tv.views.size()) < options.min_views)
                continue;
            for (std::size_t k : tv.views)
                pose_index.emplace(k, 0);
        }
        for (auto& [k, slot] : pose_index) {
            slot = int(s.trajectory.size());
            s.trajectory.push_back(view_poses[k]);
        }
        for (const auto& [id, tv] : tracks) {
            if (int(tv.views.size()) < options.min_views)
                continue;
            for (std::size_t j = 0; j < tv.views.size(); ++j) {
                const View& v = views[tv.views[j]];
                Observation o;
                o.time_index = pose_index.at(tv.views[j]);
                o.triplet = id;
                o.bearings = {v.bearings.at(id.a), v.bearings.at(id.b), v.bearings.at(id.c)};
                s.observations.push_back(o);
                if (j == 0)
                    continue;
                const int from = pose_index.at(tv.views[j - 1]);
                if (!have_action.insert({from, o.time_index}).second)
                    continue;
                const Pose2& p0 = s.trajectory[std::size_t(from)];
                const Pose2& p1 = s.trajectory[std::size_t(o.time_index)];
                s.actions.push_back({o.time_index, from, azimuth(p0.position(), p1.position())});
            }
        }
        std::stable_sort(s.observations.begin(), s.observations.end(), [](const Observation& a, const Observation& b) {
            return std::tie(a.time_index, a.triplet) < std::tie(b.time_index, b.triplet);
        });
        std::sort(s.actions.begin(), s.actions.end(), [](const Action& a, const Action& b) {
            return std::tie(a.from_index, a.time_index) < std::tie(b.from_index, b.time_index);
        });
        result.scenarios.push_back(std::move(s));
    }
    return result;
}

} // namespace qslam
