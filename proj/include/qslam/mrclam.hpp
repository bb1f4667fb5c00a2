#pragma once

#include "qslam/simulation.hpp"

#include <filesystem>
#include <map>
#include <vector>

namespace qslam {

struct MrclamPose {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

/// Range and bearing to a barcode; bearing is radians, counterclockwise from the robot heading.
struct MrclamMeasurement {
    double t = 0.0;
    int barcode = 0;
    double range = 0.0;
    double bearing = 0.0;
};

struct MrclamRobot {
    int robot = 0; // the N in RobotN_*.dat
    std::vector<MrclamPose> groundtruth;
    std::vector<MrclamMeasurement> measurements;
};

/// One dataset directory. Landmarks are keyed by subject number.
struct MrclamBundle {
    std::map<int, Vec2> landmark_gt;
    std::map<int, int> barcode_to_subject;
    std::vector<MrclamRobot> robots;
};

/// Reads Barcodes.dat, Landmark_Groundtruth.dat and every RobotN_Groundtruth.dat /
/// RobotN_Measurement.dat pair. Lines starting with '#' are comments.
MrclamBundle load_mrclam(const std::filesystem::path& dir);

struct MrclamOptions {
    double group_window = 0.5;     // seconds; measurements this close to a view's first one join it
    double min_spacing = 2.0;      // seconds between consecutive views of one triplet
    double min_displacement = 0.05; // meters between consecutive views of one triplet
    int min_views = 3;
    NoiseConfig noise;             // recorded in each scenario for the solvers
};

struct MrclamIngest {
    std::vector<Scenario> scenarios; // one per robot, id "robotN"
    std::size_t unknown_barcodes = 0;    // measurements skipped with a warning
    std::size_t robot_measurements = 0;  // robot-to-robot sightings, ignored
    std::size_t outside_groundtruth = 0; // views with no ground truth pose around them
};

/// World-frame scenarios: trajectory holds the interpolated ground truth pose of every view,
/// observations are canonical (a < b < c) triplets, actions are ground truth azimuths between
/// consecutive views of each triplet. Bearings taken at slightly different times within a view are
/// re-referenced to the view's heading through the ground truth orientation.
MrclamIngest ingest_mrclam(const MrclamBundle& bundle, const MrclamOptions& options = {});

/// Linear interpolation of position, shortest-arc interpolation of heading.
/// Returns false when t lies outside the recorded span.
bool interpolate_pose(const std::vector<MrclamPose>& gt, double t, Pose2& out);

} // namespace qslam
