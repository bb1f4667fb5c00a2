#include "qslam/triplet_solver.hpp"

#include "qslam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace qslam {

std::string to_string(SolverVariant v)
{
    switch (v) {
    case SolverVariant::full: return "full";
    case SolverVariant::fast: return "fast";
    case SolverVariant::baseline: return "baseline";
    }
    return "?";
}

SolverVariant solver_variant_from_string(const std::string& s)
{
    if (s == "full")
        return SolverVariant::full;
    if (s == "fast")
        return SolverVariant::fast;
    if (s == "baseline")
        return SolverVariant::baseline;
    throw ArgumentError("unknown solver '" + s + "'");
}

double TrajectoryHypothesis::log_weight() const
{
    double s = 0.0;
    for (double w : motion_logw)
        s += w;
    for (double w : resection_logw)
        s += w;
    return s;
}

TripletTrack make_track(std::span<const Observation> observations, std::span<const Action> actions, bool need_actions)
{
    if (observations.empty())
        throw ArgumentError("a triplet solve needs at least one observation");
    TripletTrack tr;
    tr.views.assign(observations.begin(), observations.end());
    std::stable_sort(tr.views.begin(), tr.views.end(),
                     [](const Observation& a, const Observation& b) { return a.time_index < b.time_index; });
    for (const Observation& o : tr.views)
        if (o.triplet != tr.views.front().triplet)
            throw ArgumentError("observations belong to different triplets");
    tr.headings.assign(tr.views.size(), 0.0);
    if (!need_actions)
        return tr;
    for (std::size_t i = 1; i < tr.views.size(); ++i) {
        int from = tr.views[i - 1].time_index, to = tr.views[i].time_index;
        auto it = std::find_if(actions.begin(), actions.end(),
                               [&](const Action& a) { return a.from_index == from && a.time_index == to; });
        if (it == actions.end())
            throw ArgumentError("no action covers the move from time " + std::to_string(from) + " to " +
                                std::to_string(to));
        tr.headings[i] = it->psi;
    }
    return tr;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Pose samples for one view: circles from (possibly perturbed) bearings to A and B.
struct ViewCircles {
    std::vector<LocusCircle> circles;
    std::vector<double> phi_a;
};

ViewCircles view_circles(const Observation& obs, double sigma, std::size_t count, Rng& rng)
{
    ViewCircles vc;
    if (sigma == 0.0 || count == 0) {
        vc.circles.push_back(locus_from_bearings(obs.bearings[0], obs.bearings[1]));
        vc.phi_a.push_back(obs.bearings[0]);
        return vc;
    }
    std::size_t attempts = 0;
    while (vc.circles.size() < count) {
        double pa = obs.bearings[0] + gaussian(rng, sigma);
        double pb = obs.bearings[1] + gaussian(rng, sigma);
        try {
            vc.circles.push_back(locus_from_bearings(pa, pb));
            vc.phi_a.push_back(pa);
        } catch (const DegenerateGeometry&) {
            if (++attempts > 100 * count)
                throw;
        }
    }
    return vc;
}

Pose2 pose_on(double phi_a, Vec2 p) { return {p.x, p.y, orientation_on_circle(p, phi_a)}; }

bool at_frame_landmark(Vec2 p) { return distance(p, kLandmarkA) < 1e-12 || distance(p, kLandmarkB) < 1e-12; }

double ray_exit(Vec2 origin, Vec2 dir, const Box& box)
{
    // far parameter of the ray inside the box (slab method); falls back to a generous length
    double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
    const double lo[2] = {box.xmin, box.ymin}, hi[2] = {box.xmax, box.ymax};
    const double o[2] = {origin.x, origin.y}, d[2] = {dir.x, dir.y};
    for (int k = 0; k < 2; ++k) {
        if (std::abs(d[k]) < 1e-15) {
            if (o[k] < lo[k] || o[k] > hi[k])
                t1 = -1.0;
            continue;
        }
        double a = (lo[k] - o[k]) / d[k], b = (hi[k] - o[k]) / d[k];
        if (a > b)
            std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
    }
    if (t1 > t0 && t1 > 0.0)
        return t1;
    Vec2 mid{0.5 * (box.xmin + box.xmax), 0.5 * (box.ymin + box.ymax)};
    return 2.0 * distance(origin, mid) + std::hypot(box.xmax - box.xmin, box.ymax - box.ymin);
}

struct Effective {
    double sigma_v;
    double sigma_w;
};

Effective effective_noise(const NoiseConfig& noise, const SolverParams& params)
{
    return {noise.sigma_v > 0.0 ? noise.sigma_v : params.sigma_floor, noise.sigma_w};
}

/// Re-triangulates C for the hypothesis and refreshes its resection weights. False when the
/// lines of sight do not meet.
bool resect(TrajectoryHypothesis& h, const TripletTrack& tr, double sigma_v)
{
    const std::size_t n = h.poses.size();
    std::vector<double> bc(n);
    for (std::size_t i = 0; i < n; ++i)
        bc[i] = tr.views[i].bearings[2];
    try {
        h.landmark_c = triangulate(h.poses, bc);
    } catch (const NoIntersection&) {
        return false;
    }
    h.resection_logw.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (distance(h.landmark_c, h.poses[i].position()) < 1e-12)
            return false;
        h.resection_logw[i] = bearing_loglik(bc[i], h.landmark_c, h.poses[i], sigma_v);
    }
    return std::isfinite(h.log_weight());
}

/// Drops hypotheses far below the best one and keeps at most `cap` of the heaviest.
void prune(std::vector<TrajectoryHypothesis>& hyps, const SolverParams& params, std::size_t cap)
{
    if (hyps.empty())
        return;
    std::vector<double> lw(hyps.size());
    for (std::size_t i = 0; i < hyps.size(); ++i)
        lw[i] = hyps[i].log_weight();
    double best = *std::max_element(lw.begin(), lw.end());
    if (!std::isfinite(best)) {
        hyps.clear();
        return;
    }
    double cut = best + std::log(params.prune_ratio);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < hyps.size(); ++i)
        if (lw[i] >= cut)
            order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lw[a] > lw[b]; });
    if (order.size() > cap)
        order.resize(cap);
    std::sort(order.begin(), order.end());
    std::vector<TrajectoryHypothesis> kept;
    kept.reserve(order.size());
    for (std::size_t i : order)
        kept.push_back(std::move(hyps[i]));
    hyps.swap(kept);
}

void single_view_landmarks(std::vector<TrajectoryHypothesis>& hyps, const TripletTrack& tr, double sigma_v,
                           bool perturb, const SpacePartition& partition, Rng& rng)
{
    const double phi_c = tr.views[0].bearings[2];
    for (TrajectoryHypothesis& h : hyps) {
        const Pose2& x = h.poses[0];
        double dir = x.alpha + phi_c + (perturb ? gaussian(rng, sigma_v) : 0.0);
        double tmax = ray_exit(x.position(), heading(dir), partition.borders());
        double t = uniform(rng, 0.0, tmax);
        if (t <= 0.0)
            t = 0.5 * tmax;
        h.landmark_c = x.position() + t * heading(dir);
        h.resection_logw = {bearing_loglik(phi_c, h.landmark_c, x, sigma_v)};
    }
}

std::vector<TrajectoryHypothesis> sample_trajectories(bool full, const TripletTrack& tr, const NoiseConfig& noise,
                                                      const SpacePartition& partition, const SolverParams& params,
                                                      Rng& rng, std::vector<std::size_t>* live)
{
    const Effective eff = effective_noise(noise, params);
    const std::size_t n = tr.views.size();
    const std::size_t m = std::max<std::size_t>(1, params.pose_samples);

    // sampling step for the first view
    ViewCircles first = view_circles(tr.views[0], full ? params.circle_spread * noise.sigma_v : 0.0, m, rng);
    std::vector<TrajectoryHypothesis> hyps;
    hyps.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t ci = k % first.circles.size();
        double t = (double(k) + uniform(rng, 0.0, 1.0)) / double(m);
        Vec2 p = first.circles[ci].point_at(t);
        if (distance(p, kLandmarkA) < 1e-12 || distance(p, kLandmarkB) < 1e-12)
            continue;
        TrajectoryHypothesis h;
        h.poses.push_back(pose_on(first.phi_a[ci], p));
        h.motion_logw.push_back(0.0);
        hyps.push_back(std::move(h));
    }
    if (live)
        live->push_back(hyps.size());
    if (n == 1) {
        single_view_landmarks(hyps, tr, eff.sigma_v, full && noise.sigma_v > 0.0, partition, rng);
        return hyps;
    }

    for (std::size_t i = 1; i < n; ++i) {
        ViewCircles vc = view_circles(tr.views[i], full ? params.circle_spread * noise.sigma_v : 0.0, m, rng);
        const double psi = tr.headings[i];
        const double gate = full ? params.gate_sigmas * noise.sigma_w : 0.0;
        const std::size_t matches = full && (vc.circles.size() > 1 || gate > 0.0) ? std::max<std::size_t>(1, params.match_circles) : 1;
        std::vector<TrajectoryHypothesis> next;
        for (const TrajectoryHypothesis& h : hyps) {
            const Pose2& prev = h.poses.back();
            for (std::size_t r = 0; r < matches; ++r) {
                std::size_t ci = vc.circles.size() == 1
                                     ? 0
                                     : std::uniform_int_distribution<std::size_t>(0, vc.circles.size() - 1)(rng);
                double heading_try = gate > 0.0 ? psi + uniform(rng, -gate, gate) : psi;
                for (Vec2 p : intersect_motion_ray(prev, heading_try, vc.circles[ci])) {
                    if (distance(p, prev.position()) < 1e-12 || at_frame_landmark(p))
                        continue;
                    TrajectoryHypothesis e = h;
                    e.poses.push_back(pose_on(vc.phi_a[ci], p));
                    double wm = motion_loglik(prev, e.poses.back(), psi, eff.sigma_w);
                    if (!std::isfinite(wm))
                        continue;
                    e.motion_logw.push_back(wm);
                    if (!resect(e, tr, eff.sigma_v))
                        continue;
                    next.push_back(std::move(e));
                }
            }
        }
        prune(next, params, std::min(params.max_hypotheses, hyps.size()));
        hyps.swap(next);
        if (live)
            live->push_back(hyps.size());
        if (hyps.empty())
            break;
    }
    return hyps;
}

// ---------------------------------------------------------------------------
// Noise-free case: the first pose has one degree of freedom along its arc; every later pose
// follows from the exact heading, and the line of sight from the third view has to pass
// through the point where the first two meet. Roots of that residual are found by bracketing.

struct ExactChain {
    std::vector<Pose2> poses;
    bool ok = false;
};

ExactChain exact_chain(const TripletTrack& tr, const std::vector<LocusCircle>& circles, double t,
                       std::span<const int> branch)
{
    ExactChain ch;
    Vec2 p0 = circles[0].point_at(t);
    if (distance(p0, kLandmarkA) < 1e-12 || distance(p0, kLandmarkB) < 1e-12)
        return ch;
    ch.poses.push_back({p0.x, p0.y, orientation_on_circle(p0, tr.views[0].bearings[0])});
    for (std::size_t i = 1; i < branch.size() + 1; ++i) {
        auto pts = intersect_motion_ray(ch.poses.back(), tr.headings[i], circles[i]);
        if (std::size_t(branch[i - 1]) >= pts.size())
            return ch;
        Vec2 p = pts[std::size_t(branch[i - 1])];
        if (at_frame_landmark(p))
            return ch;
        ch.poses.push_back({p.x, p.y, orientation_on_circle(p, tr.views[i].bearings[0])});
    }
    ch.ok = true;
    return ch;
}

// Landmark on both bearing lines of the first two views, ignoring which side of the camera it falls.
std::optional<Vec2> line_landmark(const TripletTrack& tr, const ExactChain& ch)
{
    Vec2 d0 = heading(ch.poses[0].alpha + tr.views[0].bearings[2]);
    Vec2 d1 = heading(ch.poses[1].alpha + tr.views[1].bearings[2]);
    double den = cross(d0, d1);
    if (std::abs(den) < 1e-14)
        return std::nullopt;
    double s = cross(ch.poses[1].position() - ch.poses[0].position(), d1) / den;
    return ch.poses[0].position() + s * d0;
}

// Smooth in the arc parameter away from parallel bearing lines; zero when the third view sees the
// landmark on its measured line.
double exact_residual(const TripletTrack& tr, const std::vector<LocusCircle>& circles, double t,
                      std::span<const int> branch)
{
    ExactChain ch = exact_chain(tr, circles, t, branch);
    if (!ch.ok)
        return NAN;
    auto c = line_landmark(tr, ch);
    if (!c)
        return NAN;
    Vec2 d2 = heading(ch.poses[2].alpha + tr.views[2].bearings[2]);
    return cross(d2, *c - ch.poses[2].position()) / std::max(1.0, norm(*c - ch.poses[2].position()));
}

std::vector<TrajectoryHypothesis> exact_trajectories(const TripletTrack& tr, const SolverParams& params)
{
    const std::size_t n = tr.views.size();
    std::vector<LocusCircle> circles;
    for (const Observation& o : tr.views)
        circles.push_back(locus_from_bearings(o.bearings[0], o.bearings[1]));

    const std::size_t g = std::max<std::size_t>(16, params.exact_grid);
    std::vector<double> ts(g);
    for (std::size_t k = 0; k < g; ++k)
        ts[k] = (double(k) + 0.5) / double(g);
    auto residuals = [&](int code, const std::vector<double>& at) {
        const int branch[2] = {code & 1, (code >> 1) & 1};
        std::vector<double> rs(at.size());
        for (std::size_t k = 0; k < at.size(); ++k)
            rs[k] = exact_residual(tr, circles, at[k], branch);
        return rs;
    };
    // Where a branch appears or vanishes (a motion ray turns tangent) the residual varies like a
    // square root and other branches may live only in a sliver; sample geometrically towards every
    // such edge, for all branches, and repeat once on the refined set.
    for (int round = 0; round < 2; ++round) {
        std::vector<double> extra;
        for (int code = 0; code < 4; ++code) {
            const int branch[2] = {code & 1, (code >> 1) & 1};
            std::vector<double> rs = residuals(code, ts);
            for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
                if (std::isnan(rs[k]) == std::isnan(rs[k + 1]) || ts[k + 1] - ts[k] < 1e-13)
                    continue;
                double valid = std::isnan(rs[k]) ? ts[k + 1] : ts[k];
                double invalid = std::isnan(rs[k]) ? ts[k] : ts[k + 1];
                for (int it = 0; it < 60; ++it) {
                    double mid = 0.5 * (valid + invalid);
                    (std::isnan(exact_residual(tr, circles, mid, branch)) ? invalid : valid) = mid;
                }
                const double left = ts[k] - valid, right = ts[k + 1] - valid;
                for (int j = 1; j <= 50; ++j) {
                    extra.push_back(valid + left * std::ldexp(1.0, -j));
                    extra.push_back(valid + right * std::ldexp(1.0, -j));
                }
                extra.push_back(valid);
                extra.push_back(invalid);
            }
        }
        if (extra.empty())
            break;
        ts.insert(ts.end(), extra.begin(), extra.end());
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    }

    std::vector<TrajectoryHypothesis> out;
    for (int code = 0; code < 4; ++code) {
        const int branch[2] = {code & 1, (code >> 1) & 1};
        const std::vector<double> rs = residuals(code, ts);
        for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
            double ra = rs[k], rb = rs[k + 1];
            if (std::isnan(ra) || std::isnan(rb))
                continue;
            if (ra != 0.0 && rb != 0.0 && (ra > 0.0) == (rb > 0.0))
                continue;
            double lo = ts[k], hi = ts[k + 1], flo = ra;
            for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = exact_residual(tr, circles, mid, branch);
                if (std::isnan(fm))
                    break;
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm > 0.0) == (flo > 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            double t = 0.5 * (lo + hi);
            double r = exact_residual(tr, circles, t, branch);
            if (std::isnan(r) || std::abs(r) > 1e-7)
                continue;
            // extend through the remaining views, trying every branch
            std::vector<std::vector<Pose2>> partial{exact_chain(tr, circles, t, branch).poses};
            for (std::size_t i = 3; i < n; ++i) {
                std::vector<std::vector<Pose2>> grown;
                for (const auto& poses : partial)
                    for (Vec2 p : intersect_motion_ray(poses.back(), tr.headings[i], circles[i])) {
                        if (at_frame_landmark(p))
                            continue;
                        auto q = poses;
                        q.push_back({p.x, p.y, orientation_on_circle(p, tr.views[i].bearings[0])});
                        grown.push_back(std::move(q));
                    }
                partial.swap(grown);
            }
            for (auto& poses : partial) {
                TrajectoryHypothesis h;
                h.poses = std::move(poses);
                h.motion_logw.assign(n, 0.0);
                std::vector<double> bc(n);
                for (std::size_t i = 0; i < n; ++i)
                    bc[i] = tr.views[i].bearings[2];
                ExactChain pair;
                pair.poses = {h.poses[0], h.poses[1]};
                auto c = line_landmark(tr, pair);
                if (!c)
                    continue;
                h.landmark_c = *c;
                bool consistent = true;
                for (std::size_t i = 0; i < n && consistent; ++i)
                    consistent = std::abs(wrap_angle(bc[i] - bearing_to(h.landmark_c, h.poses[i]))) < 1e-6;
                if (!consistent)
                    continue;
                h.resection_logw.assign(n, 0.0);
                bool duplicate = std::any_of(out.begin(), out.end(), [&](const TrajectoryHypothesis& o) {
                    return distance(o.landmark_c, h.landmark_c) < 1e-9 &&
                           distance(o.poses[0].position(), h.poses[0].position()) < 1e-9;
                });
                if (!duplicate)
                    out.push_back(std::move(h));
            }
        }
    }
    return out;
}

TripletPosterior aggregate(const std::vector<TrajectoryHypothesis>& hyps, std::size_t views,
                           const SpacePartition& partition, SolverVariant variant)
{
    const std::size_t d = partition.size();
    TripletPosterior post;
    post.variant = variant;
    post.hypothesis_count = hyps.size();
    std::vector<double> lc(d, 0.0);
    std::vector<std::vector<double>> cams(views, std::vector<double>(d, 0.0));
    double best = kNegInf;
    for (const auto& h : hyps)
        best = std::max(best, h.log_weight());
    if (hyps.empty() || !std::isfinite(best)) {
        post.degraded = true;
        post.landmark_state = StateVector::uniform(d);
        post.camera_states.assign(views, StateVector::uniform(d));
        return post;
    }
    for (const auto& h : hyps) {
        double w = std::exp(h.log_weight() - best);
        if (!(w > 0.0))
            continue;
        lc[partition.classify(h.landmark_c)] += w;
        for (std::size_t i = 0; i < views && i < h.poses.size(); ++i)
            cams[i][partition.classify(h.poses[i].position())] += w;
    }
    post.landmark_state = StateVector(std::move(lc));
    post.landmark_state.normalize();
    for (auto& c : cams) {
        StateVector s(std::move(c));
        s.normalize();
        post.camera_states.push_back(std::move(s));
    }
    return post;
}

} // namespace

std::vector<TrajectoryHypothesis> trajectory_hypotheses(SolverVariant variant, const TripletTrack& track,
                                                        const NoiseConfig& noise, const SpacePartition& partition,
                                                        const SolverParams& params, Rng& rng,
                                                        std::vector<std::size_t>* live)
{
    if (variant == SolverVariant::baseline)
        throw ArgumentError("the baseline does not build trajectory hypotheses");
    const bool noise_free = noise.sigma_v == 0.0 && noise.sigma_w == 0.0;
    if (variant == SolverVariant::full && noise_free && track.views.size() >= 3) {
        auto hyps = exact_trajectories(track, params);
        if (!hyps.empty()) {
            if (live)
                live->assign(track.views.size(), hyps.size());
            return hyps;
        }
    }
    return sample_trajectories(variant == SolverVariant::full, track, noise, partition, params, rng, live);
}

TripletPosterior solve_full(std::span<const Observation> observations, std::span<const Action> actions,
                            const NoiseConfig& noise, const SpacePartition& partition, const SolverParams& params,
                            Rng& rng)
{
    TripletTrack tr = make_track(observations, actions, true);
    std::vector<std::size_t> live;
    auto hyps = trajectory_hypotheses(SolverVariant::full, tr, noise, partition, params, rng, &live);
    TripletPosterior post = aggregate(hyps, tr.views.size(), partition, SolverVariant::full);
    post.live_hypotheses = std::move(live);
    return post;
}

TripletPosterior solve_fast(std::span<const Observation> observations, std::span<const Action> actions,
                            const NoiseConfig& noise, const SpacePartition& partition, const SolverParams& params,
                            Rng& rng)
{
    TripletTrack tr = make_track(observations, actions, true);
    std::vector<std::size_t> live;
    auto hyps = trajectory_hypotheses(SolverVariant::fast, tr, noise, partition, params, rng, &live);
    TripletPosterior post = aggregate(hyps, tr.views.size(), partition, SolverVariant::fast);
    post.live_hypotheses = std::move(live);
    return post;
}

TripletPosterior solve_baseline(std::span<const Observation> observations, const NoiseConfig& noise,
                                const SpacePartition& partition, const SolverParams& params, Rng& rng)
{
    TripletTrack tr = make_track(observations, {}, false);
    const std::size_t n = tr.views.size();
    const std::size_t d = partition.size();
    const std::size_t m = std::max<std::size_t>(1, params.pose_samples);
    const double sigma_v = effective_noise(noise, params).sigma_v;

    // independent pose samples per view
    std::vector<std::vector<Pose2>> poses(n);
    for (std::size_t i = 0; i < n; ++i) {
        ViewCircles vc = view_circles(tr.views[i], noise.sigma_v, m, rng);
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t ci = k % vc.circles.size();
            Vec2 p = vc.circles[ci].point_at((double(k) + uniform(rng, 0.0, 1.0)) / double(m));
            if (distance(p, kLandmarkA) < 1e-12 || distance(p, kLandmarkB) < 1e-12)
                continue;
            poses[i].push_back(pose_on(vc.phi_a[ci], p));
        }
    }

    // landmark candidates along the lines of sight of every view
    std::vector<Vec2> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        if (poses[i].empty())
            continue;
        for (std::size_t c = 0; c < params.baseline_candidates; ++c) {
            const Pose2& x = poses[i][std::uniform_int_distribution<std::size_t>(0, poses[i].size() - 1)(rng)];
            double dir = x.alpha + tr.views[i].bearings[2] + gaussian(rng, noise.sigma_v);
            double tmax = ray_exit(x.position(), heading(dir), partition.borders());
            candidates.push_back(x.position() + uniform(rng, 0.0, tmax) * heading(dir));
        }
    }

    // score: product over views of the mean bearing likelihood over that view's pose samples
    std::vector<double> score(candidates.size(), 0.0);
    std::vector<std::vector<std::vector<double>>> per_pose(candidates.size(), std::vector<std::vector<double>>(n));
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            auto& lik = per_pose[c][i];
            lik.resize(poses[i].size());
            double best = kNegInf;
            for (std::size_t k = 0; k < poses[i].size(); ++k) {
                lik[k] = distance(candidates[c], poses[i][k].position()) < 1e-12
                             ? kNegInf
                             : bearing_loglik(tr.views[i].bearings[2], candidates[c], poses[i][k], sigma_v);
                best = std::max(best, lik[k]);
            }
            if (!std::isfinite(best)) {
                score[c] = kNegInf;
                continue;
            }
            double s = 0.0;
            for (double& l : lik) {
                l = std::exp(l - best);
                s += l;
            }
            for (double& l : lik)
                l /= s;
            score[c] += best + std::log(s / double(poses[i].size()));
        }
    }

    TripletPosterior post;
    post.variant = SolverVariant::baseline;
    post.hypothesis_count = candidates.size();
    post.live_hypotheses.assign(n, candidates.size());
    double top = candidates.empty() ? kNegInf : *std::max_element(score.begin(), score.end());
    if (!std::isfinite(top)) {
        post.degraded = true;
        post.landmark_state = StateVector::uniform(d);
        post.camera_states.assign(n, StateVector::uniform(d));
        return post;
    }
    std::vector<double> lc(d, 0.0);
    std::vector<std::vector<double>> cams(n, std::vector<double>(d, 0.0));
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        double w = std::exp(score[c] - top);
        if (!(w > 0.0))
            continue;
        lc[partition.classify(candidates[c])] += w;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < poses[i].size(); ++k)
                if (per_pose[c][i][k] > 0.0)
                    cams[i][partition.classify(poses[i][k].position())] += w * per_pose[c][i][k];
    }
    post.landmark_state = StateVector(std::move(lc));
    post.landmark_state.normalize();
    for (auto& c : cams) {
        StateVector s(std::move(c));
        s.normalize();
        post.camera_states.push_back(std::move(s));
    }
    return post;
}

TripletPosterior solve(SolverVariant variant, std::span<const Observation> observations,
                       std::span<const Action> actions, const NoiseConfig& noise, const SpacePartition& partition,
                       const SolverParams& params, Rng& rng)
{
    switch (variant) {
    case SolverVariant::full: return solve_full(observations, actions, noise, partition, params, rng);
    case SolverVariant::fast: return solve_fast(observations, actions, noise, partition, params, rng);
    case SolverVariant::baseline: return solve_baseline(observations, noise, partition, params, rng);
    }
    throw ArgumentError("unknown solver variant");
}

} // namespace qslam
