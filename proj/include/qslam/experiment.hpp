#pragma once

#include "qslam/io.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace qslam {

struct SolveJob {
    std::size_t scenario = 0; // index into the batch
    TripletId triplet;
    SolverVariant variant = SolverVariant::fast;
};

struct SolveRecord {
    SolveJob job;
    ResultRow row;
    TripletPosterior posterior;
    std::string error; // non-empty when the solver threw; the posterior is then uniform
};

struct BatchOptions {
    std::vector<SolverVariant> variants{SolverVariant::full, SolverVariant::fast, SolverVariant::baseline};
    SolverParams params;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::optional<NoiseConfig> noise; // overrides each scenario's recorded noise
};

/// Solves every observed triplet of every scenario with every variant. Job k draws from
/// its own random stream, so results do not depend on the thread count.
std::vector<SolveRecord> solve_batch(std::span<const Scenario> scenarios, const SpacePartition& partition,
                                     const BatchOptions& options);

/// Runs fn(i) for i in [0, n) on `threads` workers; the first exception is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

} // namespace qslam
