#include "qslam/experiment.hpp"

#include "qslam/errors.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

namespace qslam {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn)
{
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        next = n;
                    }
                }
            });
    }
    if (failure)
        std::rethrow_exception(failure);
}

namespace {

std::uint64_t job_stream(const SolveJob& job, std::size_t triplet_index)
{
    return std::uint64_t(job.scenario) * 1000003ULL + std::uint64_t(triplet_index) * 4ULL + std::uint64_t(job.variant);
}

} // namespace

std::vector<SolveRecord> solve_batch(std::span<const Scenario> scenarios, const SpacePartition& partition,
                                     const BatchOptions& options)
{
    struct Pending {
        SolveJob job;
        std::size_t triplet_index;
    };
    std::vector<Pending> jobs;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const auto triplets = observed_triplets(scenarios[s]);
        for (std::size_t t = 0; t < triplets.size(); ++t)
            for (SolverVariant v : options.variants)
                jobs.push_back({{s, triplets[t], v}, t});
    }

    std::vector<SolveRecord> out(jobs.size());
    parallel_for(jobs.size(), options.threads, [&](std::size_t k) {
        const Pending& p = jobs[k];
        const Scenario& sc = scenarios[p.job.scenario];
        const NoiseConfig noise = options.noise.value_or(sc.noise);
        const TripletFrameData data = to_triplet_frame(sc, p.job.triplet);
        const TripletTruth truth = triplet_truth(data, partition);

        SolveRecord& rec = out[k];
        rec.job = p.job;
        Rng rng = stream_rng(options.seed, job_stream(p.job, p.triplet_index));
        const auto t0 = std::chrono::steady_clock::now();
        try {
            rec.posterior = solve(p.job.variant, data.observations, data.actions, noise, partition, options.params, rng);
        } catch (const Error& e) {
            rec.error = e.what();
            rec.posterior = TripletPosterior{};
            rec.posterior.landmark_state = StateVector::uniform(partition.size());
            rec.posterior.variant = p.job.variant;
            rec.posterior.degraded = true;
        }
        const auto t1 = std::chrono::steady_clock::now();

        ResultRow& row = rec.row;
        row.scenario_id = sc.id;
        row.triplet = p.job.triplet;
        row.solver = p.job.variant;
        row.sigma_v_deg = noise_degrees(noise.sigma_v);
        row.sigma_w_deg = noise_degrees(noise.sigma_w);
        row.views = int(data.observations.size());
        row.gt_state = int(truth.landmark_state) + 1;
        row.metrics = evaluate(rec.posterior.landmark_state, truth.landmark_state, partition);
        row.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    });
    return out;
}

} // namespace qslam
