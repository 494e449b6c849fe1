#ifndef DMRKIT_SIM_HPP
#define DMRKIT_SIM_HPP

#include <cstdint>
#include <vector>

#include "dmrkit/chain.hpp"
#include "dmrkit/rational.hpp"
#include "dmrkit/supply.hpp"
#include "dmrkit/task.hpp"

namespace dmrkit {

// Per-job result of a concrete trace: deadline outcome plus the work of jobs
// released so far that is still to be served (and will be, i.e. survives all
// dismissals) at the job's period boundary.
struct JobOutcome {
	bool missed = false;
	Rat backlog;

	bool operator==(const JobOutcome&) const = default;
};

// Direct discrete-event simulation of the processing component: jobs queue
// FCFS, supply follows the (exact-mode) curves segment by segment, unfinished
// work of job j is discarded at (j-1)T + D + delta. The implementation walks
// the raw event timeline and shares no formulas with the chain builder; that
// independence is what makes the chain-equivalence tests meaningful.
std::vector<JobOutcome> trace_jobs(const TaskSpec& task, const SupplyModel& supply,
                                   const std::vector<Rat>& exec_times);

// Exact distribution of the miss rate over the first n jobs.
struct DmrNDistribution {
	long n = 0;
	// (value, probability), values distinct and increasing, probs sum to 1.
	std::vector<std::pair<Rat, Rat>> points;

	Rat mean() const;
};

enum class EnumMode {
	automatic,    // direct when exact supply and h^n fits the budget, else DP
	direct,       // exhaustive trace of all h^n realizations (exact supply only)
	dynamic_prog, // chain-based DP over (state, miss count)
};

// Exact DMR_n distribution, either by exhaustive tracing (independent oracle)
// or by dynamic programming over the chain; both are exact and agree.
DmrNDistribution enumerate_dmr_n(const TaskSpec& task, const SupplyModel& supply, long n,
                                 EnumMode mode = EnumMode::automatic,
                                 size_t direct_budget = 1'000'000,
                                 const BuildOptions& build = {});

struct SimReport {
	long n_jobs = 0;
	long misses = 0;
	uint64_t seed = 0;
	uint64_t stream = 0;
	double empirical_dmr = 0;
	std::vector<long> phase_misses; // misses by (job-1) mod Q
};

// Seeded Monte Carlo run of n_jobs through the trace simulator; identical
// (seed, stream) reproduces the report exactly. stream selects one of the
// generator's jump-separated substreams (used by replications).
SimReport monte_carlo(const TaskSpec& task, const SupplyModel& supply, long n_jobs,
                      uint64_t seed, uint64_t stream = 0);

// reps independent replications on streams 0..reps-1, run on up to `threads`
// worker threads; results ordered by stream.
std::vector<SimReport> monte_carlo_reps(const TaskSpec& task, const SupplyModel& supply,
                                        long n_jobs, uint64_t seed, int reps, int threads);

struct SandwichResult {
	Rat bound_dmr;        // from the bounds-mode chain (exact)
	double empirical_dmr; // Monte Carlo on the concrete supply
	double sigma;         // Bernoulli std dev at the bound rate
	bool ok;              // empirical <= bound + 4 sigma
};

// End-to-end check of the bound semantics: the DMR bound computed from the
// bound curves must dominate the empirical rate of any concrete supply
// sandwiched between them. Throws std::invalid_argument if the concrete
// curves are not within the bounds, std::runtime_error if the bound chain is
// not irreducible.
SandwichResult sandwich_check(const TaskSpec& task, const SupplyModel& bounds,
                              const SupplyModel& concrete, long n_jobs, uint64_t seed);

} // namespace dmrkit

#endif
