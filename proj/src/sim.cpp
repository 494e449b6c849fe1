#include "dmrkit/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <thread>

#include "dmrkit/analysis.hpp"
#include "dmrkit/rng.hpp"

namespace dmrkit {

namespace {

struct QueuedJob {
	long idx; // 1-based
	Rat remaining;
	Rat served;
	Rat deadline_at;
	Rat dismiss_at;
};

// Event-driven sweep over the supply breakpoints. Within one linear supply
// segment the only events are: the queue head completing, the queue head
// reaching its dismiss point, and the segment ending. Dismiss points are
// increasing along the FCFS queue, so only the head's can fire.
class TraceEngine {
public:
	// on_resolved(job index, missed, served) fires once per job, in
	// completion/dismissal order (not necessarily index order).
	TraceEngine(const TaskSpec& task, const SupplyModel& supply,
	            std::function<void(long, bool, const Rat&)> on_resolved)
		: task(task), supply(supply), on_resolved(std::move(on_resolved))
	{
	}

	// Runs jobs 1..n with execution times from exec_of, then keeps the
	// supply flowing (releasing nothing) until every job is resolved.
	// Returns the delivered-service totals at each period boundary
	// 0, T, 2T, ..., nT.
	std::vector<Rat> run(long n, const std::function<Rat(long)>& exec_of)
	{
		const Rat T = task.period;
		std::vector<Rat> served_at_boundary;
		served_at_boundary.push_back(cum_served); // t = 0
		for (long p = 0; long(served_at_boundary.size()) <= n || !queue.empty(); p++) {
			Rat period_start = Rat(p, 1) * T;
			if (p < n)
				release(p + 1, exec_of(p + 1), period_start);
			run_period(p, period_start);
			served_at_boundary.push_back(cum_served);
		}
		served_at_boundary.resize(n + 1, cum_served);
		return served_at_boundary;
	}

private:
	void release(long idx, const Rat& exec, const Rat& at)
	{
		queue.push_back({idx, exec, Rat(0), at + task.deadline,
		                 at + task.deadline + task.dismiss_offset});
		pop_completed(at);
	}

	// Jobs whose whole work has been served complete the instant they reach
	// the queue head (zero-work jobs complete immediately unless queued
	// behind unfinished work).
	void pop_completed(const Rat& now)
	{
		while (!queue.empty() && queue.front().remaining.is_zero()) {
			const QueuedJob& j = queue.front();
			on_resolved(j.idx, now > j.deadline_at, j.served);
			queue.pop_front();
		}
	}

	void run_period(long p, const Rat& period_start)
	{
		const SupplyCurve& curve = supply.curve_for_job(p + 1);
		for (size_t seg = 0; seg + 1 < curve.points.size(); seg++) {
			Rat seg_start = period_start + curve.points[seg].first;
			Rat seg_end = period_start + curve.points[seg + 1].first;
			Rat gain = curve.points[seg + 1].second - curve.points[seg].second;
			Rat slope = gain / (curve.points[seg + 1].first - curve.points[seg].first);
			run_segment(seg_start, seg_end, slope);
		}
	}

	void run_segment(Rat now, const Rat& seg_end, const Rat& slope)
	{
		while (now < seg_end) {
			if (queue.empty())
				return; // idle component: this supply is wasted
			QueuedJob& head = queue.front();
			// Earliest of: completion, dismissal, end of segment.
			Rat next = seg_end;
			bool completes = false;
			if (slope.sign() > 0) {
				Rat done_at = now + head.remaining / slope;
				if (done_at <= next) {
					next = done_at;
					completes = true;
				}
			}
			if (head.dismiss_at < next) {
				next = head.dismiss_at;
				completes = false;
			}
			Rat amount = completes ? head.remaining : slope * (next - now);
			head.remaining -= amount;
			head.served += amount;
			cum_served += amount;
			now = next;
			if (head.remaining.is_zero()) {
				on_resolved(head.idx, now > head.deadline_at, head.served);
				queue.pop_front();
				pop_completed(now);
			} else if (now == head.dismiss_at) {
				// Unfinished at the dismiss point: work discarded, job missed
				// (the dismiss point is never before the deadline).
				on_resolved(head.idx, true, head.served);
				queue.pop_front();
				pop_completed(now);
			}
		}
	}

	const TaskSpec& task;
	const SupplyModel& supply;
	std::function<void(long, bool, const Rat&)> on_resolved;
	std::deque<QueuedJob> queue;
	Rat cum_served;
};

void require_exact(const SupplyModel& supply, const char* what)
{
	if (supply.mode != SupplyMode::exact)
		throw std::invalid_argument(std::string(what) +
		                            " needs an exact-mode supply (a trace has no "
		                            "concrete timeline under bound curves)");
}

void require_valid_scenario(const TaskSpec& task, const SupplyModel& supply)
{
	ValidationReport rep = validate_scenario(task, supply);
	if (!rep.ok())
		throw std::invalid_argument("invalid scenario: " + rep.joined());
}

} // namespace

std::vector<JobOutcome> trace_jobs(const TaskSpec& task, const SupplyModel& supply,
                                   const std::vector<Rat>& exec_times)
{
	require_valid_scenario(task, supply);
	require_exact(supply, "trace_jobs");
	const long n = long(exec_times.size());

	std::vector<JobOutcome> out(n);
	std::vector<Rat> served(n + 1);
	TraceEngine engine(task, supply, [&](long idx, bool missed, const Rat& s) {
		out[idx - 1].missed = missed;
		served[idx] = s;
	});
	std::vector<Rat> boundary =
		engine.run(n, [&](long j) { return exec_times[j - 1]; });

	// Backlog after job j's period = work of jobs 1..j that is served (ever,
	// i.e. survives dismissal) minus everything delivered before the
	// boundary. Jobs j+1... cannot be served before jT, so the difference is
	// exactly the carried work.
	Rat prefix;
	for (long j = 1; j <= n; j++) {
		prefix += served[j];
		out[j - 1].backlog = prefix - boundary[j];
	}
	return out;
}

Rat DmrNDistribution::mean() const
{
	Rat m;
	for (const auto& [value, prob] : points)
		m += value * prob;
	return m;
}

namespace {

DmrNDistribution enumerate_direct(const TaskSpec& task, const SupplyModel& supply, long n)
{
	const size_t h = task.exec.size();
	std::vector<size_t> pick(n, 0);
	std::vector<Rat> exec(n);
	std::vector<Rat> by_misses(n + 1);
	while (true) {
		Rat prob(1);
		for (long i = 0; i < n; i++) {
			exec[i] = task.exec.entries[pick[i]].value;
			prob *= task.exec.entries[pick[i]].prob;
		}
		auto outcomes = trace_jobs(task, supply, exec);
		long misses = long(std::count_if(outcomes.begin(), outcomes.end(),
		                                 [](const JobOutcome& o) { return o.missed; }));
		by_misses[misses] += prob;

		// Odometer over the h^n realizations.
		long i = n - 1;
		while (i >= 0 && ++pick[i] == h)
			pick[i--] = 0;
		if (i < 0)
			break;
	}

	DmrNDistribution dist;
	dist.n = n;
	for (long m = 0; m <= n; m++)
		if (!by_misses[m].is_zero())
			dist.points.emplace_back(Rat(m, n), by_misses[m]);
	return dist;
}

DmrNDistribution enumerate_dp(const TaskSpec& task, const SupplyModel& supply, long n,
                              const BuildOptions& build)
{
	MarkovChain chain = build_chain(task, supply, build);
	const size_t ns = chain.size();

	// dp[m][s] = P(first j jobs produced m misses and the chain sits in s).
	std::vector<std::vector<Rat>> dp(n + 1, std::vector<Rat>(ns));
	for (uint32_t s = 0; s < ns; s++)
		if (!chain.lambda[s].is_zero())
			dp[chain.states[s].missed ? 1 : 0][s] += chain.lambda[s];

	for (long j = 2; j <= n; j++) {
		std::vector<std::vector<Rat>> next(n + 1, std::vector<Rat>(ns));
		for (long m = 0; m < j; m++)
			for (uint32_t s = 0; s < ns; s++) {
				if (dp[m][s].is_zero())
					continue;
				for (const auto& [r, p] : chain.columns[s])
					next[m + (chain.states[r].missed ? 1 : 0)][r] += p * dp[m][s];
			}
		dp = std::move(next);
	}

	DmrNDistribution dist;
	dist.n = n;
	for (long m = 0; m <= n; m++) {
		Rat prob;
		for (uint32_t s = 0; s < ns; s++)
			prob += dp[m][s];
		if (!prob.is_zero())
			dist.points.emplace_back(Rat(m, n), prob);
	}
	return dist;
}

} // namespace

DmrNDistribution enumerate_dmr_n(const TaskSpec& task, const SupplyModel& supply, long n,
                                 EnumMode mode, size_t direct_budget, const BuildOptions& build)
{
	require_valid_scenario(task, supply);
	if (n < 1)
		throw std::invalid_argument("enumerate_dmr_n: n must be >= 1");

	if (mode == EnumMode::automatic) {
		if (supply.mode != SupplyMode::exact) {
			mode = EnumMode::dynamic_prog;
		} else {
			// h^n within budget?
			mpz_class total = 1;
			bool fits = true;
			for (long i = 0; i < n && fits; i++) {
				total *= long(task.exec.size());
				fits = total <= direct_budget;
			}
			mode = fits ? EnumMode::direct : EnumMode::dynamic_prog;
		}
	}
	if (mode == EnumMode::direct) {
		require_exact(supply, "direct enumeration");
		mpz_class total = 1;
		for (long i = 0; i < n; i++) {
			total *= long(task.exec.size());
			if (total > direct_budget)
				throw std::invalid_argument(
					"direct enumeration of h^n = " + std::to_string(task.exec.size()) +
					"^" + std::to_string(n) + " realizations exceeds the budget of " +
					std::to_string(direct_budget) + "; use the DP mode");
		}
		return enumerate_direct(task, supply, n);
	}
	return enumerate_dp(task, supply, n, build);
}

namespace {

// Exact sampler for the execution-time distribution: probabilities share the
// common denominator L; a uniform draw below L picks the entry.
class ExecSampler {
public:
	explicit ExecSampler(const ExecDistribution& dist)
	{
		mpz_class lcm = 1;
		for (const auto& e : dist.entries)
			mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), e.prob.den().get_mpz_t());
		if (!lcm.fits_ulong_p())
			throw std::invalid_argument(
				"execution probabilities need a common denominator beyond 64 bits; "
				"not supported by the sampler");
		range = lcm.get_ui();
		uint64_t acc = 0;
		for (const auto& e : dist.entries) {
			mpz_class weight = e.prob.num() * (lcm / e.prob.den());
			acc += weight.get_ui();
			thresholds.push_back(acc);
		}
	}

	size_t pick(Xoshiro256ss& rng) const
	{
		uint64_t u = rng.below(range);
		size_t k = 0;
		while (thresholds[k] <= u)
			k++;
		return k;
	}

private:
	uint64_t range;
	std::vector<uint64_t> thresholds;
};

} // namespace

SimReport monte_carlo(const TaskSpec& task, const SupplyModel& supply, long n_jobs,
                      uint64_t seed, uint64_t stream)
{
	require_valid_scenario(task, supply);
	require_exact(supply, "monte_carlo");
	if (n_jobs < 1)
		throw std::invalid_argument("monte_carlo: n_jobs must be >= 1");

	SimReport rep;
	rep.n_jobs = n_jobs;
	rep.seed = seed;
	rep.stream = stream;
	rep.phase_misses.assign(supply.repeat_q(), 0);

	Xoshiro256ss rng(seed, stream);
	ExecSampler sampler(task.exec);
	const int q = supply.repeat_q();

	TraceEngine engine(task, supply, [&](long idx, bool missed, const Rat&) {
		if (missed) {
			rep.misses++;
			rep.phase_misses[(idx - 1) % q]++;
		}
	});
	engine.run(n_jobs, [&](long) { return task.exec.entries[sampler.pick(rng)].value; });
	rep.empirical_dmr = double(rep.misses) / double(n_jobs);
	return rep;
}

std::vector<SimReport> monte_carlo_reps(const TaskSpec& task, const SupplyModel& supply,
                                        long n_jobs, uint64_t seed, int reps, int threads)
{
	if (reps < 1)
		throw std::invalid_argument("monte_carlo_reps: reps must be >= 1");
	std::vector<SimReport> out(reps);
	threads = std::max(1, std::min(threads, reps));
	std::atomic<int> next{0};
	auto worker = [&]() {
		for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1))
			out[r] = monte_carlo(task, supply, n_jobs, seed, uint64_t(r));
	};
	std::vector<std::thread> pool;
	for (int t = 1; t < threads; t++)
		pool.emplace_back(worker);
	worker();
	for (auto& t : pool)
		t.join();
	return out;
}

SandwichResult sandwich_check(const TaskSpec& task, const SupplyModel& bounds,
                              const SupplyModel& concrete, long n_jobs, uint64_t seed)
{
	require_valid_scenario(task, bounds);
	require_valid_scenario(task, concrete);
	require_exact(concrete, "sandwich_check (concrete side)");
	if (bounds.repeat_q() != concrete.repeat_q())
		throw std::invalid_argument("sandwich_check: bound and concrete supplies must "
		                            "share the same repetition Q");
	for (long j = 1; j <= bounds.repeat_q(); j++) {
		if (!pointwise_leq(bounds.lower_for_job(j), concrete.curve_for_job(j)) ||
		    !pointwise_leq(concrete.curve_for_job(j), bounds.upper_for_job(j)))
			throw std::invalid_argument(
				"sandwich_check: concrete curve for phase " + std::to_string(j - 1) +
				" is not between the bound curves");
	}

	MarkovChain chain = build_chain(task, bounds);
	AnalysisResult res = compute_dmr(chain, {.force_exact = true});
	if (!res.irreducible)
		throw std::runtime_error("sandwich_check: the bound chain is not irreducible, "
		                         "no DMR bound exists");

	SandwichResult sr;
	sr.bound_dmr = *res.dmr;
	sr.empirical_dmr = monte_carlo(task, concrete, n_jobs, seed).empirical_dmr;
	double b = sr.bound_dmr.to_double();
	sr.sigma = std::sqrt(b * (1 - b) / double(n_jobs));
	sr.ok = sr.empirical_dmr <= b + 4 * sr.sigma;
	return sr;
}

} // namespace dmrkit
