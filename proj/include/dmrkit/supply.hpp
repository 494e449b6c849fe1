#ifndef DMRKIT_SUPPLY_HPP
#define DMRKIT_SUPPLY_HPP

#include <utility>
#include <vector>

#include "dmrkit/rational.hpp"
#include "dmrkit/task.hpp"

namespace dmrkit {

// Piecewise-linear cumulative supply over one period: value(t) = amount of
// processor time guaranteed in [release, release + t). Must start at (0, 0),
// be non-decreasing and 1-Lipschitz, and end exactly at t = period.
struct SupplyCurve {
	// (t, value) breakpoints, t strictly increasing.
	std::vector<std::pair<Rat, Rat>> points;

	Rat domain() const { return points.back().first; }
	Rat total() const { return points.back().second; }

	// Exact linear interpolation; throws std::domain_error outside [0, domain].
	Rat eval(const Rat& t) const;

	bool operator==(const SupplyCurve&) const = default;
};

// lower(t) <= upper(t) for all t; both share the same domain.
struct BoundedCurve {
	SupplyCurve lower;
	SupplyCurve upper;

	bool operator==(const BoundedCurve&) const = default;
};

enum class SupplyMode { exact, bounds };

// Q-periodic description of a greedy processing component: job j (1-based)
// sees curve index (j-1) mod Q. In exact mode each phase has one curve; in
// bounds mode each phase has a lower/upper pair enclosing the true supply.
struct SupplyModel {
	SupplyMode mode = SupplyMode::exact;
	std::vector<SupplyCurve> curves;   // exact mode, size Q
	std::vector<BoundedCurve> bounds;  // bounds mode, size Q

	int repeat_q() const
	{
		return int(mode == SupplyMode::exact ? curves.size() : bounds.size());
	}
	Rat domain() const;

	// Curve accessors by 1-based job index (wraps mod Q). In exact mode the
	// curve is its own upper and lower bound, so the bound accessors work in
	// both modes; curve_for_job is exact-mode only.
	const SupplyCurve& curve_for_job(long j) const;
	const SupplyCurve& upper_for_job(long j) const;
	const SupplyCurve& lower_for_job(long j) const;

	// Cumulative service available to job j within t time units of its
	// release: whole periods contribute their curve totals, the tail is
	// interpolated on the curve of the period it falls in. service() is
	// exact-mode only; the _u/_l forms use the upper/lower curves and
	// degenerate to service() on an exact model.
	Rat service(long j, const Rat& t) const;
	Rat service_u(long j, const Rat& t) const;
	Rat service_l(long j, const Rat& t) const;
};

// Intrinsic well-formedness of the model (curve shape, equal domains,
// lower <= upper). Scenario-level compatibility lives in validate_scenario.
ValidationReport validate_supply(const SupplyModel& supply);

// Task + supply cross checks (supply domain must equal the task period) on
// top of the individual validations.
ValidationReport validate_scenario(const TaskSpec& task, const SupplyModel& supply);

// True iff a(t) <= b(t) for every t in the common domain. Exact: piecewise
// linear functions are compared at the union of their breakpoints.
bool pointwise_leq(const SupplyCurve& a, const SupplyCurve& b);

// TDMA-style GPC: the processor repeats a schedule of length `cycle` and
// serves this task during [slot_start, slot_start + slot_length) of each
// cycle. Q is the smallest number of task periods after which the alignment
// of period boundaries to the cycle repeats.
SupplyModel tdma_supply(const Rat& period, const Rat& cycle, const Rat& slot_start,
                        const Rat& slot_length);

// Constant-bandwidth-server style bounds: within every server period the task
// receives exactly `budget` units, but their placement is unknown, giving an
// upper curve (budget up front) and a lower curve (budget at the end). Q = 1.
SupplyModel cbs_supply_bounds(const Rat& period, const Rat& budget, const Rat& server_period);

} // namespace dmrkit

#endif
