#ifndef DMRKIT_SWEEP_HPP
#define DMRKIT_SWEEP_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmrkit/chain.hpp"
#include "dmrkit/rational.hpp"
#include "dmrkit/supply.hpp"
#include "dmrkit/task.hpp"

namespace dmrkit {

// A family of scenarios: one base scenario with one parameter swept over a
// value list. prob_p requires a two-point execution distribution; value v
// sets P(first value) = v and P(second value) = 1 - v (an endpoint value 0
// or 1 degenerates to the single remaining point).
struct SweepSpec {
	enum class Axis { deadline, dismiss_offset, prob_p };

	Axis axis = Axis::deadline;
	TaskSpec base_task;
	SupplyModel supply;
	std::vector<Rat> values;
	BuildOptions build;
};

// {"task": path-or-inline, "supply": path-or-inline, "axis": "deadline" |
// "dismiss_offset" | "prob_p", "values": [...], optional "max_states",
// "conservative_backlog"}. Relative paths resolve against base_dir.
SweepSpec sweep_from_json(const nlohmann::json& doc, const std::string& base_dir);

// The scenario at one axis value.
TaskSpec apply_axis(const SweepSpec& spec, const Rat& value);

struct SweepRow {
	Rat axis_value;
	std::optional<Rat> dmr;
	std::optional<double> dmr_float;
	size_t n_states = 0;
	long build_ms = 0;
	long solve_ms = 0;
	// "ok", "ok_approx", "not_irreducible", or "error: ..."
	std::string status;
};

// Rows run independently on up to `threads` workers; the result order is the
// input order. Per-row failures land in the row's status, never abort the
// sweep.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads = 1);

// Plot-ready CSV: axis_value,dmr_rational,dmr_float,n_states,build_ms,solve_ms,status
std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace dmrkit

#endif
