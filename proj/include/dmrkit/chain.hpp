#ifndef DMRKIT_CHAIN_HPP
#define DMRKIT_CHAIN_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dmrkit/rational.hpp"
#include "dmrkit/supply.hpp"
#include "dmrkit/task.hpp"

namespace dmrkit {

// One job-level state: whether the job at this phase missed its deadline and
// how much of its (and its predecessors') work is carried past the period
// boundary after dismissal has been applied.
struct ChainState {
	int phase = 0;  // (job index - 1) mod Q
	bool missed = false;
	Rat rem;        // backlog, >= 0 and <= the model's bound W

	bool operator==(const ChainState&) const = default;
};

// Canonical order: (phase, missed, rem) lexicographic, hits before misses
// within a phase. Chains are always emitted in this order so that rebuilds
// are bit-identical.
inline bool operator<(const ChainState& a, const ChainState& b)
{
	if (a.phase != b.phase)
		return a.phase < b.phase;
	if (a.missed != b.missed)
		return a.missed < b.missed;
	return a.rem < b.rem;
}

// "(0, ✓, 0)" / "(2, ↯, 1/2)" — shared by DOT export and diagnostics.
std::string format_state(const ChainState& s);

struct BuildOptions {
	size_t max_states = 1'000'000;
	// Subtract the lower curve's period total from hit-state backlogs in
	// bounds mode, instead of the upper one. See StepRule.
	bool conservative_backlog = false;
	// Worklist discipline. Any fair order yields the same canonical chain
	// (property-tested); the knob exists only to demonstrate that.
	enum class Worklist { phase_round_robin, fifo, lifo };
	Worklist worklist = Worklist::phase_round_robin;
};

class StateBudgetExceeded : public std::runtime_error {
public:
	size_t budget;
	explicit StateBudgetExceeded(size_t b)
		: std::runtime_error("chain construction exceeded the state budget of " +
		                     std::to_string(b) + " states"),
		  budget(b)
	{
	}
};

// Column s holds the outgoing transitions of state s, i.e. column s of the
// column-stochastic matrix P: entries (r, P[r][s]), sorted by target.
using Column = std::vector<std::pair<uint32_t, Rat>>;

struct MarkovChain {
	std::vector<ChainState> states; // canonical (phase, missed, rem) order
	std::vector<Column> columns;    // same indexing; every column sums to 1
	std::vector<Rat> lambda;        // initial distribution, sums to 1
	int repeat_q = 1;
	bool from_bounds = false;       // built from bound curves: DMR is an upper bound
	Rat backlog_bound;              // W = max_j service-for-backlog(j, D + delta)

	size_t size() const { return states.size(); }
	std::vector<uint32_t> miss_states() const;
	std::optional<uint32_t> find_state(const ChainState& s) const;
	Rat column_sum(uint32_t s) const;
};

// The per-job classification and backlog update, shared by initialization
// (job 1, no carried backlog) and expansion (job at the next phase, carrying
// rem). Exact and bounds modes differ only in which curves feed the four
// per-phase quantities:
//   deadline_service  - classify hit/miss (lower curves in bounds mode)
//   dismiss_service   - truncate a missing job's kept work (upper curves:
//                       keep as much as the component permits)
//   subtracted period total - upper curve total for hits, lower for misses,
//                       as printed in the source construction; the
//                       conservative_backlog option uses the lower total for
//                       hits as well
class StepRule {
public:
	StepRule(const TaskSpec& task, const SupplyModel& supply, bool conservative_backlog = false);

	int repeat_q() const { return int(deadline_service.size()); }
	const Rat& backlog_bound() const { return w; }

	// State of job 1 for execution time e.
	ChainState initial(const Rat& e) const { return classify(0, e); }
	// State of the job following s, for execution time e.
	ChainState successor(const ChainState& s, const Rat& e) const
	{
		return classify((s.phase + 1) % repeat_q(), s.rem + e);
	}

private:
	ChainState classify(int phase, const Rat& load) const;

	std::vector<Rat> deadline_service;
	std::vector<Rat> dismiss_service;
	std::vector<Rat> sub_hit;
	std::vector<Rat> sub_miss;
	Rat w;
};

// Phase-0 states of job 1 with their initial probabilities, merged and in
// canonical order.
std::vector<std::pair<ChainState, Rat>> init_states(const TaskSpec& task, const SupplyModel& supply,
                                                    const BuildOptions& opt = {});

// Successor states of s with transition probabilities, merged and in
// canonical order.
std::vector<std::pair<ChainState, Rat>> expand_state(const ChainState& s, const TaskSpec& task,
                                                     const SupplyModel& supply,
                                                     const BuildOptions& opt = {});

// Worklist construction: seed with the phase-0 states, expand states lacking
// outgoing transitions until closed, merging states with equal
// (phase, missed, rem) exactly. Throws StateBudgetExceeded past
// opt.max_states and std::invalid_argument on invalid inputs.
MarkovChain build_chain(const TaskSpec& task, const SupplyModel& supply,
                        const BuildOptions& opt = {});

// Graphviz export: one node per state labeled "(phase, ✓|↯, rem)", edges
// labeled with exact probabilities, dashed edges from a point node for the
// initial distribution.
std::string to_dot(const MarkovChain& chain);

} // namespace dmrkit

#endif
