#include "dmrkit/chain.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

namespace dmrkit {

std::string format_state(const ChainState& s)
{
	std::ostringstream os;
	os << "(" << s.phase << ", " << (s.missed ? "↯" : "✓") << ", " << s.rem << ")";
	return os.str();
}

std::vector<uint32_t> MarkovChain::miss_states() const
{
	std::vector<uint32_t> out;
	for (uint32_t i = 0; i < states.size(); i++)
		if (states[i].missed)
			out.push_back(i);
	return out;
}

std::optional<uint32_t> MarkovChain::find_state(const ChainState& s) const
{
	auto it = std::lower_bound(states.begin(), states.end(), s);
	if (it == states.end() || !(*it == s))
		return std::nullopt;
	return uint32_t(it - states.begin());
}

Rat MarkovChain::column_sum(uint32_t s) const
{
	Rat sum;
	for (const auto& [r, p] : columns[s])
		sum += p;
	return sum;
}

StepRule::StepRule(const TaskSpec& task, const SupplyModel& supply, bool conservative_backlog)
{
	const int q = supply.repeat_q();
	const Rat dismiss_at = task.deadline + task.dismiss_offset;
	deadline_service.reserve(q);
	dismiss_service.reserve(q);
	sub_hit.reserve(q);
	sub_miss.reserve(q);
	for (int p = 0; p < q; p++) {
		long j = p + 1; // representative job of this phase
		deadline_service.push_back(supply.service_l(j, task.deadline));
		dismiss_service.push_back(supply.service_u(j, dismiss_at));
		Rat upper_total = supply.upper_for_job(j).total();
		Rat lower_total = supply.lower_for_job(j).total();
		sub_hit.push_back(conservative_backlog ? lower_total : upper_total);
		sub_miss.push_back(std::move(lower_total));
		w = max(w, dismiss_service.back());
	}
}

ChainState StepRule::classify(int phase, const Rat& load) const
{
	ChainState out;
	out.phase = phase;
	// Equality counts as a hit: work exactly covered by the service
	// available before the deadline completes at the deadline.
	out.missed = load > deadline_service[phase];
	if (!out.missed) {
		out.rem = max(load - sub_hit[phase], Rat(0));
	} else {
		// Work not served by the dismiss point is discarded; of the kept
		// part, this period's supply total has already been delivered.
		out.rem = max(min(load, dismiss_service[phase]) - sub_miss[phase], Rat(0));
	}
	return out;
}

namespace {

void require_valid(const TaskSpec& task, const SupplyModel& supply)
{
	ValidationReport rep = validate_scenario(task, supply);
	if (!rep.ok())
		throw std::invalid_argument("invalid scenario: " + rep.joined());
}

std::vector<std::pair<ChainState, Rat>> merge_outcomes(const TaskSpec& task,
                                                       const StepRule& rule,
                                                       const ChainState* from)
{
	std::map<ChainState, Rat> acc;
	for (const auto& e : task.exec.entries) {
		ChainState t = from ? rule.successor(*from, e.value) : rule.initial(e.value);
		acc[t] += e.prob;
	}
	return {acc.begin(), acc.end()};
}

} // namespace

std::vector<std::pair<ChainState, Rat>> init_states(const TaskSpec& task, const SupplyModel& supply,
                                                    const BuildOptions& opt)
{
	require_valid(task, supply);
	return merge_outcomes(task, StepRule(task, supply, opt.conservative_backlog), nullptr);
}

std::vector<std::pair<ChainState, Rat>> expand_state(const ChainState& s, const TaskSpec& task,
                                                     const SupplyModel& supply,
                                                     const BuildOptions& opt)
{
	require_valid(task, supply);
	return merge_outcomes(task, StepRule(task, supply, opt.conservative_backlog), &s);
}

MarkovChain build_chain(const TaskSpec& task, const SupplyModel& supply, const BuildOptions& opt)
{
	require_valid(task, supply);
	if (opt.max_states == 0)
		throw std::invalid_argument("max_states must be positive");

	const StepRule rule(task, supply, opt.conservative_backlog);
	const int q = rule.repeat_q();

	std::vector<ChainState> states;
	std::vector<Column> columns;
	std::vector<Rat> lambda;
	// Per-phase interning table; exact key equality is what merges states.
	std::vector<std::map<std::pair<bool, Rat>, uint32_t>> interned(q);

	auto intern = [&](const ChainState& st) {
		auto [it, fresh] = interned[st.phase].try_emplace(std::make_pair(st.missed, st.rem),
		                                                  uint32_t(states.size()));
		if (fresh) {
			if (states.size() >= opt.max_states)
				throw StateBudgetExceeded(opt.max_states);
			if (rule.backlog_bound() < st.rem)
				throw std::logic_error("state " + format_state(st) +
				                       " exceeds the backlog bound W = " +
				                       rule.backlog_bound().str());
			states.push_back(st);
			columns.emplace_back();
			lambda.emplace_back();
		}
		return std::make_pair(it->second, fresh);
	};

	// Pending[phase] holds interned states awaiting expansion.
	std::vector<std::vector<uint32_t>> pending(q);
	std::deque<uint32_t> queue; // fifo / lifo disciplines
	size_t n_pending = 0;
	auto push_work = [&](uint32_t id, int phase) {
		if (opt.worklist == BuildOptions::Worklist::phase_round_robin)
			pending[phase].push_back(id);
		else
			queue.push_back(id);
		n_pending++;
	};

	for (const auto& e : task.exec.entries) {
		auto [id, fresh] = intern(rule.initial(e.value));
		if (fresh)
			push_work(id, 0);
		lambda[id] += e.prob;
	}

	auto expand = [&](uint32_t id) {
		const ChainState from = states[id]; // copy: states grows below
		std::map<uint32_t, Rat> acc;
		for (const auto& e : task.exec.entries) {
			ChainState t = rule.successor(from, e.value);
			auto [tid, fresh] = intern(t);
			if (fresh)
				push_work(tid, t.phase);
			acc[tid] += e.prob;
		}
		columns[id] = Column(acc.begin(), acc.end());
	};

	// The construction narrative walks phases round-robin (starting past the
	// seeded phase 0); fifo/lifo exist to property-test order independence.
	if (opt.worklist == BuildOptions::Worklist::phase_round_robin) {
		int p = q - 1;
		while (n_pending > 0) {
			std::vector<uint32_t> batch;
			batch.swap(pending[p]);
			n_pending -= batch.size();
			for (uint32_t id : batch)
				expand(id);
			p = (p + 1) % q;
		}
	} else {
		while (n_pending > 0) {
			uint32_t id;
			if (opt.worklist == BuildOptions::Worklist::fifo) {
				id = queue.front();
				queue.pop_front();
			} else {
				id = queue.back();
				queue.pop_back();
			}
			n_pending--;
			expand(id);
		}
	}

	// Canonical (phase, missed, rem) order, so identical inputs rebuild
	// bit-identical chains regardless of discovery order.
	std::vector<uint32_t> order(states.size());
	std::iota(order.begin(), order.end(), 0);
	std::sort(order.begin(), order.end(),
	          [&](uint32_t a, uint32_t b) { return states[a] < states[b]; });
	std::vector<uint32_t> new_id(states.size());
	for (uint32_t i = 0; i < order.size(); i++)
		new_id[order[i]] = i;

	MarkovChain chain;
	chain.repeat_q = q;
	chain.from_bounds = supply.mode == SupplyMode::bounds;
	chain.backlog_bound = rule.backlog_bound();
	chain.states.reserve(states.size());
	chain.columns.resize(states.size());
	chain.lambda.reserve(states.size());
	for (uint32_t i = 0; i < order.size(); i++) {
		uint32_t old = order[i];
		chain.states.push_back(states[old]);
		chain.lambda.push_back(lambda[old]);
		Column col = columns[old];
		for (auto& [target, prob] : col)
			target = new_id[target];
		std::sort(col.begin(), col.end());
		chain.columns[i] = std::move(col);
	}

	for (uint32_t s = 0; s < chain.size(); s++)
		if (chain.column_sum(s) != Rat(1))
			throw std::logic_error("column " + std::to_string(s) +
			                       " does not sum to 1 (internal error)");
	return chain;
}

std::string to_dot(const MarkovChain& chain)
{
	std::ostringstream os;
	os << "digraph chain {\n\trankdir=LR;\n\tinit [shape=point];\n";
	for (uint32_t i = 0; i < chain.size(); i++)
		os << "\ts" << i << " [label=\"" << format_state(chain.states[i]) << "\", shape="
		   << (chain.states[i].missed ? "doublecircle" : "ellipse") << "];\n";
	for (uint32_t i = 0; i < chain.size(); i++)
		if (chain.lambda[i].sign() > 0)
			os << "\tinit -> s" << i << " [label=\"" << chain.lambda[i]
			   << "\", style=dashed];\n";
	for (uint32_t s = 0; s < chain.size(); s++)
		for (const auto& [r, p] : chain.columns[s])
			os << "\ts" << s << " -> s" << r << " [label=\"" << p << "\"];\n";
	os << "}\n";
	return os.str();
}

} // namespace dmrkit
