#include "dmrkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace dmrkit {

SccResult strongly_connected_components(const MarkovChain& chain)
{
	const size_t n = chain.size();
	SccResult res;
	res.component_of.assign(n, -1);

	std::vector<int> index(n, -1), lowlink(n, 0);
	std::vector<char> on_stack(n, 0);
	std::vector<uint32_t> stack;
	int next_index = 0;

	// Explicit DFS frames: (state, position within its column).
	struct Frame {
		uint32_t v;
		size_t edge;
	};
	std::vector<Frame> frames;

	for (uint32_t root = 0; root < n; root++) {
		if (index[root] != -1)
			continue;
		frames.push_back({root, 0});
		index[root] = lowlink[root] = next_index++;
		stack.push_back(root);
		on_stack[root] = 1;
		while (!frames.empty()) {
			auto& [v, edge] = frames.back();
			if (edge < chain.columns[v].size()) {
				uint32_t w = chain.columns[v][edge].first;
				edge++;
				if (index[w] == -1) {
					index[w] = lowlink[w] = next_index++;
					stack.push_back(w);
					on_stack[w] = 1;
					frames.push_back({w, 0});
				} else if (on_stack[w]) {
					lowlink[v] = std::min(lowlink[v], index[w]);
				}
			} else {
				if (lowlink[v] == index[v]) {
					// v is the root of a component.
					while (true) {
						uint32_t w = stack.back();
						stack.pop_back();
						on_stack[w] = 0;
						res.component_of[w] = res.count;
						if (w == v)
							break;
					}
					res.count++;
				}
				uint32_t child = v;
				frames.pop_back();
				if (!frames.empty())
					lowlink[frames.back().v] =
						std::min(lowlink[frames.back().v], lowlink[child]);
			}
		}
	}
	return res;
}

std::pair<bool, int> check_irreducible(const MarkovChain& chain)
{
	SccResult scc = strongly_connected_components(chain);
	return {scc.count == 1, scc.count};
}

std::vector<Rat> stationary_distribution(const MarkovChain& chain)
{
	const size_t n = chain.size();
	if (n == 0)
		throw SingularSystem("empty chain has no stationary distribution");
	// Reducible chains with absorbing components still have Pv = v solutions
	// the elimination would happily return; reject them up front so the
	// precondition is enforced rather than silently ignored.
	if (auto [irreducible, sccs] = check_irreducible(chain); !irreducible)
		throw SingularSystem("chain is not irreducible (" + std::to_string(sccs) +
		                     " strongly connected components)");

	// Row-oriented sparse transition probabilities: out[i][j] = P(i -> j),
	// plus the reverse adjacency needed to rewire paths when i is removed.
	std::vector<std::map<uint32_t, Rat>> out(n);
	std::vector<std::set<uint32_t>> in(n);
	for (uint32_t s = 0; s < n; s++)
		for (const auto& [r, p] : chain.columns[s]) {
			out[s][r] = p;
			in[r].insert(s);
		}

	std::vector<char> alive(n, 1);

	// Lazy min-fill heap: cheapest state to eliminate is the one with the
	// fewest potential new edges (in-1)*(out-1). Stale entries are re-scored
	// on pop.
	auto score = [&](uint32_t k) {
		size_t od = out[k].size() - (out[k].count(k) ? 1 : 0);
		size_t id = in[k].size() - (in[k].count(k) ? 1 : 0);
		return (od ? od - 1 : 0) * (id ? id - 1 : 0);
	};
	using Entry = std::pair<size_t, uint32_t>;
	std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
	for (uint32_t k = 0; k < n; k++)
		heap.push({score(k), k});

	struct Elimination {
		uint32_t k;
		// Alive in-neighbors at elimination time with probabilities
		// renormalized by k's remaining outgoing mass.
		std::vector<std::pair<uint32_t, Rat>> sources;
	};
	std::vector<Elimination> history;
	history.reserve(n - 1);
	size_t alive_count = n;

	while (alive_count > 1) {
		uint32_t k;
		while (true) {
			auto [sc, cand] = heap.top();
			heap.pop();
			if (!alive[cand])
				continue;
			size_t cur = score(cand);
			if (cur != sc) {
				heap.push({cur, cand});
				continue;
			}
			k = cand;
			break;
		}

		// Remaining outgoing mass of k (self-loop excluded).
		Rat total;
		for (const auto& [j, p] : out[k])
			if (j != k)
				total += p;
		if (total.is_zero())
			throw SingularSystem("state " + format_state(chain.states[k]) +
			                     " has no transitions to the remaining states; "
			                     "the chain is not irreducible");

		Elimination elim;
		elim.k = k;
		for (uint32_t i : in[k]) {
			if (i == k)
				continue;
			elim.sources.emplace_back(i, out[i].at(k) / total);
			out[i].erase(k);
		}
		// Rewire i -> k -> j as i -> j with the renormalized weight.
		for (const auto& [i, w] : elim.sources)
			for (const auto& [j, pkj] : out[k]) {
				if (j == k)
					continue;
				out[i][j] += w * pkj;
				in[j].insert(i);
			}
		for (const auto& [j, pkj] : out[k]) {
			in[j].erase(k);
			if (j != k)
				heap.push({score(j), j});
		}
		out[k].clear();
		in[k].clear();
		alive[k] = 0;
		alive_count--;
		for (const auto& [i, w] : elim.sources)
			heap.push({score(i), i});
		history.push_back(std::move(elim));
	}

	uint32_t last = 0;
	for (uint32_t k = 0; k < n; k++)
		if (alive[k])
			last = k;

	// Back substitution: expected visits per unit time, then normalize.
	std::vector<Rat> x(n);
	x[last] = Rat(1);
	for (auto it = history.rbegin(); it != history.rend(); ++it) {
		Rat v;
		for (const auto& [i, w] : it->sources)
			v += x[i] * w;
		x[it->k] = v;
	}
	Rat sum;
	for (const auto& v : x)
		sum += v;
	if (sum.is_zero())
		throw SingularSystem("stationary system degenerated to the zero vector");
	for (auto& v : x)
		v /= sum;
	return x;
}

std::vector<double> stationary_distribution_approx(const MarkovChain& chain, double tol,
                                                   size_t max_iter)
{
	const size_t n = chain.size();
	// Flat CSC image of P for fast sweeps.
	struct Edge {
		uint32_t from, to;
		double p;
	};
	std::vector<Edge> edges;
	for (uint32_t s = 0; s < n; s++)
		for (const auto& [r, p] : chain.columns[s])
			edges.push_back({s, r, p.to_double()});

	std::vector<double> x(n, 1.0 / double(n)), y(n);
	for (size_t it = 0; it < max_iter; it++) {
		// y = ((P + I)/2) x
		for (size_t i = 0; i < n; i++)
			y[i] = 0.5 * x[i];
		for (const auto& e : edges)
			y[e.to] += 0.5 * e.p * x[e.from];
		double residual = 0, sum = 0;
		for (size_t i = 0; i < n; i++) {
			residual += std::abs(y[i] - x[i]);
			sum += y[i];
		}
		for (size_t i = 0; i < n; i++)
			x[i] = y[i] / sum;
		if (residual <= tol)
			break;
	}
	return x;
}

AnalysisResult compute_dmr(const MarkovChain& chain, const AnalysisOptions& opt)
{
	AnalysisResult res;
	res.n_states = chain.size();
	res.upper_bound = chain.from_bounds;

	SccResult scc = strongly_connected_components(chain);
	res.scc_count = scc.count;
	res.irreducible = scc.count == 1;
	if (!res.irreducible) {
		// No stationary analysis; show the decomposition instead.
		std::vector<size_t> sizes(scc.count, 0);
		std::vector<uint32_t> sample(scc.count, 0);
		for (uint32_t i = 0; i < chain.size(); i++) {
			if (sizes[scc.component_of[i]]++ == 0)
				sample[scc.component_of[i]] = i;
		}
		res.diagnostics.push_back("chain is not irreducible: " +
		                          std::to_string(scc.count) +
		                          " strongly connected components");
		const int shown = std::min(scc.count, 8);
		for (int c = 0; c < shown; c++) {
			std::ostringstream os;
			os << "component " << c << ": " << sizes[c] << " state(s), e.g. "
			   << format_state(chain.states[sample[c]]);
			res.diagnostics.push_back(os.str());
		}
		if (scc.count > shown)
			res.diagnostics.push_back("(" + std::to_string(scc.count - shown) +
			                          " more components omitted)");
		return res;
	}

	bool exact = opt.force_exact ? *opt.force_exact
	                             : chain.size() <= opt.exact_state_limit;
	auto miss = chain.miss_states();
	if (exact) {
		res.pi = stationary_distribution(chain);
		Rat dmr;
		for (uint32_t s : miss)
			dmr += (*res.pi)[s];
		if (dmr.sign() < 0 || Rat(1) < dmr)
			throw std::logic_error("DMR " + dmr.str() + " outside [0, 1] (internal error)");
		res.dmr = dmr;
	} else {
		res.approximate = true;
		res.pi_approx = stationary_distribution_approx(chain);
		double dmr = 0;
		for (uint32_t s : miss)
			dmr += (*res.pi_approx)[s];
		res.dmr_approx = dmr;
		res.diagnostics.push_back(
			"stationary distribution computed by power iteration on the lazy "
			"chain (P+I)/2 (chain larger than " +
			std::to_string(opt.exact_state_limit) +
			" states); results are approximate");
	}
	return res;
}

} // namespace dmrkit
