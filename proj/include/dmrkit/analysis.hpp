#ifndef DMRKIT_ANALYSIS_HPP
#define DMRKIT_ANALYSIS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmrkit/chain.hpp"
#include "dmrkit/rational.hpp"

namespace dmrkit {

struct SccResult {
	int count = 0;
	std::vector<int> component_of; // per state, component ids 0..count-1
};

// Strongly connected components of the nonzero-transition graph (iterative
// Tarjan; chains can be deep, so no recursion).
SccResult strongly_connected_components(const MarkovChain& chain);

// (irreducible, number of SCCs). Irreducible iff the graph is one SCC.
std::pair<bool, int> check_irreducible(const MarkovChain& chain);

// The stationary system has no one-dimensional nullspace; signals a broken
// precondition (stationary_distribution requires an irreducible chain).
class SingularSystem : public std::runtime_error {
	using std::runtime_error::runtime_error;
};

// Exact stationary distribution: the unique pi with P pi = pi, sum pi = 1.
// State elimination on (P - I) in GTH form: eliminating a state k replaces
// paths through k by direct edges weighted with the renormalized transition
// probabilities, which keeps every intermediate quantity non-negative and
// detects singularity as a state with no remaining outgoing mass. States are
// eliminated in min-fill order to limit fill-in on the banded chains this
// tool produces. Precondition: irreducible (else SingularSystem).
std::vector<Rat> stationary_distribution(const MarkovChain& chain);

// Floating-point fallback for chains too large to solve exactly. The chains
// built here are periodic with period Q (the phase advances
// deterministically), so plain power iteration would oscillate; iterating
// the lazy chain (P + I)/2 preserves the stationary vector and converges.
// Returns the iterate once the L1 step residual drops to tol, or after
// max_iter sweeps.
std::vector<double> stationary_distribution_approx(const MarkovChain& chain,
                                                   double tol = 1e-12,
                                                   size_t max_iter = 1'000'000);

struct AnalysisOptions {
	// Largest chain solved exactly; larger chains take the approximate path.
	size_t exact_state_limit = 10'000;
	// Override the size-based switch (testing / benchmarking).
	std::optional<bool> force_exact;
};

struct AnalysisResult {
	size_t n_states = 0;
	int scc_count = 0;
	bool irreducible = false;
	bool upper_bound = false;  // chain from bound curves: dmr bounds the true DMR
	bool approximate = false;  // floating-point solver used
	std::optional<std::vector<Rat>> pi;
	std::optional<Rat> dmr;
	std::optional<std::vector<double>> pi_approx;
	std::optional<double> dmr_approx;
	std::vector<std::string> diagnostics;

	// Float view of whichever dmr is present.
	std::optional<double> dmr_value() const
	{
		if (dmr)
			return dmr->to_double();
		return dmr_approx;
	}
};

// The full pipeline: irreducibility check, stationary distribution, DMR as
// the stationary mass on miss states. Reducible chains get no dmr; the SCC
// decomposition lands in diagnostics instead.
AnalysisResult compute_dmr(const MarkovChain& chain, const AnalysisOptions& opt = {});

} // namespace dmrkit

#endif
