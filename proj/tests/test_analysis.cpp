#include <doctest.h>

#include <cmath>

#include "dmrkit/analysis.hpp"
#include "golden_scenarios.hpp"

using namespace dmrkit;

namespace {

Rat pi_at(const MarkovChain& c, const std::vector<Rat>& pi, int phase, bool missed, Rat rem)
{
	auto i = c.find_state(ChainState{phase, missed, std::move(rem)});
	REQUIRE(i);
	return pi[*i];
}

} // namespace

TEST_CASE("strong connectivity of the golden chains")
{
	MarkovChain c = build_chain(golden::two_point_task(), golden::three_phase_supply());
	auto scc = strongly_connected_components(c);
	CHECK(scc.count == 1);
	auto [irr, n] = check_irreducible(c);
	CHECK(irr);
	CHECK(n == 1);
}

TEST_CASE("overloaded half-rate scenario is reducible")
{
	MarkovChain c = build_chain(golden::overload_task(), golden::half_rate_supply());
	REQUIRE(c.size() == 4);
	CHECK(c.find_state(ChainState{0, true, Rat(1, 4)}).has_value());
	CHECK(c.find_state(ChainState{0, true, Rat(1, 2)}).has_value());
	CHECK(c.find_state(ChainState{0, true, Rat(3, 4)}).has_value());
	CHECK(c.find_state(ChainState{0, true, Rat(1)}).has_value());

	auto scc = strongly_connected_components(c);
	CHECK(scc.count == 4);
	auto [irr, n] = check_irreducible(c);
	CHECK_FALSE(irr);
	CHECK(n == 4);

	CHECK_THROWS_AS(stationary_distribution(c), SingularSystem);

	AnalysisResult res = compute_dmr(c);
	CHECK_FALSE(res.irreducible);
	CHECK(res.scc_count == 4);
	CHECK_FALSE(res.dmr.has_value());
	CHECK_FALSE(res.dmr_approx.has_value());
	CHECK_FALSE(res.dmr_value().has_value());
	REQUIRE_FALSE(res.diagnostics.empty());
	bool mentioned = false;
	for (const auto& d : res.diagnostics)
		mentioned = mentioned || d.find("component") != std::string::npos;
	CHECK(mentioned);
}

TEST_CASE("exact stationary distribution of the six-state chain")
{
	MarkovChain c = build_chain(golden::two_point_task(), golden::three_phase_supply());
	std::vector<Rat> pi = stationary_distribution(c);

	CHECK(pi_at(c, pi, 0, false, Rat(0)) == Rat(4, 24));
	CHECK(pi_at(c, pi, 0, true, Rat(1)) == Rat(4, 24));
	CHECK(pi_at(c, pi, 1, false, Rat(0)) == Rat(6, 24));
	CHECK(pi_at(c, pi, 1, true, Rat(1)) == Rat(2, 24));
	CHECK(pi_at(c, pi, 2, false, Rat(0)) == Rat(7, 24));
	CHECK(pi_at(c, pi, 2, true, Rat(0)) == Rat(1, 24));

	Rat sum;
	for (const auto& p : pi)
		sum += p;
	CHECK(sum == Rat(1));

	// pi is stationary: P pi = pi, exactly.
	std::vector<Rat> next(pi.size());
	for (uint32_t s = 0; s < c.size(); s++)
		for (const auto& [r, p] : c.columns[s])
			next[r] += p * pi[s];
	CHECK(next == pi);
}

TEST_CASE("full analysis of the six-state chain")
{
	MarkovChain c = build_chain(golden::two_point_task(), golden::three_phase_supply());
	AnalysisResult res = compute_dmr(c);
	CHECK(res.n_states == 6);
	CHECK(res.irreducible);
	CHECK_FALSE(res.upper_bound);
	CHECK_FALSE(res.approximate);
	REQUIRE(res.dmr.has_value());
	CHECK(*res.dmr == Rat(7, 24));
	CHECK(*res.dmr_value() == doctest::Approx(7.0 / 24).epsilon(1e-12));
}

TEST_CASE("bound-mode analysis flags the result as an upper bound")
{
	MarkovChain c = build_chain(golden::two_point_task(), golden::three_phase_bounds());
	AnalysisResult res = compute_dmr(c);
	REQUIRE(res.irreducible);
	CHECK(res.upper_bound);
	REQUIRE(res.dmr.has_value());
	CHECK(*res.dmr == Rat(1, 3));

	std::vector<Rat> pi = stationary_distribution(c);
	CHECK(pi_at(c, pi, 0, false, Rat(0)) == Rat(3, 21));
	CHECK(pi_at(c, pi, 0, true, Rat(1)) == Rat(4, 21));
	CHECK(pi_at(c, pi, 1, false, Rat(0)) == Rat(5, 21));
	CHECK(pi_at(c, pi, 1, true, Rat(1)) == Rat(2, 21));
	CHECK(pi_at(c, pi, 2, false, Rat(0)) == Rat(6, 21));
	CHECK(pi_at(c, pi, 2, true, Rat(1)) == Rat(1, 21));
}

TEST_CASE("power iteration agrees with the exact solver")
{
	MarkovChain c = build_chain(golden::two_point_task(), golden::three_phase_supply());
	std::vector<Rat> exact = stationary_distribution(c);
	std::vector<double> approx = stationary_distribution_approx(c);
	REQUIRE(approx.size() == exact.size());
	for (size_t i = 0; i < exact.size(); i++)
		CHECK(std::abs(approx[i] - exact[i].to_double()) < 1e-9);
}

TEST_CASE("the exact/approximate switch is honored")
{
	MarkovChain c = build_chain(golden::two_point_task(), golden::three_phase_supply());

	AnalysisOptions force_approx;
	force_approx.force_exact = false;
	AnalysisResult res = compute_dmr(c, force_approx);
	CHECK(res.approximate);
	CHECK_FALSE(res.dmr.has_value());
	REQUIRE(res.dmr_approx.has_value());
	CHECK(*res.dmr_approx == doctest::Approx(7.0 / 24).epsilon(1e-9));
	bool labeled = false;
	for (const auto& d : res.diagnostics)
		labeled = labeled || d.find("approximate") != std::string::npos;
	CHECK(labeled);

	AnalysisOptions small_limit;
	small_limit.exact_state_limit = 3; // chain has 6 states
	CHECK(compute_dmr(c, small_limit).approximate);

	AnalysisOptions force_exact;
	force_exact.exact_state_limit = 3;
	force_exact.force_exact = true;
	AnalysisResult ex = compute_dmr(c, force_exact);
	CHECK_FALSE(ex.approximate);
	CHECK(ex.dmr == Rat(7, 24));
}
