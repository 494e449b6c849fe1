#include <doctest.h>

#include <numeric>

#include "golden_scenarios.hpp"
#include "random_scenarios.hpp"

using namespace dmrkit;

TEST_CASE("the scenario generator produces valid, varied scenarios")
{
	int bounds_seen = 0, exact_seen = 0, multi_phase = 0;
	for (uint64_t seed = 1; seed <= 40; ++seed) {
		testgen::Scenario sc = testgen::random_scenario(seed);
		CAPTURE(seed);
		CHECK(validate_scenario(sc.task, sc.supply).ok());
		(sc.supply.mode == SupplyMode::bounds ? bounds_seen : exact_seen)++;
		if (sc.supply.repeat_q() > 1)
			++multi_phase;
		// Same seed, same scenario.
		testgen::Scenario again = testgen::random_scenario(seed);
		CHECK(again.task == sc.task);
		CHECK(again.supply.curves == sc.supply.curves);
		CHECK(again.supply.bounds == sc.supply.bounds);
	}
	CHECK(bounds_seen > 5);
	CHECK(exact_seen > 5);
	CHECK(multi_phase > 5);
}

TEST_CASE("random chains satisfy the structural contract")
{
	std::vector<std::string> failures;
	for (uint64_t seed = 1; seed <= 60; ++seed) {
		auto fails = testgen::check_seed(seed);
		failures.insert(failures.end(), fails.begin(), fails.end());
	}
	std::string joined = std::accumulate(
		failures.begin(), failures.end(), std::string(),
		[](std::string acc, const std::string& f) { return acc + f + "\n"; });
	CHECK_MESSAGE(failures.empty(), joined);
}

TEST_CASE("the reachability oracle is itself sane on the golden chains")
{
	// Hand-checkable cross-validation of the oracle used against Tarjan.
	MarkovChain good = build_chain(golden::two_point_task(), golden::three_phase_supply());
	auto reach = testgen::reachability(good);
	for (size_t i = 0; i < good.size(); ++i)
		for (size_t j = 0; j < good.size(); ++j)
			CHECK(reach[i][j]);

	MarkovChain bad = build_chain(golden::overload_task(), golden::half_rate_supply());
	auto breach = testgen::reachability(bad);
	int mutual_pairs = 0;
	for (size_t i = 0; i < bad.size(); ++i)
		for (size_t j = 0; j < bad.size(); ++j)
			if (i != j && breach[i][j] && breach[j][i])
				++mutual_pairs;
	CHECK(mutual_pairs == 0); // four absorbing-ish singleton components
}
