#include <doctest.h>

#include "dmrkit/supply.hpp"
#include "golden_scenarios.hpp"

using namespace dmrkit;
using golden::curve;

TEST_CASE("curve evaluation interpolates exactly")
{
	SupplyCurve c = curve({{0, 0}, {1, 0}, {3, 2}, {4, 2}});
	CHECK(c.eval(Rat(0)) == Rat(0));
	CHECK(c.eval(Rat(1)) == Rat(0));
	CHECK(c.eval(Rat(2)) == Rat(1));
	CHECK(c.eval(Rat(5, 2)) == Rat(3, 2));
	CHECK(c.eval(Rat(3)) == Rat(2));
	CHECK(c.eval(Rat(4)) == Rat(2));
	CHECK(c.domain() == Rat(4));
	CHECK(c.total() == Rat(2));
	CHECK_THROWS_AS(c.eval(Rat(-1)), std::domain_error);
	CHECK_THROWS_AS(c.eval(Rat(5)), std::domain_error);
}

static bool mentions(const ValidationReport& rep, const std::string& needle)
{
	for (const auto& v : rep.violations)
		if (v.find(needle) != std::string::npos)
			return true;
	return false;
}

TEST_CASE("supply validation")
{
	CHECK(validate_supply(golden::three_phase_supply()).ok());
	CHECK(validate_supply(golden::three_phase_bounds()).ok());
	CHECK(validate_supply(golden::half_rate_supply()).ok());

	SupplyModel m = golden::three_phase_supply();

	SUBCASE("must start at the origin")
	{
		m.curves[0].points[0] = {Rat(0), Rat(1)};
		CHECK_FALSE(validate_supply(m).ok());
	}
	SUBCASE("breakpoint times strictly increase")
	{
		m.curves[0].points[2].first = Rat(1);
		CHECK_FALSE(validate_supply(m).ok());
	}
	SUBCASE("values never decrease")
	{
		m.curves[0].points[2].second = Rat(-1);
		CHECK_FALSE(validate_supply(m).ok());
	}
	SUBCASE("slope never exceeds one")
	{
		// 4 units of work in the 2 time units (1, 3].
		m.curves[0].points[2] = {Rat(3), Rat(4)};
		m.curves[0].points[3] = {Rat(4), Rat(4)};
		CHECK(mentions(validate_supply(m), "1-Lipschitz"));
	}
	SUBCASE("all curves share one domain")
	{
		m.curves[2].points.push_back({Rat(5), Rat(3)});
		CHECK_FALSE(validate_supply(m).ok());
	}
	SUBCASE("bounds must nest")
	{
		SupplyModel b = golden::three_phase_bounds();
		std::swap(b.bounds[0].lower, b.bounds[0].upper);
		CHECK(mentions(validate_supply(b), "exceeds"));
	}
}

TEST_CASE("scenario validation ties supply domain to the period")
{
	CHECK(validate_scenario(golden::two_point_task(), golden::three_phase_supply()).ok());
	TaskSpec t = golden::two_point_task();
	t.period = Rat(5);
	CHECK_FALSE(validate_scenario(t, golden::three_phase_supply()).ok());
}

TEST_CASE("service accumulates whole periods plus a tail")
{
	SupplyModel m = golden::three_phase_supply();
	CHECK(m.service(1, Rat(4)) == Rat(2));
	CHECK(m.service(1, Rat(5)) == Rat(3));
	CHECK(m.service(2, Rat(4)) == Rat(3));
	CHECK(m.service(2, Rat(5)) == Rat(4));
	CHECK(m.service(3, Rat(4)) == Rat(3));
	CHECK(m.service(3, Rat(5)) == Rat(3));

	CHECK(m.service(1, Rat(0)) == Rat(0));
	CHECK(m.service(1, Rat(2)) == Rat(1));
	// Whole cycle: 2 + 3 + 3, then wrap to the first curve again.
	CHECK(m.service(1, Rat(12)) == Rat(8));
	CHECK(m.service(1, Rat(14)) == Rat(9));
	CHECK(m.service(4, Rat(4)) == Rat(2));
	CHECK(m.service(1, Rat(6)) == m.service_u(1, Rat(6)));
	CHECK(m.service(1, Rat(6)) == m.service_l(1, Rat(6)));
}

TEST_CASE("bound service uses the matching curve family")
{
	SupplyModel b = golden::three_phase_bounds();
	CHECK(b.service_l(1, Rat(4)) == Rat(2));
	CHECK(b.service_l(2, Rat(4)) == Rat(3));
	CHECK(b.service_l(3, Rat(4)) == Rat(3));
	CHECK(b.service_u(1, Rat(5)) == Rat(3));
	CHECK(b.service_u(2, Rat(5)) == Rat(4));
	CHECK(b.service_u(3, Rat(5)) == Rat(4));
	CHECK(b.service_u(4, Rat(5)) == Rat(3));
	CHECK(b.service_l(1, Rat(2)) == Rat(0));
	CHECK(b.service_u(1, Rat(2)) == Rat(2));
}

TEST_CASE("pointwise comparison is exact on breakpoint unions")
{
	SupplyCurve lo = curve({{0, 0}, {2, 0}, {4, 2}});
	SupplyCurve hi = curve({{0, 0}, {2, 2}, {4, 2}});
	CHECK(pointwise_leq(lo, hi));
	CHECK_FALSE(pointwise_leq(hi, lo));
	CHECK(pointwise_leq(lo, lo));

	// Equal at every integer, crossing in between.
	SupplyCurve a = curve({{0, 0}, {1, 1}, {2, 1}});
	SupplyCurve b2 = curve({{0, 0}, {Rat(1, 2), 0}, {Rat(3, 2), 1}, {2, 1}});
	CHECK_FALSE(pointwise_leq(a, b2));
	CHECK(pointwise_leq(b2, a));
}

TEST_CASE("tdma generator")
{
	SUBCASE("cycle equal to period gives one curve")
	{
		SupplyModel m = tdma_supply(Rat(3), Rat(3), Rat(1), Rat(2));
		REQUIRE(m.mode == SupplyMode::exact);
		REQUIRE(m.repeat_q() == 1);
		CHECK(m.curves[0] == curve({{0, 0}, {1, 0}, {3, 2}}));
		CHECK(m.service(1, Rat(3)) == Rat(2));
	}
	SUBCASE("misaligned cycle expands to the full hyperperiod")
	{
		SupplyModel m = tdma_supply(Rat(2), Rat(3), Rat(1), Rat(2));
		REQUIRE(m.repeat_q() == 3);
		CHECK(m.curves[0] == curve({{0, 0}, {1, 0}, {2, 1}}));
		CHECK(m.curves[1] == curve({{0, 0}, {1, 1}, {2, 1}}));
		CHECK(m.curves[2] == curve({{0, 0}, {2, 2}}));
	}
	SUBCASE("rejects slots that do not fit the cycle")
	{
		CHECK_THROWS_AS(tdma_supply(Rat(3), Rat(3), Rat(2), Rat(2)), std::invalid_argument);
	}
}

TEST_CASE("cbs generator produces bound pairs")
{
	SupplyModel m = cbs_supply_bounds(Rat(4), Rat(1, 2), Rat(1));
	REQUIRE(m.mode == SupplyMode::bounds);
	REQUIRE(m.repeat_q() == 1);
	CHECK(m.bounds[0].upper.eval(Rat(5, 4)) == Rat(3, 4));
	CHECK(m.bounds[0].lower.eval(Rat(5, 4)) == Rat(1, 2));
	CHECK(m.bounds[0].upper.total() == Rat(2));
	CHECK(m.bounds[0].lower.total() == Rat(2));
	CHECK(pointwise_leq(m.bounds[0].lower, m.bounds[0].upper));
	CHECK(validate_supply(m).ok());
	CHECK_THROWS_AS(cbs_supply_bounds(Rat(4), Rat(2), Rat(1)), std::invalid_argument);
}
