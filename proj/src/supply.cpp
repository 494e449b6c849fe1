#include "dmrkit/supply.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace dmrkit {

Rat SupplyCurve::eval(const Rat& t) const
{
	if (points.empty())
		throw std::domain_error("supply curve has no breakpoints");
	if (t < points.front().first || t > points.back().first)
		throw std::domain_error("supply curve evaluated at t = " + t.str() +
		                        " outside [" + points.front().first.str() + ", " +
		                        points.back().first.str() + "]");
	// First breakpoint with time >= t.
	auto it = std::lower_bound(points.begin(), points.end(), t,
	                           [](const auto& p, const Rat& x) { return p.first < x; });
	if (it->first == t)
		return it->second;
	auto prev = std::prev(it);
	const auto& [t0, v0] = *prev;
	const auto& [t1, v1] = *it;
	return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

Rat SupplyModel::domain() const
{
	if (mode == SupplyMode::exact) {
		if (curves.empty())
			throw std::logic_error("supply model has no curves");
		return curves.front().domain();
	}
	if (bounds.empty())
		throw std::logic_error("supply model has no curves");
	return bounds.front().upper.domain();
}

namespace {

size_t phase_of_job(long j, int q)
{
	long p = (j - 1) % q;
	if (p < 0)
		p += q;
	return size_t(p);
}

} // namespace

const SupplyCurve& SupplyModel::curve_for_job(long j) const
{
	if (mode != SupplyMode::exact)
		throw std::logic_error("curve_for_job on a bounds-mode supply; pick a bound");
	return curves[phase_of_job(j, repeat_q())];
}

const SupplyCurve& SupplyModel::upper_for_job(long j) const
{
	if (mode == SupplyMode::exact)
		return curves[phase_of_job(j, repeat_q())];
	return bounds[phase_of_job(j, repeat_q())].upper;
}

const SupplyCurve& SupplyModel::lower_for_job(long j) const
{
	if (mode == SupplyMode::exact)
		return curves[phase_of_job(j, repeat_q())];
	return bounds[phase_of_job(j, repeat_q())].lower;
}

namespace {

// service(j, t) = sum of the curve totals for the whole periods between the
// release of job j and release + t, plus the tail interpolated on the curve
// of the period the instant t falls in. Whole Q-cycles are batched so the
// cost does not grow with t.
template <typename CurveAt>
Rat service_impl(long j, const Rat& t, const Rat& period, int q, CurveAt curve_at)
{
	if (t.sign() < 0)
		throw std::domain_error("service horizon must be non-negative, got " + t.str());
	mpz_class k = Rat::floor_div(t, period);
	mpz_class cycles = k / q;
	long rest = mpz_class(k % q).get_si();
	long p0 = long(phase_of_job(j, q));

	Rat sum;
	if (cycles != 0) {
		Rat cycle_total;
		for (int p = 0; p < q; p++)
			cycle_total += curve_at(p).total();
		sum += Rat(cycles, 1) * cycle_total;
	}
	long p = p0;
	for (long i = 0; i < rest; i++) {
		sum += curve_at(p).total();
		p = (p + 1) % q;
	}
	Rat tail = t - Rat(k, 1) * period;
	sum += curve_at(p).eval(tail);
	return sum;
}

} // namespace

Rat SupplyModel::service(long j, const Rat& t) const
{
	if (mode != SupplyMode::exact)
		throw std::logic_error("service() on a bounds-mode supply; use service_u/service_l");
	return service_impl(j, t, domain(), repeat_q(),
	                    [&](long p) -> const SupplyCurve& { return curves[p]; });
}

Rat SupplyModel::service_u(long j, const Rat& t) const
{
	if (mode == SupplyMode::exact)
		return service(j, t);
	return service_impl(j, t, domain(), repeat_q(),
	                    [&](long p) -> const SupplyCurve& { return bounds[p].upper; });
}

Rat SupplyModel::service_l(long j, const Rat& t) const
{
	if (mode == SupplyMode::exact)
		return service(j, t);
	return service_impl(j, t, domain(), repeat_q(),
	                    [&](long p) -> const SupplyCurve& { return bounds[p].lower; });
}

namespace {

void check_curve(const SupplyCurve& c, const std::string& label, ValidationReport& rep)
{
	auto flag = [&](const std::string& msg) { rep.violations.push_back(label + ": " + msg); };
	const auto& ps = c.points;
	if (ps.size() < 2) {
		flag("needs at least two breakpoints");
		return;
	}
	if (ps.front().first != Rat(0) || ps.front().second != Rat(0))
		flag("must start at (0, 0), starts at (" + ps.front().first.str() + ", " +
		     ps.front().second.str() + ")");
	for (size_t i = 1; i < ps.size(); i++) {
		const auto& [t0, v0] = ps[i - 1];
		const auto& [t1, v1] = ps[i];
		if (!(t0 < t1)) {
			flag("breakpoint times must be strictly increasing (t = " + t0.str() +
			     " then " + t1.str() + ")");
			return; // later checks assume ordered times
		}
		if (v1 < v0)
			flag("must be non-decreasing (value drops from " + v0.str() + " to " +
			     v1.str() + " at t = " + t1.str() + ")");
		if (v1 - v0 > t1 - t0)
			flag("violates the 1-Lipschitz bound on [" + t0.str() + ", " + t1.str() +
			     "]: gains " + (v1 - v0).str() + " in " + (t1 - t0).str());
	}
}

} // namespace

bool pointwise_leq(const SupplyCurve& a, const SupplyCurve& b)
{
	// Both piecewise linear: a <= b everywhere iff it holds at every
	// breakpoint of either curve.
	std::set<Rat> ts;
	for (const auto& [t, v] : a.points)
		ts.insert(t);
	for (const auto& [t, v] : b.points)
		ts.insert(t);
	for (const auto& t : ts)
		if (b.eval(t) < a.eval(t))
			return false;
	return true;
}

ValidationReport validate_supply(const SupplyModel& supply)
{
	ValidationReport rep;
	auto flag = [&](const std::string& msg) { rep.violations.push_back(msg); };

	size_t n = supply.mode == SupplyMode::exact ? supply.curves.size() : supply.bounds.size();
	if (n == 0) {
		flag("supply model has no curves");
		return rep;
	}
	if (supply.mode == SupplyMode::exact && !supply.bounds.empty())
		flag("exact-mode model must not carry bound pairs");
	if (supply.mode == SupplyMode::bounds && !supply.curves.empty())
		flag("bounds-mode model must not carry exact curves");

	for (size_t i = 0; i < n; i++) {
		std::string label = "curve " + std::to_string(i);
		if (supply.mode == SupplyMode::exact) {
			check_curve(supply.curves[i], label, rep);
		} else {
			check_curve(supply.bounds[i].lower, label + " (lower)", rep);
			check_curve(supply.bounds[i].upper, label + " (upper)", rep);
		}
	}
	if (!rep.ok())
		return rep; // shape errors make the remaining checks unreliable

	Rat dom = supply.domain();
	if (dom.sign() <= 0)
		flag("curve domain must be positive, got " + dom.str());
	for (size_t i = 0; i < n; i++) {
		auto check_dom = [&](const SupplyCurve& c, const std::string& label) {
			if (c.domain() != dom)
				flag(label + " ends at t = " + c.domain().str() +
				     ", expected the common domain " + dom.str());
		};
		std::string label = "curve " + std::to_string(i);
		if (supply.mode == SupplyMode::exact) {
			check_dom(supply.curves[i], label);
		} else {
			check_dom(supply.bounds[i].lower, label + " (lower)");
			check_dom(supply.bounds[i].upper, label + " (upper)");
			if (!pointwise_leq(supply.bounds[i].lower, supply.bounds[i].upper))
				flag(label + ": lower bound exceeds upper bound somewhere");
		}
	}
	return rep;
}

ValidationReport validate_scenario(const TaskSpec& task, const SupplyModel& supply)
{
	ValidationReport rep = validate_task(task);
	ValidationReport sup = validate_supply(supply);
	rep.violations.insert(rep.violations.end(), sup.violations.begin(), sup.violations.end());
	if (rep.ok() && supply.domain() != task.period)
		rep.violations.push_back("supply curves cover one period of length " +
		                         supply.domain().str() + " but the task period is " +
		                         task.period.str());
	return rep;
}

namespace {

// Supply accumulated by watching the window [offset, offset + domain) of an
// infinite schedule that repeats `cycle` and serves during
// [slot_start, slot_start + slot_length) of each repetition. Consecutive
// segments of equal slope are merged.
SupplyCurve periodic_window_curve(const Rat& domain, const Rat& cycle, const Rat& slot_start,
                                  const Rat& slot_length, const Rat& offset)
{
	SupplyCurve c;
	c.points.emplace_back(Rat(0), Rat(0));
	Rat x = offset;           // absolute position in the schedule
	const Rat end = offset + domain;
	Rat v;                    // accumulated supply
	auto emit = [&](const Rat& t, const Rat& val, bool serving) {
		// Extend the previous segment when the slope is unchanged.
		if (c.points.size() >= 2) {
			auto& p1 = c.points[c.points.size() - 1];
			auto& p0 = c.points[c.points.size() - 2];
			bool prev_serving = p1.second != p0.second;
			if (prev_serving == serving) {
				p1 = {t, val};
				return;
			}
		}
		c.points.emplace_back(t, val);
	};
	while (x < end) {
		mpz_class k = Rat::floor_div(x, cycle);
		Rat r = x - Rat(k, 1) * cycle; // position within the current cycle
		Rat step;
		bool serving;
		if (r < slot_start) {
			step = slot_start - r;
			serving = false;
		} else if (r < slot_start + slot_length) {
			step = slot_start + slot_length - r;
			serving = true;
		} else {
			step = cycle - r;
			serving = false;
		}
		step = min(step, end - x);
		x += step;
		if (serving)
			v += step;
		emit(x - offset, v, serving);
	}
	return c;
}

} // namespace

SupplyModel tdma_supply(const Rat& period, const Rat& cycle, const Rat& slot_start,
                        const Rat& slot_length)
{
	if (period.sign() <= 0 || cycle.sign() <= 0)
		throw std::invalid_argument("tdma_supply: period and cycle must be positive");
	if (slot_start.sign() < 0 || slot_length.sign() < 0 || slot_start + slot_length > cycle)
		throw std::invalid_argument("tdma_supply: slot must fit within the cycle");

	// Q = smallest q >= 1 with q * period a multiple of cycle, i.e. the
	// denominator of period / cycle in lowest terms.
	Rat ratio = period / cycle;
	mpz_class q = ratio.den();
	if (!q.fits_slong_p() || q.get_si() > 1'000'000)
		throw std::invalid_argument("tdma_supply: period/cycle alignment repeats only after " +
		                            q.get_str() + " periods; refusing to build");
	long qi = q.get_si();

	SupplyModel m;
	m.mode = SupplyMode::exact;
	for (long p = 0; p < qi; p++) {
		Rat release = Rat(p, 1) * period;
		mpz_class k = Rat::floor_div(release, cycle);
		Rat offset = release - Rat(k, 1) * cycle;
		m.curves.push_back(periodic_window_curve(period, cycle, slot_start, slot_length, offset));
	}
	return m;
}

SupplyModel cbs_supply_bounds(const Rat& period, const Rat& budget, const Rat& server_period)
{
	if (period.sign() <= 0 || server_period.sign() <= 0)
		throw std::invalid_argument("cbs_supply_bounds: periods must be positive");
	if (budget.sign() < 0 || budget > server_period)
		throw std::invalid_argument("cbs_supply_bounds: need 0 <= budget <= server_period");

	SupplyModel m;
	m.mode = SupplyMode::bounds;
	BoundedCurve b;
	// Budget as early as possible vs. as late as possible in each server period.
	b.upper = periodic_window_curve(period, server_period, Rat(0), budget, Rat(0));
	b.lower = periodic_window_curve(period, server_period, server_period - budget, budget, Rat(0));
	m.bounds.push_back(std::move(b));
	return m;
}

} // namespace dmrkit
