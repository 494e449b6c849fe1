#include "dmrkit/json_io.hpp"

#include <fstream>
#include <sstream>

namespace dmrkit {

using nlohmann::json;

namespace {

void check_schema(const json& doc)
{
	if (doc.contains("schema") && doc["schema"] != SCHEMA_VERSION)
		throw ParseError("unsupported schema '" + doc["schema"].dump() + "', expected \"" +
		                 SCHEMA_VERSION + "\"");
}

void check_type(const json& doc, const std::string& expected)
{
	if (doc.contains("type") && doc["type"] != expected)
		throw ParseError("document type " + doc["type"].dump() + " where a " + expected +
		                 " document was expected");
}

const json& field(const json& doc, const std::string& name)
{
	auto it = doc.find(name);
	if (it == doc.end())
		throw ParseError("missing field \"" + name + "\"");
	return *it;
}

} // namespace

Rat rat_from_json(const json& v, const std::string& what)
{
	if (v.is_number_integer())
		return Rat(v.get<long>());
	if (v.is_string()) {
		auto r = Rat::try_parse(v.get<std::string>());
		if (r)
			return *r;
	}
	throw ParseError(what + ": expected a rational as \"a/b\", \"a\" or an integer, got " +
	                 v.dump());
}

TaskSpec task_from_json(const json& doc)
{
	check_schema(doc);
	check_type(doc, "task");
	TaskSpec task;
	task.period = rat_from_json(field(doc, "period"), "period");
	task.deadline = rat_from_json(field(doc, "deadline"), "deadline");

	const json& d = field(doc, "dismiss_offset");
	if (d.is_string() && (d == "inf" || d == "infinity")) {
		task.dismiss_never = true;
	} else {
		task.dismiss_offset = rat_from_json(d, "dismiss_offset");
	}

	const json& exec = field(doc, "execution");
	if (!exec.is_array())
		throw ParseError("execution: expected an array of {value, prob} entries");
	for (const auto& e : exec) {
		ExecEntry entry;
		entry.value = rat_from_json(field(e, "value"), "execution value");
		entry.prob = rat_from_json(field(e, "prob"), "execution prob");
		task.exec.entries.push_back(std::move(entry));
	}
	return task;
}

json task_to_json(const TaskSpec& task)
{
	json exec = json::array();
	for (const auto& e : task.exec.entries)
		exec.push_back({{"value", e.value.str()}, {"prob", e.prob.str()}});
	return {{"schema", SCHEMA_VERSION},
	        {"type", "task"},
	        {"period", task.period.str()},
	        {"deadline", task.deadline.str()},
	        {"dismiss_offset", task.dismiss_never ? json("inf") : json(task.dismiss_offset.str())},
	        {"execution", std::move(exec)}};
}

namespace {

SupplyCurve curve_from_json(const json& v, const std::string& what)
{
	if (!v.is_array())
		throw ParseError(what + ": expected an array of [t, value] breakpoints");
	SupplyCurve c;
	for (const auto& p : v) {
		if (!p.is_array() || p.size() != 2)
			throw ParseError(what + ": each breakpoint must be a [t, value] pair");
		c.points.emplace_back(rat_from_json(p[0], what + " breakpoint time"),
		                      rat_from_json(p[1], what + " breakpoint value"));
	}
	return c;
}

json curve_to_json(const SupplyCurve& c)
{
	json v = json::array();
	for (const auto& [t, val] : c.points)
		v.push_back({t.str(), val.str()});
	return v;
}

SupplyModel supply_from_generator(const json& doc)
{
	const std::string gen = field(doc, "generator").get<std::string>();
	if (gen == "tdma")
		return tdma_supply(rat_from_json(field(doc, "period"), "period"),
		                   rat_from_json(field(doc, "cycle"), "cycle"),
		                   rat_from_json(field(doc, "slot_start"), "slot_start"),
		                   rat_from_json(field(doc, "slot_length"), "slot_length"));
	if (gen == "cbs")
		return cbs_supply_bounds(rat_from_json(field(doc, "period"), "period"),
		                         rat_from_json(field(doc, "budget"), "budget"),
		                         rat_from_json(field(doc, "server_period"), "server_period"));
	throw ParseError("unknown supply generator \"" + gen + "\" (have: tdma, cbs)");
}

} // namespace

SupplyModel supply_from_json(const json& doc)
{
	check_schema(doc);
	check_type(doc, "supply");
	if (doc.contains("generator"))
		return supply_from_generator(doc);

	SupplyModel m;
	const std::string mode = field(doc, "mode").get<std::string>();
	if (mode == "exact")
		m.mode = SupplyMode::exact;
	else if (mode == "bounds")
		m.mode = SupplyMode::bounds;
	else
		throw ParseError("mode must be \"exact\" or \"bounds\", got \"" + mode + "\"");

	const json& curves = field(doc, "curves");
	if (!curves.is_array() || curves.empty())
		throw ParseError("curves: expected a non-empty array");
	for (size_t i = 0; i < curves.size(); i++) {
		std::string what = "curve " + std::to_string(i);
		if (m.mode == SupplyMode::exact) {
			m.curves.push_back(curve_from_json(curves[i], what));
		} else {
			BoundedCurve b;
			b.upper = curve_from_json(field(curves[i], "upper"), what + " upper");
			b.lower = curve_from_json(field(curves[i], "lower"), what + " lower");
			m.bounds.push_back(std::move(b));
		}
	}
	if (doc.contains("q")) {
		long q = field(doc, "q").get<long>();
		if (q != m.repeat_q())
			throw ParseError("q = " + std::to_string(q) + " does not match the " +
			                 std::to_string(m.repeat_q()) + " curves given");
	}
	return m;
}

json supply_to_json(const SupplyModel& supply)
{
	json curves = json::array();
	if (supply.mode == SupplyMode::exact) {
		for (const auto& c : supply.curves)
			curves.push_back(curve_to_json(c));
	} else {
		for (const auto& b : supply.bounds)
			curves.push_back({{"upper", curve_to_json(b.upper)},
			                  {"lower", curve_to_json(b.lower)}});
	}
	return {{"schema", SCHEMA_VERSION},
	        {"type", "supply"},
	        {"mode", supply.mode == SupplyMode::exact ? "exact" : "bounds"},
	        {"q", supply.repeat_q()},
	        {"curves", std::move(curves)}};
}

json chain_to_json(const MarkovChain& chain)
{
	json states = json::array();
	for (const auto& s : chain.states)
		states.push_back({{"phase", s.phase}, {"missed", s.missed}, {"rem", s.rem.str()}});
	json lambda = json::array();
	for (const auto& l : chain.lambda)
		lambda.push_back(l.str());
	json transitions = json::array();
	for (uint32_t s = 0; s < chain.size(); s++)
		for (const auto& [r, p] : chain.columns[s])
			transitions.push_back({{"from", s}, {"to", r}, {"prob", p.str()}});
	return {{"schema", SCHEMA_VERSION},
	        {"type", "chain"},
	        {"q", chain.repeat_q},
	        {"from_bounds", chain.from_bounds},
	        {"backlog_bound", chain.backlog_bound.str()},
	        {"states", std::move(states)},
	        {"lambda", std::move(lambda)},
	        {"transitions", std::move(transitions)},
	        {"miss_states", chain.miss_states()}};
}

json analysis_to_json(const AnalysisResult& result)
{
	json doc = {{"schema", SCHEMA_VERSION},
	            {"type", "analysis"},
	            {"n_states", result.n_states},
	            {"scc_count", result.scc_count},
	            {"irreducible", result.irreducible},
	            {"upper_bound", result.upper_bound},
	            {"approximate", result.approximate},
	            {"diagnostics", result.diagnostics}};
	if (result.dmr) {
		doc["dmr"] = result.dmr->str();
		doc["dmr_float"] = result.dmr->to_double();
	} else if (result.dmr_approx) {
		doc["dmr_float"] = *result.dmr_approx;
	}
	if (result.pi) {
		json pi = json::array();
		for (const auto& p : *result.pi)
			pi.push_back(p.str());
		doc["pi"] = std::move(pi);
	} else if (result.pi_approx) {
		doc["pi_float"] = *result.pi_approx;
	}
	return doc;
}

json report_to_json(const SimReport& report)
{
	return {{"schema", SCHEMA_VERSION},
	        {"type", "simulation"},
	        {"n_jobs", report.n_jobs},
	        {"misses", report.misses},
	        {"seed", report.seed},
	        {"stream", report.stream},
	        {"empirical_dmr", report.empirical_dmr},
	        {"phase_misses", report.phase_misses}};
}

json distribution_to_json(const DmrNDistribution& dist)
{
	json points = json::array();
	for (const auto& [value, prob] : dist.points)
		points.push_back({{"value", value.str()},
		                  {"value_float", value.to_double()},
		                  {"prob", prob.str()},
		                  {"prob_float", prob.to_double()}});
	return {{"schema", SCHEMA_VERSION},
	        {"type", "dmr_distribution"},
	        {"n", dist.n},
	        {"mean", dist.mean().str()},
	        {"mean_float", dist.mean().to_double()},
	        {"points", std::move(points)}};
}

std::string distribution_to_csv(const DmrNDistribution& dist)
{
	std::ostringstream os;
	os << "value,value_float,prob,prob_float\n";
	for (const auto& [value, prob] : dist.points)
		os << value << "," << value.to_double() << "," << prob << "," << prob.to_double()
		   << "\n";
	return os.str();
}

json load_json_file(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw ParseError("cannot open " + path);
	try {
		return json::parse(in);
	} catch (const json::parse_error& e) {
		throw ParseError(path + ": " + e.what());
	}
}

void write_text_file(const std::string& path, const std::string& content)
{
	std::ofstream out(path);
	if (!out)
		throw ParseError("cannot write " + path);
	out << content;
}

} // namespace dmrkit
