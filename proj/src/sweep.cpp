#include "dmrkit/sweep.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dmrkit/analysis.hpp"
#include "dmrkit/json_io.hpp"

namespace dmrkit {

namespace {

SweepSpec::Axis axis_from_string(const std::string& s) {
	if (s == "deadline") return SweepSpec::Axis::deadline;
	if (s == "dismiss_offset") return SweepSpec::Axis::dismiss_offset;
	if (s == "prob_p") return SweepSpec::Axis::prob_p;
	throw ParseError("unknown sweep axis \"" + s + "\" (expected \"deadline\", \"dismiss_offset\", or \"prob_p\")");
}

// Sub-documents may be given inline or as a path to a separate file,
// resolved against the sweep file's directory.
nlohmann::json resolve_doc(const nlohmann::json& node, const std::string& base_dir, const char* what) {
	if (node.is_object()) return node;
	if (node.is_string()) {
		std::filesystem::path p(node.get<std::string>());
		if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
		return load_json_file(p.string());
	}
	throw ParseError(std::string(what) + " must be an object or a file path string");
}

} // namespace

SweepSpec sweep_from_json(const nlohmann::json& doc, const std::string& base_dir) {
	if (!doc.is_object()) throw ParseError("sweep spec must be a JSON object");
	if (doc.contains("schema") && doc.at("schema") != SCHEMA_VERSION)
		throw ParseError("unsupported schema '" + doc.at("schema").dump() + "', expected \"" +
			std::string(SCHEMA_VERSION) + "\"");
	if (doc.contains("type") && doc.at("type") != "sweep")
		throw ParseError("document type " + doc.at("type").dump() + " where a sweep document was expected");
	if (!doc.contains("task")) throw ParseError("missing field \"task\"");
	if (!doc.contains("supply")) throw ParseError("missing field \"supply\"");
	if (!doc.contains("axis")) throw ParseError("missing field \"axis\"");
	if (!doc.contains("values")) throw ParseError("missing field \"values\"");

	SweepSpec spec;
	spec.base_task = task_from_json(resolve_doc(doc.at("task"), base_dir, "\"task\""));
	spec.supply = supply_from_json(resolve_doc(doc.at("supply"), base_dir, "\"supply\""));
	if (!doc.at("axis").is_string()) throw ParseError("\"axis\" must be a string");
	spec.axis = axis_from_string(doc.at("axis").get<std::string>());
	if (!doc.at("values").is_array() || doc.at("values").empty())
		throw ParseError("\"values\" must be a non-empty array");
	for (const auto& v : doc.at("values")) spec.values.push_back(rat_from_json(v, "values entry"));
	if (doc.contains("max_states")) {
		const auto& n = doc.at("max_states");
		if (!n.is_number_integer() || n.get<long long>() < 0)
			throw ParseError("\"max_states\" must be a non-negative integer");
		spec.build.max_states = n.get<size_t>();
	}
	if (doc.contains("conservative_backlog")) {
		if (!doc.at("conservative_backlog").is_boolean())
			throw ParseError("\"conservative_backlog\" must be a boolean");
		spec.build.conservative_backlog = doc.at("conservative_backlog").get<bool>();
	}
	return spec;
}

TaskSpec apply_axis(const SweepSpec& spec, const Rat& value) {
	TaskSpec task = spec.base_task;
	switch (spec.axis) {
	case SweepSpec::Axis::deadline:
		task.deadline = value;
		break;
	case SweepSpec::Axis::dismiss_offset:
		task.dismiss_offset = value;
		task.dismiss_never = false;
		break;
	case SweepSpec::Axis::prob_p: {
		if (task.exec.entries.size() != 2)
			throw std::invalid_argument("prob_p sweeps need a two-point execution distribution, got "
				+ std::to_string(task.exec.entries.size()) + " points");
		if (value.sign() < 0 || Rat(1) < value)
			throw std::invalid_argument("prob_p value " + value.str() + " is outside [0, 1]");
		task.exec.entries[0].prob = value;
		task.exec.entries[1].prob = Rat(1) - value;
		// A zero-probability point would fail validation; the sweep endpoint
		// degenerates to a one-point distribution instead.
		std::erase_if(task.exec.entries, [](const ExecEntry& e) { return e.prob.is_zero(); });
		break;
	}
	}
	return task;
}

namespace {

SweepRow run_row(const SweepSpec& spec, const Rat& value) {
	using clock = std::chrono::steady_clock;
	SweepRow row;
	row.axis_value = value;
	try {
		TaskSpec task = apply_axis(spec, value);
		ValidationReport report = validate_scenario(task, spec.supply);
		if (!report.ok()) {
			row.status = "invalid: " + report.joined();
			return row;
		}
		auto t0 = clock::now();
		MarkovChain chain = build_chain(task, spec.supply, spec.build);
		auto t1 = clock::now();
		AnalysisResult res = compute_dmr(chain);
		auto t2 = clock::now();
		row.n_states = chain.size();
		row.build_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
		row.solve_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t2 - t1).count();
		if (!res.irreducible) {
			row.status = "not_irreducible";
			return row;
		}
		row.dmr = res.dmr;
		row.dmr_float = res.dmr_value();
		row.status = res.approximate ? "ok_approx" : "ok";
	} catch (const std::exception& e) {
		row.status = std::string("error: ") + e.what();
	}
	return row;
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads) {
	std::vector<SweepRow> rows(spec.values.size());
	if (threads < 1) threads = 1;
	threads = std::min<int>(threads, static_cast<int>(spec.values.size()));
	if (threads <= 1) {
		for (size_t i = 0; i < spec.values.size(); ++i) rows[i] = run_row(spec, spec.values[i]);
		return rows;
	}
	std::atomic<size_t> next{0};
	auto worker = [&] {
		for (;;) {
			size_t i = next.fetch_add(1);
			if (i >= spec.values.size()) return;
			rows[i] = run_row(spec, spec.values[i]);
		}
	};
	std::vector<std::thread> pool;
	for (int t = 0; t < threads - 1; ++t) pool.emplace_back(worker);
	worker();
	for (auto& t : pool) t.join();
	return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
	std::ostringstream out;
	out << "axis_value,dmr_rational,dmr_float,n_states,build_ms,solve_ms,status\n";
	for (const auto& row : rows) {
		out << row.axis_value.str() << ',';
		out << (row.dmr ? row.dmr->str() : "") << ',';
		if (row.dmr_float) {
			char buf[32];
			snprintf(buf, sizeof(buf), "%.12g", *row.dmr_float);
			out << buf;
		}
		out << ',' << row.n_states << ',' << row.build_ms << ',' << row.solve_ms << ',';
		// Statuses carrying exception text may contain commas; quote them.
		if (row.status.find(',') != std::string::npos || row.status.find('"') != std::string::npos) {
			std::string quoted = "\"";
			for (char c : row.status) {
				if (c == '"') quoted += "\"\"";
				else quoted += c;
			}
			quoted += '"';
			out << quoted;
		} else {
			out << row.status;
		}
		out << '\n';
	}
	return out.str();
}

} // namespace dmrkit
