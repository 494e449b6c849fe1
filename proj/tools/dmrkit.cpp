#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmrkit/analysis.hpp"
#include "dmrkit/chain.hpp"
#include "dmrkit/json_io.hpp"
#include "dmrkit/sim.hpp"
#include "dmrkit/supply.hpp"
#include "dmrkit/sweep.hpp"
#include "dmrkit/task.hpp"

namespace {

using namespace dmrkit;

std::string fmt_float(double v)
{
	char buf[32];
	snprintf(buf, sizeof(buf), "%.5g", v);
	return buf;
}

long ms_between(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b)
{
	return std::chrono::duration_cast<std::chrono::milliseconds>(b - a).count();
}

// State budget precedence: --max-states flag, then DMRKIT_MAX_STATES, then
// the caller's fallback (built-in default or sweep-spec value).
size_t resolve_max_states(const std::optional<size_t>& flag, size_t fallback)
{
	if (flag)
		return *flag;
	if (const char* env = std::getenv("DMRKIT_MAX_STATES")) {
		std::string s(env);
		size_t pos = 0;
		unsigned long long v = 0;
		try {
			v = std::stoull(s, &pos);
		} catch (const std::exception&) {
			pos = std::string::npos;
		}
		if (pos != s.size() || s.empty())
			throw std::invalid_argument("DMRKIT_MAX_STATES=\"" + s + "\" is not a state count");
		return size_t(v);
	}
	return fallback;
}

TaskSpec load_task(const std::string& path)
{
	return task_from_json(load_json_file(path));
}

SupplyModel load_supply(const std::string& path)
{
	return supply_from_json(load_json_file(path));
}

void require_valid(const TaskSpec& task, const SupplyModel& supply)
{
	ValidationReport report = validate_scenario(task, supply);
	if (!report.ok())
		throw std::invalid_argument(report.joined());
}

void dump_json(const nlohmann::json& doc, const std::string& path, bool pretty)
{
	write_text_file(path, doc.dump(pretty ? 2 : -1) + "\n");
}

struct ScenarioArgs {
	std::string task_path;
	std::string supply_path;
};

struct AnalyzeArgs {
	ScenarioArgs scenario;
	std::string out_path;
	std::string dot_path;
	std::string chain_json_path;
	std::optional<size_t> max_states;
	bool conservative_backlog = false;
	bool pretty = false;
	bool timing = false;
};

int run_analyze(const AnalyzeArgs& args)
{
	TaskSpec task = load_task(args.scenario.task_path);
	SupplyModel supply = load_supply(args.scenario.supply_path);
	require_valid(task, supply);

	BuildOptions build;
	build.max_states = resolve_max_states(args.max_states, build.max_states);
	build.conservative_backlog = args.conservative_backlog;

	auto t0 = std::chrono::steady_clock::now();
	MarkovChain chain = build_chain(task, supply, build);
	auto t1 = std::chrono::steady_clock::now();
	AnalysisResult result = compute_dmr(chain);
	auto t2 = std::chrono::steady_clock::now();

	if (!args.dot_path.empty())
		write_text_file(args.dot_path, to_dot(chain));
	if (!args.chain_json_path.empty())
		dump_json(chain_to_json(chain), args.chain_json_path, args.pretty);
	if (!args.out_path.empty())
		dump_json(analysis_to_json(result), args.out_path, args.pretty);

	if (!result.irreducible) {
		std::cout << "DMR = None (not irreducible)\n";
		for (const auto& line : result.diagnostics)
			std::cerr << line << "\n";
		return 2;
	}

	if (result.dmr) {
		if (result.upper_bound)
			std::cout << "DMR ≤ " << result.dmr->str() << " (upper bound, supply-bound mode)\n";
		else
			std::cout << "DMR = " << result.dmr->str() << " (~" << fmt_float(result.dmr->to_double()) << ")\n";
	} else {
		if (result.upper_bound)
			std::cout << "DMR ≤ ~" << fmt_float(*result.dmr_approx)
			          << " (upper bound, supply-bound mode, approximate)\n";
		else
			std::cout << "DMR ≈ " << fmt_float(*result.dmr_approx) << " (approximate)\n";
	}
	if (args.timing)
		std::cout << "timing: states=" << chain.size() << " build_ms=" << ms_between(t0, t1)
		          << " solve_ms=" << ms_between(t1, t2)
		          << " solver=" << (result.approximate ? "approx" : "exact") << "\n";
	return 0;
}

int run_validate(const std::string& task_path, const std::string& supply_path)
{
	std::optional<TaskSpec> task;
	std::optional<SupplyModel> supply;
	std::vector<std::string> problems;
	if (!task_path.empty()) {
		try {
			task = load_task(task_path);
		} catch (const std::exception& e) {
			problems.push_back(std::string("task: ") + e.what());
		}
	}
	if (!supply_path.empty()) {
		try {
			supply = load_supply(supply_path);
		} catch (const std::exception& e) {
			problems.push_back(std::string("supply: ") + e.what());
		}
	}
	if (problems.empty()) {
		ValidationReport report;
		if (task && supply)
			report = validate_scenario(*task, *supply);
		else if (task)
			report = validate_task(*task);
		else
			report = validate_supply(*supply);
		problems = report.violations;
	}
	if (problems.empty()) {
		std::cout << "OK\n";
		return 0;
	}
	for (const auto& p : problems)
		std::cout << p << "\n";
	return 1;
}

struct EnumerateArgs {
	ScenarioArgs scenario;
	long n = 0;
	std::string mode = "auto";
	size_t budget = 1'000'000;
	std::optional<size_t> max_states;
	std::string out_path;
	std::string csv_path;
	bool pretty = false;
};

int run_enumerate(const EnumerateArgs& args)
{
	TaskSpec task = load_task(args.scenario.task_path);
	SupplyModel supply = load_supply(args.scenario.supply_path);
	require_valid(task, supply);

	EnumMode mode = EnumMode::automatic;
	if (args.mode == "direct")
		mode = EnumMode::direct;
	else if (args.mode == "dp")
		mode = EnumMode::dynamic_prog;

	BuildOptions build;
	build.max_states = resolve_max_states(args.max_states, build.max_states);

	DmrNDistribution dist = enumerate_dmr_n(task, supply, args.n, mode, args.budget, build);

	if (!args.out_path.empty())
		dump_json(distribution_to_json(dist), args.out_path, args.pretty);
	if (!args.csv_path.empty())
		write_text_file(args.csv_path, distribution_to_csv(dist));

	std::cout << "DMR_" << dist.n << " distribution (" << dist.points.size() << " points):\n";
	for (const auto& [value, prob] : dist.points)
		std::cout << "  " << value.str() << "\t" << prob.str() << "\t(~" << fmt_float(prob.to_double())
		          << ")\n";
	Rat mean = dist.mean();
	std::cout << "mean = " << mean.str() << " (~" << fmt_float(mean.to_double()) << ")\n";
	return 0;
}

struct SimulateArgs {
	ScenarioArgs scenario;
	long n = 1'000'000;
	uint64_t seed = 42;
	int reps = 1;
	int jobs = 1;
	std::string bounds_path;
	std::string out_path;
	bool pretty = false;
};

int run_simulate(const SimulateArgs& args)
{
	TaskSpec task = load_task(args.scenario.task_path);
	SupplyModel supply = load_supply(args.scenario.supply_path);
	require_valid(task, supply);

	if (!args.bounds_path.empty()) {
		SupplyModel bounds = load_supply(args.bounds_path);
		SandwichResult r = sandwich_check(task, bounds, supply, args.n, args.seed);
		if (!args.out_path.empty()) {
			nlohmann::json doc = {
				{"schema", SCHEMA_VERSION},
				{"type", "sandwich"},
				{"bound_dmr", r.bound_dmr.str()},
				{"bound_dmr_float", r.bound_dmr.to_double()},
				{"empirical_dmr", r.empirical_dmr},
				{"sigma", r.sigma},
				{"ok", r.ok},
				{"n_jobs", args.n},
				{"seed", args.seed},
			};
			dump_json(doc, args.out_path, args.pretty);
		}
		std::cout << "bound = " << r.bound_dmr.str() << " (~" << fmt_float(r.bound_dmr.to_double())
		          << ")\n";
		std::cout << "empirical = " << fmt_float(r.empirical_dmr) << " (n=" << args.n
		          << ", seed=" << args.seed << ")\n";
		std::cout << "ok = " << (r.ok ? "yes" : "NO") << " (empirical ≤ bound + 4σ, σ="
		          << fmt_float(r.sigma) << ")\n";
		return r.ok ? 0 : 1;
	}

	std::vector<SimReport> reports;
	if (args.reps <= 1)
		reports.push_back(monte_carlo(task, supply, args.n, args.seed));
	else
		reports = monte_carlo_reps(task, supply, args.n, args.seed, args.reps, args.jobs);

	if (!args.out_path.empty()) {
		if (reports.size() == 1) {
			dump_json(report_to_json(reports[0]), args.out_path, args.pretty);
		} else {
			nlohmann::json arr = nlohmann::json::array();
			for (const auto& r : reports)
				arr.push_back(report_to_json(r));
			nlohmann::json doc = {
				{"schema", SCHEMA_VERSION},
				{"type", "simulation_reps"},
				{"reports", arr},
			};
			dump_json(doc, args.out_path, args.pretty);
		}
	}

	double sum = 0;
	for (const auto& r : reports) {
		std::cout << "rep " << r.stream << ": seed=" << r.seed << " n=" << r.n_jobs
		          << " misses=" << r.misses << " empirical=" << fmt_float(r.empirical_dmr) << "\n";
		sum += r.empirical_dmr;
	}
	if (reports.size() > 1)
		std::cout << "mean empirical = " << fmt_float(sum / double(reports.size())) << " over "
		          << reports.size() << " reps\n";
	return 0;
}

struct SweepArgs {
	std::string spec_path;
	std::string out_path;
	int jobs = 1;
	std::optional<size_t> max_states;
};

int run_sweep_cmd(const SweepArgs& args)
{
	nlohmann::json doc = load_json_file(args.spec_path);
	std::string base_dir = std::filesystem::path(args.spec_path).parent_path().string();
	if (base_dir.empty())
		base_dir = ".";
	SweepSpec spec = sweep_from_json(doc, base_dir);
	spec.build.max_states = resolve_max_states(args.max_states, spec.build.max_states);

	std::vector<SweepRow> rows = run_sweep(spec, args.jobs);
	std::string csv = sweep_csv(rows);
	if (args.out_path.empty()) {
		std::cout << csv;
	} else {
		write_text_file(args.out_path, csv);
		std::cout << rows.size() << " rows written to " << args.out_path << "\n";
	}
	return 0;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"long-run deadline miss rate of a periodic task on a Q-periodic supply"};
	app.require_subcommand(1);

	std::string v_task, v_supply;
	auto* validate = app.add_subcommand("validate", "check task/supply files, list violations");
	validate->add_option("--task", v_task, "task JSON file")->check(CLI::ExistingFile);
	validate->add_option("--supply", v_supply, "supply JSON file")->check(CLI::ExistingFile);

	AnalyzeArgs an;
	size_t an_max_states = 0;
	auto* analyze = app.add_subcommand("analyze", "build the chain and compute the exact DMR");
	analyze->add_option("--task", an.scenario.task_path, "task JSON file")
		->required()->check(CLI::ExistingFile);
	analyze->add_option("--supply", an.scenario.supply_path, "supply JSON file")
		->required()->check(CLI::ExistingFile);
	analyze->add_option("--out", an.out_path, "write the analysis result JSON here");
	analyze->add_option("--dot", an.dot_path, "write a Graphviz view of the chain here");
	analyze->add_option("--chain-json", an.chain_json_path, "write the raw chain JSON here");
	auto* an_ms = analyze->add_option("--max-states", an_max_states, "state budget (default 1000000)");
	analyze->add_flag("--conservative-backlog", an.conservative_backlog,
	                  "bounds mode: carry the larger hit-state backlog");
	analyze->add_flag("--pretty", an.pretty, "indent JSON outputs");
	analyze->add_flag("--timing", an.timing, "print build/solve wall time");

	EnumerateArgs en;
	size_t en_max_states = 0;
	auto* enumerate = app.add_subcommand("enumerate", "exact DMR_n distribution over the first n jobs");
	enumerate->add_option("--task", en.scenario.task_path, "task JSON file")
		->required()->check(CLI::ExistingFile);
	enumerate->add_option("--supply", en.scenario.supply_path, "supply JSON file")
		->required()->check(CLI::ExistingFile);
	enumerate->add_option("--n", en.n, "number of jobs")->required()->check(CLI::PositiveNumber);
	enumerate->add_option("--mode", en.mode, "auto, direct (exhaustive trace), or dp (chain-based)")
		->check(CLI::IsMember({"auto", "direct", "dp"}));
	enumerate->add_option("--budget", en.budget, "realization budget for direct mode (default 1000000)");
	auto* en_ms = enumerate->add_option("--max-states", en_max_states, "state budget for dp mode");
	enumerate->add_option("--out", en.out_path, "write the distribution JSON here");
	enumerate->add_option("--csv", en.csv_path, "write the distribution CSV here");
	enumerate->add_flag("--pretty", en.pretty, "indent JSON outputs");

	SimulateArgs si;
	auto* simulate = app.add_subcommand("simulate", "seeded Monte Carlo run of the trace simulator");
	simulate->add_option("--task", si.scenario.task_path, "task JSON file")
		->required()->check(CLI::ExistingFile);
	simulate->add_option("--supply", si.scenario.supply_path, "supply JSON file (exact mode)")
		->required()->check(CLI::ExistingFile);
	simulate->add_option("--n", si.n, "jobs per replication (default 1000000)")
		->check(CLI::PositiveNumber);
	simulate->add_option("--seed", si.seed, "RNG seed (default 42)");
	simulate->add_option("--reps", si.reps, "independent replications (default 1)")
		->check(CLI::PositiveNumber);
	simulate->add_option("--jobs", si.jobs, "worker threads for replications (default 1)")
		->check(CLI::PositiveNumber);
	simulate->add_option("--bounds", si.bounds_path,
	                     "bound supply JSON; checks the empirical rate against the bound chain")
		->check(CLI::ExistingFile);
	simulate->add_option("--out", si.out_path, "write the report JSON here");
	simulate->add_flag("--pretty", si.pretty, "indent JSON outputs");

	SweepArgs sw;
	size_t sw_max_states = 0;
	auto* sweep = app.add_subcommand("sweep", "DMR across a swept parameter, CSV output");
	sweep->add_option("--spec", sw.spec_path, "sweep spec JSON file")
		->required()->check(CLI::ExistingFile);
	sweep->add_option("--out", sw.out_path, "write the CSV here instead of stdout");
	sweep->add_option("--jobs", sw.jobs, "worker threads for rows (default 1)")
		->check(CLI::PositiveNumber);
	auto* sw_ms = sweep->add_option("--max-states", sw_max_states, "state budget per row");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		int code = app.exit(e);
		return code == 0 ? 0 : 1;
	}

	if (an_ms->count())
		an.max_states = an_max_states;
	if (en_ms->count())
		en.max_states = en_max_states;
	if (sw_ms->count())
		sw.max_states = sw_max_states;

	try {
		if (app.got_subcommand(validate)) {
			if (v_task.empty() && v_supply.empty()) {
				std::cerr << "error: validate needs --task and/or --supply\n";
				return 1;
			}
			return run_validate(v_task, v_supply);
		}
		if (app.got_subcommand(analyze))
			return run_analyze(an);
		if (app.got_subcommand(enumerate))
			return run_enumerate(en);
		if (app.got_subcommand(simulate))
			return run_simulate(si);
		if (app.got_subcommand(sweep))
			return run_sweep_cmd(sw);
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	}
	return 0;
}
