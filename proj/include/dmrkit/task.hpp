#ifndef DMRKIT_TASK_HPP
#define DMRKIT_TASK_HPP

#include <string>
#include <vector>

#include "dmrkit/rational.hpp"

namespace dmrkit {

// One point of the discrete execution-time distribution.
struct ExecEntry {
	Rat value; // execution time, >= 0
	Rat prob;  // > 0; all probs sum to exactly 1

	bool operator==(const ExecEntry&) const = default;
};

// Discrete execution-time distribution; values strictly increasing.
struct ExecDistribution {
	std::vector<ExecEntry> entries;

	size_t size() const { return entries.size(); }
	bool operator==(const ExecDistribution&) const = default;
};

// Periodic task with a post-deadline dismiss point: the job released at
// (j-1)*period has deadline (j-1)*period + deadline and is removed from the
// system (dismissed) at (j-1)*period + deadline + dismiss_offset if still
// unfinished. Execution times are drawn iid from exec.
struct TaskSpec {
	ExecDistribution exec;
	Rat period;
	Rat deadline;
	Rat dismiss_offset;
	// Set when the input asked for dismiss_offset = infinity. Kept only so
	// validation can reject it with a specific diagnostic; an accepted task
	// never has this set.
	bool dismiss_never = false;

	bool operator==(const TaskSpec&) const = default;
};

struct ValidationReport {
	std::vector<std::string> violations;

	bool ok() const { return violations.empty(); }
	std::string joined() const;
};

// Checks every well-formedness rule on the task in one pass and reports all
// violations, not just the first.
ValidationReport validate_task(const TaskSpec& task);

} // namespace dmrkit

#endif
