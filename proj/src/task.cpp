#include "dmrkit/task.hpp"

#include <sstream>

namespace dmrkit {

std::string ValidationReport::joined() const
{
	std::ostringstream os;
	for (size_t i = 0; i < violations.size(); i++) {
		if (i)
			os << "; ";
		os << violations[i];
	}
	return os.str();
}

ValidationReport validate_task(const TaskSpec& task)
{
	ValidationReport rep;
	auto flag = [&](const std::string& msg) { rep.violations.push_back(msg); };

	if (task.period.sign() <= 0)
		flag("period must be positive, got " + task.period.str());
	if (task.deadline.sign() <= 0)
		flag("deadline must be positive, got " + task.deadline.str());

	if (task.dismiss_never) {
		flag("dismiss_offset = infinity is not supported: jobs that are never "
		     "dismissed can accumulate unbounded backlog, so no finite state "
		     "space exists; pick a finite dismiss_offset");
	} else if (task.dismiss_offset.sign() < 0) {
		flag("dismiss_offset must be non-negative, got " + task.dismiss_offset.str());
	}

	const auto& es = task.exec.entries;
	if (es.empty())
		flag("execution distribution must have at least one entry");

	Rat psum;
	for (size_t i = 0; i < es.size(); i++) {
		const auto& e = es[i];
		if (e.value.sign() < 0)
			flag("execution value " + e.value.str() + " is negative");
		if (i > 0 && !(es[i - 1].value < e.value))
			flag("execution values must be strictly increasing: " +
			     es[i - 1].value.str() + " then " + e.value.str());
		if (e.prob.sign() <= 0)
			flag("probability of value " + e.value.str() + " must be positive, got " +
			     e.prob.str());
		psum += e.prob;
	}
	if (!es.empty() && psum != Rat(1))
		flag("probabilities sum to " + psum.str() + ", expected exactly 1");

	return rep;
}

} // namespace dmrkit
