#ifndef DMRKIT_JSON_IO_HPP
#define DMRKIT_JSON_IO_HPP

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dmrkit/analysis.hpp"
#include "dmrkit/chain.hpp"
#include "dmrkit/sim.hpp"
#include "dmrkit/supply.hpp"
#include "dmrkit/task.hpp"

namespace dmrkit {

// Malformed or mistyped input document. Message names the offending field.
class ParseError : public std::runtime_error {
	using std::runtime_error::runtime_error;
};

// All documents carry {"schema": "dmr-kit/1"}; loaders accept documents
// without the field but reject a mismatching version.
inline constexpr const char* SCHEMA_VERSION = "dmr-kit/1";

// Rationals travel as strings "a/b" or "a" (plain JSON integers also
// accepted on input).
Rat rat_from_json(const nlohmann::json& v, const std::string& what);

TaskSpec task_from_json(const nlohmann::json& doc);
nlohmann::json task_to_json(const TaskSpec& task);

// Accepts explicit curve documents ({"mode", "q", "curves"}) and generator
// documents ({"generator": "tdma" | "cbs", ...}).
SupplyModel supply_from_json(const nlohmann::json& doc);
nlohmann::json supply_to_json(const SupplyModel& supply);

nlohmann::json chain_to_json(const MarkovChain& chain);
nlohmann::json analysis_to_json(const AnalysisResult& result);
nlohmann::json report_to_json(const SimReport& report);
nlohmann::json distribution_to_json(const DmrNDistribution& dist);
std::string distribution_to_csv(const DmrNDistribution& dist);

// File helpers used by the CLI; throw ParseError with the path on failure.
nlohmann::json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace dmrkit

#endif
