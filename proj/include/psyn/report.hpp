#pragma once

// JSON documents written by the CLI. Keys are sorted, so two runs with the
// same inputs serialize identically apart from the "timings" object.

#include <string>

#include <json.hpp>

#include "psyn/eval.hpp"
#include "psyn/pipeline.hpp"
#include "psyn/privacy.hpp"

namespace psyn {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const PipelineConfig& cfg);
Json to_json(const ConditioningVerdict& v);
Json to_json(const RunReport& r);
Json to_json(const AuditRecord& r);
/// Summary only; `worst` lists up to that many queries with the largest error.
Json to_json(const AccuracyReport& r, std::size_t worst = 5);
Json to_json(const MatchResult& r);
Json to_json(const L1Deviation& r);

/// {"schema_version": 1, "command": command, ...body}.
Json make_document(const std::string& command, Json body);

/// Error document: status "error", the error class and its message.
Json error_document(const std::string& command, const std::string& error_class,
                    const std::string& message, int exit_code);

/// Two-space indented with a trailing newline.
std::string dump(const Json& doc);

}  // namespace psyn
