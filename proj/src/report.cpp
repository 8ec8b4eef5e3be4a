#include "psyn/report.hpp"

#include <algorithm>
#include <cmath>

namespace psyn {
namespace {

// JSON has no infinity; encode it as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string query_label(const MarginalQuery& q) {
  std::string s = "{";
  for (std::size_t i = 0; i < q.subset.size(); ++i) {
    if (i) s += ",";
    s += "x" + std::to_string(q.subset[i] + 1) + (q.signs[i] > 0 ? "=1" : "=0");
  }
  return s + "}";
}

}  // namespace

Json to_json(const PipelineConfig& cfg) {
  Json j{{"p", cfg.p},
         {"degree", cfg.d},
         {"m", cfg.m},
         {"delta", cfg.delta},
         {"Delta", cfg.big_delta},
         {"seed", cfg.seed},
         {"max_attempts", cfg.max_attempts}};
  j["k"] = cfg.k ? Json(*cfg.k) : Json(nullptr);
  j["epsilon"] = cfg.epsilon ? Json(*cfg.epsilon) : Json(nullptr);
  return j;
}

Json to_json(const ConditioningVerdict& v) {
  return {{"passed", v.passed}, {"threshold", v.threshold}, {"sigma_min", v.sigma_min}, {"attempts", v.attempts}};
}

Json to_json(const RunReport& r) {
  return {{"conditioning", to_json(r.verdict)},
          {"lambda", r.lambda},
          {"bisection_steps", r.bisection_steps},
          {"undecided_probes", r.undecided_probes},
          {"constraint_residual", r.constraint_residual},
          {"mass_error", r.mass_error},
          {"dykstra_gap", r.dykstra_gap},
          {"dykstra_iterations", r.dykstra_iterations},
          {"box_violation", r.box_violation},
          {"k", r.k_used},
          {"epsilon_guaranteed", r.epsilon_guaranteed},
          {"eta", r.sensitivity_bound},
          {"n", r.n},
          {"duplicate_slots", r.duplicate_slots},
          {"seeds", {{"seed", r.seed}, {"space", r.space_seed}, {"sampling", r.sampling_seed}}},
          {"warnings", r.warnings},
          {"timings", {{"draw_ms", r.timings.draw_ms},
                       {"solve_ms", r.timings.solve_ms},
                       {"sample_ms", r.timings.sample_ms}}}};
}

Json to_json(const AuditRecord& r) {
  return {{"relation", to_string(r.relation)},
          {"n", r.n},
          {"sup_distance", r.sup_distance},
          {"eta", r.eta},
          {"allowed", r.allowed},
          {"max_ratio", r.max_ratio},
          {"ratio_bound", r.ratio_bound},
          {"lambda_first", r.lambda_first},
          {"lambda_second", r.lambda_second},
          {"k", r.k},
          {"epsilon", r.epsilon},
          {"sampling_threshold", number(r.sampling_threshold)},
          {"violation", r.violation}};
}

Json to_json(const AccuracyReport& r, std::size_t worst) {
  std::vector<const QueryError*> order;
  order.reserve(r.per_query.size());
  for (const auto& q : r.per_query) order.push_back(&q);
  const std::size_t keep = std::min(worst, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [](const QueryError* a, const QueryError* b) { return a->error > b->error; });
  Json list = Json::array();
  for (std::size_t i = 0; i < keep; ++i)
    list.push_back({{"query", query_label(order[i]->query)}, {"error", order[i]->error}});
  return {{"degree", r.degree},
          {"queries", r.per_query.size()},
          {"max_error", r.max_error},
          {"mean_error", r.mean_error},
          {"worst", list}};
}

Json to_json(const MatchResult& r) {
  Json j{{"outcome", r.outcome == MatchOutcome::kWitness ? "witness" : "no_witness"},
         {"feasibility_gap", r.feasibility_gap}};
  if (r.outcome == MatchOutcome::kWitness) {
    double min_weight = r.density.weights.empty() ? 0.0 : r.density.weights.front();
    for (double w : r.density.weights) min_weight = std::min(min_weight, w);
    j["residual"] = r.density.residual;
    j["mass_error"] = r.density.mass_error;
    j["min_weight"] = min_weight;
    j["dykstra_iterations"] = r.density.iterations;
  } else {
    j["reason"] = r.reason;
  }
  return j;
}

Json to_json(const L1Deviation& r) {
  return {{"max_deviation", r.max_deviation},
          {"mean_deviation", r.mean_deviation},
          {"envelope", r.envelope},
          {"trials", r.trials}};
}

Json make_document(const std::string& command, Json body) {
  Json doc = body.is_object() ? std::move(body) : Json{{"result", std::move(body)}};
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command;
  if (!doc.contains("status")) doc["status"] = "ok";
  return doc;
}

Json error_document(const std::string& command, const std::string& error_class,
                    const std::string& message, int exit_code) {
  return make_document(command, {{"status", "error"},
                                 {"error", {{"class", error_class}, {"message", message}}},
                                 {"exit_code", exit_code}});
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace psyn
