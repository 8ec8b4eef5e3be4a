// psyn: private synthetic data on the Boolean cube.
//
// Exit codes
//   0  success
//   1  usage, parse, input or configuration error
//   2  conditioning failure (S never passed the gate)
//   3  solver or numeric error (non-convergence, indeterminate verdict,
//      rank-deficient design, integrity check)
//   4  audit found a bound violation
//   5  match found no witness

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "psyn/conditioning.hpp"
#include "psyn/error.hpp"
#include "psyn/eval.hpp"
#include "psyn/io.hpp"
#include "psyn/kernels.hpp"
#include "psyn/pipeline.hpp"
#include "psyn/privacy.hpp"
#include "psyn/report.hpp"
#include "psyn/rng.hpp"

namespace {

using namespace psyn;

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kConditioning = 2,
  kSolver = 3,
  kAuditViolation = 4,
  kNoWitness = 5,
};

struct Common {
  std::string report;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  bool has_seed() const { return seed_opt->count() > 0; }
};

struct SpaceFlags {
  std::size_t degree = 2;
  std::size_t m = 0;
  double delta = 0.05;
  double big_delta = 4.0;
  int max_attempts = 16;
};

void add_space_flags(CLI::App* app, SpaceFlags& f, bool need_m = true) {
  app->add_option("--degree,-d", f.degree, "Marginal degree d")->capture_default_str();
  auto* m = app->add_option("--m", f.m, "Size of the reduced space S");
  if (need_m) m->required();
  app->add_option("--delta", f.delta, "Accuracy parameter delta")->capture_default_str();
  app->add_option("--Delta", f.big_delta, "Upper density bound Delta")->capture_default_str();
  app->add_option("--max-attempts", f.max_attempts, "Redraws of S before giving up")->capture_default_str();
}

void add_common(CLI::App* app, Common& c, bool seed_required) {
  c.seed_opt = app->add_option("--seed", c.seed, "Seed for every random draw");
  if (seed_required) c.seed_opt->required();
  app->add_option("--report", c.report, "Write a JSON report to this path");
}

PipelineConfig make_config(std::size_t p, const SpaceFlags& f, std::uint64_t seed) {
  PipelineConfig cfg;
  cfg.p = p;
  cfg.d = f.degree;
  cfg.m = f.m;
  cfg.delta = f.delta;
  cfg.big_delta = f.big_delta;
  cfg.seed = seed;
  cfg.max_attempts = f.max_attempts;
  return cfg;
}

void write_report(const std::string& path, const Json& doc) {
  if (!path.empty()) write_file(path, dump(doc));
}

Json input_json(const std::string& path, const Dataset& x) {
  return {{"path", path}, {"n", x.size()}, {"p", x.dimension()}};
}

// ---- generate --------------------------------------------------------------

struct GenerateFlags {
  Common common;
  SpaceFlags space;
  std::string input, output, input_format = "auto", output_format = "csv";
  std::uint64_t k = 0;
  double epsilon = 0.0;
  CLI::Option* k_opt = nullptr;
  CLI::Option* eps_opt = nullptr;
  bool accuracy = false;
};

int run_generate(const GenerateFlags& f) {
  const BitTable in = ingest(f.input, parse_format(f.input_format));
  PipelineConfig cfg = make_config(in.rows.dimension(), f.space, f.common.seed);
  if (f.k_opt->count()) cfg.k = f.k;
  if (f.eps_opt->count()) cfg.epsilon = f.epsilon;
  const GenerateResult res = generate(in.rows, cfg);
  const FileFormat out_format = parse_format(f.output_format);
  emit(f.output, BitTable{in.header, res.synthetic}, out_format);

  Json body{{"config", to_json(cfg)},
            {"input", input_json(f.input, in.rows)},
            {"output", {{"path", f.output}, {"format", f.output_format}, {"k", res.synthetic.size()}}},
            {"run", to_json(res.report)}};
  const RunReport& r = res.report;
  std::printf("%-22s %zu x %zu\n", "input", in.rows.size(), in.rows.dimension());
  std::printf("%-22s m=%zu d=%zu C=%zu\n", "reduced space", cfg.m, cfg.d, count_low_degree(cfg.p, cfg.d));
  std::printf("%-22s sigma_min=%.6g threshold=%.6g attempts=%d\n", "conditioning", r.verdict.sigma_min,
              r.verdict.threshold, r.verdict.attempts);
  std::printf("%-22s %.3e\n", "lambda", r.lambda);
  std::printf("%-22s %.3e\n", "constraint residual", r.constraint_residual);
  std::printf("%-22s %llu\n", "k", static_cast<unsigned long long>(r.k_used));
  std::printf("%-22s %.6g\n", "epsilon guaranteed", r.epsilon_guaranteed);
  std::printf("%-22s %.6g\n", "eta", r.sensitivity_bound);
  if (f.accuracy && !res.synthetic.empty()) {
    const AccuracyReport acc = accuracy_report(in.rows, res.synthetic, cfg.d);
    body["accuracy"] = to_json(acc);
    std::printf("%-22s %.6g (mean %.6g over %zu queries)\n", "max marginal error", acc.max_error,
                acc.mean_error, acc.per_query.size());
  }
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  write_report(f.common.report, make_document("generate", std::move(body)));
  return kOk;
}

// ---- calibrate -------------------------------------------------------------

struct CalibrateFlags {
  Common common;
  std::size_t p = 0, degree = 2;
  CalibrationParams cal;
  double k_gamma = 0.1;
  std::size_t n = 0, m = 0;
  double epsilon = 0.0, big_delta = 4.0;
  std::uint64_t k = 0;
  CLI::Option *n_opt = nullptr, *m_opt = nullptr, *eps_opt = nullptr, *k_opt = nullptr;
};

int run_calibrate(const CalibrateFlags& f) {
  const std::uint64_t m = recommend_m(f.p, f.degree, f.cal);
  const std::uint64_t m_match = recommend_m_matching(f.p, f.degree, f.cal);
  const std::uint64_t k = recommend_k(f.p, f.degree, f.k_gamma, f.cal.delta);
  Json body{{"p", f.p},
            {"degree", f.degree},
            {"C", count_low_degree(f.p, f.degree)},
            {"gamma", f.cal.gamma},
            {"alpha", f.cal.alpha},
            {"kappa", f.cal.kappa},
            {"delta", f.cal.delta},
            {"k_gamma", f.k_gamma},
            {"m_conditioning", m},
            {"m_matching", m_match},
            {"k_accuracy", k}};
  std::printf("%-22s %zu\n", "C(p,<=d)", count_low_degree(f.p, f.degree));
  std::printf("%-22s %llu\n", "m (conditioning)", static_cast<unsigned long long>(m));
  std::printf("%-22s %llu\n", "m (exact matching)", static_cast<unsigned long long>(m_match));
  std::printf("%-22s %llu\n", "k (accuracy)", static_cast<unsigned long long>(k));

  if (f.n_opt->count()) {
    PipelineConfig cfg;
    cfg.p = f.p;
    cfg.d = f.degree;
    cfg.m = f.m_opt->count() ? f.m : static_cast<std::size_t>(m);
    cfg.delta = f.cal.delta;
    cfg.big_delta = f.big_delta;
    cfg.epsilon = f.eps_opt->count() ? f.epsilon : 1.0;
    cfg.validate();
    const double eta = sensitivity_bound(f.n, cfg.m, f.p, f.degree, cfg.delta, cfg.big_delta);
    body["privacy"] = {{"n", f.n}, {"m", cfg.m}, {"Delta", cfg.big_delta}, {"eta", eta}};
    std::printf("%-22s %.6g (n=%zu, m=%zu)\n", "eta", eta, f.n, cfg.m);
    if (f.eps_opt->count()) {
      const std::uint64_t ak = auto_k(cfg, f.n);
      body["privacy"]["epsilon"] = f.epsilon;
      body["privacy"]["auto_k"] = ak;
      std::printf("%-22s %llu (epsilon=%g)\n", "auto k", static_cast<unsigned long long>(ak), f.epsilon);
    }
    if (f.k_opt->count()) {
      const double eps = epsilon_for_k(f.k, f.n, cfg.m, f.p, f.degree, cfg.delta, cfg.big_delta);
      body["privacy"]["k"] = f.k;
      body["privacy"]["epsilon_for_k"] = eps;
      std::printf("%-22s %.6g (k=%llu)\n", "epsilon for k", eps, static_cast<unsigned long long>(f.k));
    }
  }
  write_report(f.common.report, make_document("calibrate", std::move(body)));
  return kOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateFlags {
  Common common;
  std::string input, synthetic, format = "auto";
  std::size_t degree = 2, max_queries = 1'000'000, l1_trials = 0;
};

int run_evaluate(const EvaluateFlags& f) {
  const Dataset x = ingest(f.input, parse_format(f.format)).rows;
  const Dataset y = ingest(f.synthetic, parse_format(f.format)).rows;
  const AccuracyReport acc = accuracy_report(x, y, f.degree, f.max_queries);
  Json body{{"input", input_json(f.input, x)},
            {"synthetic", input_json(f.synthetic, y)},
            {"accuracy", to_json(acc)}};
  std::printf("%-22s %zu\n", "queries", acc.per_query.size());
  std::printf("%-22s %.6g\n", "max error", acc.max_error);
  std::printf("%-22s %.6g\n", "mean error", acc.mean_error);
  if (f.l1_trials > 0) {
    if (!f.common.has_seed()) throw ConfigError("--l1-trials draws random directions and needs --seed");
    const L1Deviation dev = empirical_l1_deviation(y, f.degree, f.l1_trials, f.common.seed);
    body["l1_deviation"] = to_json(dev);
    body["seed"] = f.common.seed;
    std::printf("%-22s %.6g (envelope %.6g, %zu directions)\n", "L1 deviation", dev.max_deviation,
                dev.envelope, dev.trials);
  }
  write_report(f.common.report, make_document("evaluate", std::move(body)));
  return kOk;
}

// ---- audit -----------------------------------------------------------------

struct AuditFlags {
  Common common;
  SpaceFlags space;
  std::string input, neighbor, format = "auto";
  std::size_t pairs = 1;
  std::uint64_t k = 0;
  double epsilon = 1.0;
  CLI::Option* k_opt = nullptr;
};

int run_audit(const AuditFlags& f) {
  const Dataset x = ingest(f.input, parse_format(f.format)).rows;
  PipelineConfig cfg = make_config(x.dimension(), f.space, f.common.seed);
  cfg.epsilon = f.epsilon;
  cfg.validate();
  auto space = std::make_shared<const ReducedSpace>(
      draw_until_conditioned(cfg.p, cfg.m, cfg.d, cfg.seed, cfg.max_attempts));
  const std::uint64_t k = f.k_opt->count() ? f.k : auto_k(cfg, x.size());

  std::vector<NeighborPair> pairs;
  if (!f.neighbor.empty()) {
    pairs.push_back(NeighborPair::classify(x, ingest(f.neighbor, parse_format(f.format)).rows));
  } else {
    Rng rng(cfg.seed, stream::kAuditRecords);
    std::vector<Sign> extra(cfg.p);
    for (std::size_t i = 0; i < f.pairs; ++i) {
      for (auto& v : extra) v = static_cast<Sign>(rng.sign());
      pairs.push_back(NeighborPair::add_one(x, CubePoint(extra)));
    }
  }

  Json records = Json::array();
  std::size_t violations = 0;
  double worst_distance = 0.0, worst_ratio = 1.0;
  for (const auto& pair : pairs) {
    const AuditRecord rec = audit_sensitivity(pair, cfg, space, k, f.epsilon);
    violations += rec.violation ? 1 : 0;
    worst_distance = std::max(worst_distance, rec.sup_distance);
    worst_ratio = std::max(worst_ratio, rec.max_ratio);
    records.push_back(to_json(rec));
  }
  const double eta = sensitivity_bound(x.size(), cfg.m, cfg.p, cfg.d, cfg.delta, cfg.big_delta);
  Json body{{"config", to_json(cfg)},
            {"input", input_json(f.input, x)},
            {"conditioning", to_json(check_conditioning(*space))},
            {"k", k},
            {"records", records},
            {"violations", violations},
            {"max_sup_distance", worst_distance},
            {"max_ratio", worst_ratio},
            {"eta", eta}};
  if (!f.neighbor.empty()) body["neighbor"] = f.neighbor;
  std::printf("%-22s %zu (%s)\n", "pairs", pairs.size(),
              pairs.empty() ? "-" : to_string(pairs.front().relation()).c_str());
  std::printf("%-22s %.6g\n", "max sup distance", worst_distance);
  std::printf("%-22s %.6g\n", "eta", eta);
  std::printf("%-22s %.9g\n", "max ratio", worst_ratio);
  std::printf("%-22s %zu\n", "violations", violations);
  if (violations > 0) body["status"] = "violation";
  write_report(f.common.report, make_document("audit", std::move(body)));
  return violations > 0 ? kAuditViolation : kOk;
}

// ---- match -----------------------------------------------------------------

struct MatchFlags {
  Common common;
  SpaceFlags space;
  std::string input, slots, format = "auto";
};

int run_match(const MatchFlags& f) {
  const Dataset x = ingest(f.input, parse_format(f.format)).rows;
  std::shared_ptr<const ReducedSpace> space;
  if (!f.slots.empty()) {
    Dataset s = ingest(f.slots, parse_format(f.format)).rows;
    if (s.dimension() != x.dimension()) throw InputError("slots and input differ in dimension");
    space = std::make_shared<const ReducedSpace>(make_reduced_space(std::move(s), f.space.degree));
  } else {
    if (!f.common.has_seed()) throw ConfigError("drawing S needs --seed (or pass --slots)");
    if (f.space.m == 0) throw ConfigError("drawing S needs --m (or pass --slots)");
    if (f.space.degree > x.dimension()) throw ConfigError("degree exceeds the input dimension");
    validate_space_shape(x.dimension(), f.space.m, f.space.degree);
    space = std::make_shared<const ReducedSpace>(draw_until_conditioned(
        x.dimension(), f.space.m, f.space.degree, f.common.seed, f.space.max_attempts));
  }
  const MatchResult res = exact_match(x, space);
  Json body{{"input", input_json(f.input, x)},
            {"degree", f.space.degree},
            {"m", space->m()},
            {"match", to_json(res)}};
  if (f.slots.empty()) body["seed"] = f.common.seed;
  else body["slots"] = f.slots;
  if (res.outcome == MatchOutcome::kWitness) {
    std::printf("%-22s witness\n", "outcome");
    std::printf("%-22s %.3e\n", "residual", res.density.residual);
    std::printf("%-22s %.3e\n", "mass error", res.density.mass_error);
  } else {
    std::printf("%-22s no witness found\n", "outcome");
    std::printf("%-22s %s\n", "reason", res.reason.c_str());
    body["status"] = "no_witness";
  }
  write_report(f.common.report, make_document("match", std::move(body)));
  return res.outcome == MatchOutcome::kWitness ? kOk : kNoWitness;
}

void select_isa(const std::string& name) {
  using kernels::Isa;
  if (name == "auto") return;
  if (name == "scalar") kernels::set_active_isa(Isa::kScalar);
  else if (name == "avx2") kernels::set_active_isa(Isa::kAvx2);
  else if (name == "neon") kernels::set_active_isa(Isa::kNeon);
  else throw ConfigError("unknown --isa '" + name + "' (expected auto, scalar, avx2 or neon)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private synthetic data on the Boolean cube"};
  app.require_subcommand(1);
  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel variant: auto, scalar, avx2 or neon")->capture_default_str();

  GenerateFlags gen;
  auto* g = app.add_subcommand("generate", "Generate a private synthetic dataset");
  g->add_option("--input,-i", gen.input, "Input dataset (CSV or packed)")->required();
  g->add_option("--output,-o", gen.output, "Synthetic dataset path")->required();
  g->add_option("--input-format", gen.input_format, "auto, csv or packed")->capture_default_str();
  g->add_option("--output-format", gen.output_format, "csv or packed")->capture_default_str();
  add_space_flags(g, gen.space);
  gen.k_opt = g->add_option("--k", gen.k, "Number of synthetic records");
  gen.eps_opt = g->add_option("--epsilon", gen.epsilon, "Privacy budget; k is derived from it");
  gen.k_opt->excludes(gen.eps_opt);
  g->add_flag("--accuracy", gen.accuracy, "Also report marginal accuracy of the output");
  add_common(g, gen.common, true);

  CalibrateFlags cal;
  auto* c = app.add_subcommand("calibrate", "Recommend m and k from the guarantees");
  c->add_option("--p", cal.p, "Dimension")->required();
  c->add_option("--degree,-d", cal.degree, "Marginal degree d")->capture_default_str();
  c->add_option("--gamma", cal.cal.gamma, "Failure budget for the conditioning gate")->capture_default_str();
  c->add_option("--alpha", cal.cal.alpha, "Lower regularity for exact matching")->capture_default_str();
  c->add_option("--kappa", cal.cal.kappa, "Density ratio bound for exact matching")->capture_default_str();
  c->add_option("--delta", cal.cal.delta, "Accuracy parameter delta")->capture_default_str();
  c->add_option("--k-gamma", cal.k_gamma, "Failure budget for the accuracy bound")->capture_default_str();
  cal.n_opt = c->add_option("--n", cal.n, "Input size, for privacy figures");
  cal.m_opt = c->add_option("--m", cal.m, "Reduced space size (default: recommended m)");
  cal.eps_opt = c->add_option("--epsilon", cal.epsilon, "Privacy budget, reports auto k");
  cal.k_opt = c->add_option("--k", cal.k, "Synthetic size, reports its epsilon");
  c->add_option("--Delta", cal.big_delta, "Upper density bound Delta")->capture_default_str();
  add_common(c, cal.common, false);

  EvaluateFlags ev;
  auto* e = app.add_subcommand("evaluate", "Compare marginals of two datasets");
  e->add_option("--input,-i", ev.input, "True dataset")->required();
  e->add_option("--synthetic,-s", ev.synthetic, "Synthetic dataset")->required();
  e->add_option("--format", ev.format, "auto, csv or packed")->capture_default_str();
  e->add_option("--degree,-d", ev.degree, "Marginal degree d")->capture_default_str();
  e->add_option("--max-queries", ev.max_queries, "Refuse larger query sets")->capture_default_str();
  e->add_option("--l1-trials", ev.l1_trials, "Random directions for the L1 deviation estimate");
  add_common(e, ev.common, false);

  AuditFlags au;
  auto* a = app.add_subcommand("audit", "Check the density sensitivity bound on neighbouring inputs");
  a->add_option("--input,-i", au.input, "Dataset")->required();
  a->add_option("--neighbor", au.neighbor, "Neighbouring dataset (default: random add-one neighbours)");
  a->add_option("--pairs", au.pairs, "Random add-one neighbours to audit")->capture_default_str();
  a->add_option("--format", au.format, "auto, csv or packed")->capture_default_str();
  add_space_flags(a, au.space);
  au.k_opt = a->add_option("--k", au.k, "Synthetic size (default: derived from epsilon)");
  a->add_option("--epsilon", au.epsilon, "Privacy budget")->capture_default_str();
  add_common(a, au.common, true);

  MatchFlags ma;
  auto* mt = app.add_subcommand("match", "Find nonnegative weights on S matching all marginals");
  mt->add_option("--input,-i", ma.input, "Dataset")->required();
  mt->add_option("--slots", ma.slots, "Use these points as S instead of a random draw");
  mt->add_option("--format", ma.format, "auto, csv or packed")->capture_default_str();
  add_space_flags(mt, ma.space, false);
  add_common(mt, ma.common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  const std::string report = command == "generate"    ? gen.common.report
                             : command == "calibrate" ? cal.common.report
                             : command == "evaluate"  ? ev.common.report
                             : command == "audit"     ? au.common.report
                                                      : ma.common.report;

  auto fail = [&](const char* cls, const std::exception& ex, int code) {
    std::cerr << "error: " << ex.what() << "\n";
    try {
      write_report(report, error_document(command, cls, ex.what(), code));
    } catch (const std::exception&) {
    }
    return code;
  };

  try {
    select_isa(isa);
    if (command == "generate") return run_generate(gen);
    if (command == "calibrate") return run_calibrate(cal);
    if (command == "evaluate") return run_evaluate(ev);
    if (command == "audit") return run_audit(au);
    return run_match(ma);
  } catch (const ConditioningFailure& ex) {
    return fail("conditioning_failure", ex, kConditioning);
  } catch (const ParseError& ex) {
    return fail("parse_error", ex, kUsage);
  } catch (const InputError& ex) {
    return fail("input_error", ex, kUsage);
  } catch (const ConfigError& ex) {
    return fail("config_error", ex, kUsage);
  } catch (const IndeterminateError& ex) {
    return fail("indeterminate", ex, kSolver);
  } catch (const NumericError& ex) {
    return fail("numeric_error", ex, kSolver);
  } catch (const ConditioningViolation& ex) {
    return fail("conditioning_violation", ex, kSolver);
  } catch (const IntegrityError& ex) {
    return fail("integrity_error", ex, kSolver);
  } catch (const std::exception& ex) {
    return fail("internal_error", ex, kSolver);
  }
}
