// Copyright 2026 The pisched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pisched: command-line front end.
//
//   pisched simulate  --mechanism bounded-overload --dist exp:1 --n 64 --m 64
//   pisched verify    --lemma all
//   pisched ic-audit  --mechanism sieve --k 2 --n 5 --m 3
//   pisched bounds    --dist exp:1 --n 64 --m 64 --delta 0.5

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include "pisched/bounds.hpp"
#include "pisched/campaign.hpp"
#include "pisched/distribution.hpp"
#include "pisched/error.hpp"
#include "pisched/instance.hpp"
#include "pisched/mechanism.hpp"
#include "pisched/random.hpp"
#include "pisched/report.hpp"
#include "pisched/suite.hpp"

namespace {

using pisched::DistributionSpec;

struct CommonFlags {
  std::string mechanism = "minimum-work";
  double c = 7.0;
  std::optional<double> beta;
  std::optional<double> delta;
  std::optional<double> k;
  std::optional<std::string> tuning;
  std::string dist = "exp:1";
  int n = 16;
  int m = 16;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string reference = "none";
  std::string out;
  std::string format = "csv";
  bool paired = false;
  int threads = 0;
};

std::vector<DistributionSpec> parse_dist_list(const std::string& text) {
  std::vector<DistributionSpec> specs;
  std::size_t start = 0;
  while (true) {
    const auto at = text.find(';', start);
    specs.push_back(DistributionSpec::parse(text.substr(start, at - start)));
    if (at == std::string::npos) break;
    start = at + 1;
  }
  return specs;
}

void add_mechanism_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--mechanism", f.mechanism,
                  "minimum-work | bounded-overload | sieve | "
                  "sieve-bounded-overload");
  app->add_option("--c", f.c, "overload factor (> 1)");
  app->add_option("--beta", f.beta, "reserve; derived from --tuning if absent");
  app->add_option("--delta", f.delta, "partition share of the two-stage kind");
  app->add_option("--k", f.k, "sieve parameter of the lemma6 tuning");
  app->add_option("--tuning", f.tuning, "reserve tuning: thm2 | thm3 | lemma6");
}

void add_instance_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--dist", f.dist,
                  "job distribution; a ';'-separated list cycles over jobs");
  app->add_option("--n", f.n, "jobs");
  app->add_option("--m", f.m, "machines");
  app->add_option("--trials", f.trials, "sampled instances");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--threads", f.threads, "worker threads (0: all cores)");
}

pisched::ExperimentConfig make_config(const CommonFlags& f) {
  pisched::ExperimentConfig cfg;
  cfg.mechanism.kind = pisched::parse_mechanism(f.mechanism);
  cfg.mechanism.c = f.c;
  cfg.mechanism.beta = f.beta;
  cfg.mechanism.k = f.k;
  cfg.specs = parse_dist_list(f.dist);
  cfg.n = f.n;
  cfg.m = f.m;
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  cfg.reference = pisched::parse_reference(f.reference);
  cfg.paired = f.paired;
  cfg.threads = f.threads;
  if (f.tuning) {
    cfg.tuning = pisched::parse_tuning(*f.tuning);
  } else {
    cfg.tuning = cfg.mechanism.kind == pisched::MechanismKind::kSieve
                     ? pisched::ReserveTuning::kLemma6
                     : pisched::ReserveTuning::kTheorem2;
  }
  if (f.delta) {
    cfg.mechanism.delta = *f.delta;
  } else if (cfg.tuning == pisched::ReserveTuning::kTheorem3) {
    cfg.mechanism.delta = pisched::large_load_delta(f.m);
  }
  return cfg;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    pisched::write_file(path, content);
  }
}

int run_simulate(const CommonFlags& f) {
  const auto report = pisched::run_campaign(make_config(f));
  emit(f.out, pisched::emit_report(report, pisched::parse_format(f.format)));
  std::fprintf(stderr, "mean makespan %.6g +- %.3g over %zu trials\n",
               report.mean_makespan, report.makespan_se, report.rows.size());
  if (report.ratio) {
    std::fprintf(stderr, "ratio to %s: %.6g +- %.3g\n",
                 pisched::to_string(report.config.reference).c_str(),
                 *report.ratio, report.ratio_se.value_or(0.0));
  }
  if (report.reserve && !report.reserve->warning.empty()) {
    std::fprintf(stderr, "warning: %s\n", report.reserve->warning.c_str());
  }
  for (const auto& failure : report.invariant_failures) {
    std::fprintf(stderr, "invariant failure: %s\n", failure.c_str());
  }
  return report.invariant_failures.empty() ? 0 : 1;
}

int run_verify(const std::string& lemma, const CommonFlags& f) {
  const auto suite = pisched::lemma_suite(f.trials);
  const auto records = pisched::run_suite(suite, lemma, f.seed, f.threads);
  nlohmann::json doc = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : records) {
    const bool pass = r.at("pass").get<bool>();
    ok = ok && pass;
    std::fprintf(stderr, "[%s] %s %s\n", pass ? "PASS" : "FAIL",
                 r.at("lemma-id").get<std::string>().c_str(),
                 r.at("parameters").dump().c_str());
    doc.push_back(r);
  }
  emit(f.out, doc.dump(2) + "\n");
  return ok ? 0 : 1;
}

int run_ic_audit(const CommonFlags& f) {
  auto cfg = make_config(f);
  pisched::resolve_reserve(cfg);
  cfg.validate();
  const auto jobs = cfg.job_specs();
  int violations = 0;
  int audited = 0;
  int skipped = 0;
  nlohmann::json found = nlohmann::json::array();
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    pisched::Rng rng(pisched::derive_seed(cfg.seed, 0, t));
    const auto inst = pisched::sample_instance(jobs, cfg.m, rng);
    for (int i = 0; i < inst.m(); ++i) {
      const auto result = pisched::ic_audit(cfg.mechanism, inst, i);
      audited += result.misreports;
      skipped += result.skipped;
      for (const auto& v : result.violations) {
        ++violations;
        found.push_back({{"trial", t}, {"machine", i}, {"report", v.label},
                         {"gain", v.gain}});
      }
    }
  }
  const nlohmann::json doc = {{"mechanism", pisched::to_string(cfg.mechanism.kind)},
                              {"instances", cfg.trials},
                              {"reports", audited},
                              {"skipped", skipped},
                              {"violations", found}};
  emit(f.out, doc.dump(2) + "\n");
  std::fprintf(stderr, "%d reports audited, %d skipped, %d violations\n",
               audited, skipped, violations);
  return violations == 0 ? 0 : 1;
}

int run_bounds(const CommonFlags& f) {
  const auto specs = parse_dist_list(f.dist);
  std::vector<DistributionSpec> jobs;
  for (int j = 0; j < f.n; ++j) jobs.push_back(specs[j % specs.size()]);
  pisched::Rng rng(pisched::derive_seed(f.seed, 1, 0));
  const double delta = f.delta.value_or(1.0);
  const auto ref = pisched::opt_reference_detail(jobs, f.m, delta, f.trials, rng);
  auto est = [](const pisched::OptEstimate& e) {
    return nlohmann::json{{"kind", pisched::to_string(e.kind)},
                          {"machines", e.machines_used},
                          {"mean", e.mean},
                          {"std_error", e.std_error},
                          {"trials", e.trials}};
  };
  const nlohmann::json doc = {{"dist", f.dist},
                              {"n", f.n},
                              {"m", f.m},
                              {"delta", delta},
                              {"worst_best", est(ref.worst_best)},
                              {"average_best", est(ref.average_best)},
                              {"combined", est(ref.combined)}};
  emit(f.out, doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truthful scheduling mechanisms on unrelated machines"};
  app.require_subcommand(1);
  CommonFlags f;
  std::string lemma = "all";
  std::size_t verify_trials = 100000;

  auto* simulate = app.add_subcommand("simulate", "run a simulation campaign");
  add_mechanism_flags(simulate, f);
  add_instance_flags(simulate, f);
  simulate->add_option("--reference", f.reference,
                       "opt-half | opt-third | opt-delta-half | none");
  simulate->add_option("--out", f.out, "report path (stdout if absent)");
  simulate->add_option("--format", f.format, "csv | json");
  simulate->add_flag("--paired", f.paired,
                     "reference bounds from the campaign's own instances");

  auto* verify = app.add_subcommand("verify", "run the lemma suite");
  verify->add_option("--lemma", lemma, "all or one check id");
  verify->add_option("--trials", verify_trials, "samples per check");
  verify->add_option("--seed", f.seed, "master seed");
  verify->add_option("--threads", f.threads, "worker threads (0: all cores)");
  verify->add_option("--out", f.out, "JSON path (stdout if absent)");

  auto* audit = app.add_subcommand("ic-audit", "search misreports for gains");
  add_mechanism_flags(audit, f);
  add_instance_flags(audit, f);
  audit->add_option("--out", f.out, "JSON path (stdout if absent)");

  auto* bounds = app.add_subcommand("bounds", "estimate the optimum's bounds");
  add_instance_flags(bounds, f);
  bounds->add_option("--delta", f.delta, "machine share (default 1)");
  bounds->add_option("--out", f.out, "JSON path (stdout if absent)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_simulate(f);
    if (*verify) {
      f.trials = verify_trials;
      return run_verify(lemma, f);
    }
    if (*audit) return run_ic_audit(f);
    if (*bounds) return run_bounds(f);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
