#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evidx/corpus.hpp"
#include "evidx/error.hpp"
#include "evidx/gold_json.hpp"
#include "evidx/oracle.hpp"
#include "evidx/pipeline.hpp"

namespace fs = std::filesystem;
using namespace evidx;

namespace {

struct Options {
  std::vector<std::string> corpora;
  std::string gold;
  std::vector<std::string> queries;
  std::string regime = "both";
  std::string backend = "mock";
  std::string cache;
  std::vector<std::string> models;
  std::string judge_model;
  std::string out = "out";
  std::size_t parallel = 1;
  std::string format = "md";
  std::string instructions = "v1";
};

RunConfig to_config(const Options& o) {
  RunConfig c;
  for (const auto& p : o.corpora) c.corpus_dirs.emplace_back(p);
  if (!o.gold.empty()) c.gold = fs::path(o.gold);
  c.queries = o.queries;
  if (o.regime == "both") c.regimes = {Regime::kPerPaper, Regime::kGlobal};
  else c.regimes = {*regime_from_name(o.regime)};
  c.backend = *backend_from_name(o.backend);
  if (!o.cache.empty()) c.cache_dir = fs::path(o.cache);
  if (!o.models.empty()) c.models = o.models;
  c.judge_model = o.judge_model;
  c.out = o.out;
  c.parallel = o.parallel;
  c.instructions = o.instructions;
  return c;
}

int validate(const Options& o) {
  std::vector<std::pair<std::string, std::vector<GoldRecord>>> sets;
  if (!o.gold.empty()) {
    sets.emplace_back(o.gold, load_gold_file(o.gold).documents);
  } else {
    if (o.corpora.empty()) throw InputError("validate needs --gold or --corpus");
    for (const auto& dir : o.corpora) {
      const fs::path file = fs::path(dir) / "gold.json";
      sets.emplace_back(file.string(), load_gold_file(file).documents);
    }
  }
  std::size_t errors = 0;
  for (const auto& [name, records] : sets) {
    ValidationReport report = validate_gold_set(records);
    for (const auto& v : report.violations) {
      std::cout << (v.severity == Violation::Severity::kError ? "error " : "warning ") << name << ": " << v.path
                << ": " << v.message << "\n";
    }
    std::cout << name << ": " << records.size() << " records, " << report.error_count() << " errors, "
              << report.warning_count() << " warnings\n";
    errors += report.error_count();
  }
  return errors == 0 ? 0 : static_cast<int>(ExitCode::kDomainViolation);
}

std::string stats_markdown(const StatsTable& t) {
  std::string out = "## " + t.domain + " (" + std::to_string(t.papers) + " papers)\n\n";
  out += "| Metric | Documents | Min | Median | Max | Total |\n|---|---|---|---|---|---|\n";
  for (const auto& r : t.rows) {
    out += "| " + r.metric + " | " + std::to_string(r.documents) + " | " + r.min.to_string() + " | " +
           r.median.to_string() + " | " + r.max.to_string() + " | " + r.total.to_string() + " |\n";
  }
  for (const auto& n : t.notes) out += "\n" + n + "\n";
  return out;
}

int stats(const Options& o) {
  const RunConfig config = to_config(o);
  nlohmann::json all = nlohmann::json::array();
  for (const auto& corpus : load_corpora(config)) {
    StatsTable t = descriptive_stats(corpus->gold, corpus->domain);
    if (o.format == "csv") std::cout << stats_to_csv(t);
    else if (o.format == "json") all.push_back(stats_to_json(t));
    else std::cout << stats_markdown(t) << "\n";
  }
  if (o.format == "json") std::cout << all.dump(2) << "\n";
  return 0;
}

int run(const Options& o) {
  RunSummary s = cmd_run(to_config(o));
  std::cout << format_summary(s);
  return s.failed_cells == 0 ? 0 : static_cast<int>(ExitCode::kBackendError);
}

int score(const Options& o) {
  ScoreSummary s = cmd_score(to_config(o));
  std::cout << "scored: " << s.scored << "\nmissing predictions: " << s.missing_predictions
            << "\njudge calls: " << s.judge_calls << "\n";
  return 0;
}

int analyze(const Options& o) {
  TaxonomyReport r = cmd_analyze(to_config(o));
  if (o.format == "json") std::cout << to_json(r).dump(2) << "\n";
  else std::cout << taxonomy_markdown(r);
  return 0;
}

int report(const Options& o) {
  ReportBundle b = cmd_report(to_config(o));
  if (o.format == "csv") std::cout << b.per_query_csv;
  else if (o.format == "json") std::cout << b.rollup.dump(2) << "\n";
  else std::cout << b.markdown;
  return 0;
}

int oracle(const Options& o) {
  const RunConfig config = to_config(o);
  cmd_oracle(config);
  for (const auto& corpus : load_corpora(config)) {
    std::cout << corpus->domain << ": " << (domain_dir(config.out, corpus->domain) / "oracle.json").string() << "\n";
  }
  return 0;
}

int pipeline(const Options& o) {
  int rc = run(o);
  if (rc != 0) return rc;
  score(o);
  cmd_analyze(to_config(o));
  return report(o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidence-extraction evaluation harness"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags win");
  app.require_subcommand(1);
  Options o;

  app.add_option("--corpus", o.corpora, "Domain directory with docs/*.md and gold.json (repeatable)");
  app.add_option("--gold", o.gold, "Gold file (validate), or replacement gold for a single corpus");
  app.add_option("--queries", o.queries, "Query ids, comma separated (default: all)")->delimiter(',');
  app.add_option("--regime", o.regime, "per-paper, global or both")
      ->check(CLI::IsMember({"per-paper", "global", "both"}));
  app.add_option("--backend", o.backend, "live, replay or mock")->check(CLI::IsMember({"live", "replay", "mock"}));
  app.add_option("--cache", o.cache, "Completion cache directory");
  app.add_option("--model", o.models, "Model name (repeatable)");
  app.add_option("--judge-model", o.judge_model, "Model used for equivalence checks (default: first model)");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--parallel", o.parallel, "Concurrent cells during run")->check(CLI::Range(1, 256));
  app.add_option("--format", o.format, "Console output format")->check(CLI::IsMember({"md", "csv", "json"}));
  app.add_option("--instructions", o.instructions, "Instruction header version");

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const std::vector<Command> commands{
      {"validate", "Check gold annotations against the schema", validate},
      {"stats", "Descriptive corpus statistics", stats},
      {"oracle", "Write derived-query ground truth", oracle},
      {"run", "Execute query cells and write prediction files", run},
      {"score", "Score prediction files", score},
      {"analyze", "Error taxonomy over score files", analyze},
      {"report", "Rollup tables and regime deltas", report},
      {"pipeline", "run, score, analyze and report", pipeline},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    sub->callback([&selected, fn = c.fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::kInputError);
  }

  try {
    return selected(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  }
}
