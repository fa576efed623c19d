#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <algorithm>

#include "forcinglab/runner.hpp"

using namespace forcinglab;

namespace {

constexpr int kUsage = 2;

int emit(const RunConfig& cfg, const RunResult& r, const std::string& out) {
  std::ofstream os(out, std::ios::binary);
  if (!os) {
    std::cerr << "cannot write " << out << "\n";
    return kUsage;
  }
  write_report(os, cfg, r);
  os.close();
  if (!os) {
    std::cerr << "write failed: " << out << "\n";
    return kUsage;
  }
  std::cout << summary_table(r);
  for (const auto& rec : r.records) {
    if (!rec.outcome.ok()) std::cout << "counterexample " << rec.id() << "\n";
  }
  std::cout << "report: " << out << "\n";
  return r.exit_status();
}

int do_replay(const std::string& id, const std::string& report, const std::string& out) {
  std::ifstream is(report);
  if (!is) {
    std::cerr << "cannot read report " << report << "\n";
    return kUsage;
  }
  std::vector<std::string> ids;
  RunConfig cfg = read_report_config(is, &ids);
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    std::cerr << "error: id not found in " << report << ": " << id << "\n";
    return kUsage;
  }
  return emit(cfg, replay(cfg, id), out);
}

// "key = value" lines, '#' comments; each key names a run flag.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read config " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  std::size_t n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    s = s.substr(b, e - b + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
  };
  while (std::getline(is, line)) {
    ++n;
    line = line.substr(0, line.find('#'));
    if (trim(line).empty() || trim(line).front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(path + ":" + std::to_string(n) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    kv.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forcinglab: finite experiments on iterated forcing quotients"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string replay_id, report = cfg.out;
  auto* run = app.add_subcommand("run", "run verification suites over the generated instances");
  std::string config_path;
  run->add_option("--config", config_path, "key = value file mirroring the flags; flags given on the command line win");
  run->add_option("--suite", cfg.suite, "lemma1 | theorem2 | projection-lemmas | theorem16 | corollary15 | cifs | all")
      ->capture_default_str();
  run->add_option("--max-poset", cfg.max_poset, "elements of a step poset")->capture_default_str();
  run->add_option("--max-stages", cfg.max_stages, "iteration length")->capture_default_str();
  run->add_option("--max-rank", cfg.max_rank, "name rank")->capture_default_str();
  run->add_option("--cap", cfg.cap, "largest complete name universe")->capture_default_str();
  run->add_option("--sample", cfg.sample, "names sampled when a universe is too large")->capture_default_str();
  run->add_option("--max-pairs", cfg.max_pairs, "name pairs checked before sampling")->capture_default_str();
  run->add_option("--max-stage-size", cfg.max_stage_size, "conditions per iteration stage")->capture_default_str();
  run->add_option("--seed", cfg.seed)->capture_default_str();
  run->add_option("--workers", cfg.workers, "0 = one per hardware thread")->capture_default_str();
  run->add_option("--out", cfg.out, "report path (JSON lines)")->capture_default_str();
  run->add_option("--replay", replay_id, "rerun one counterexample of the report named by --out");

  std::string id, out = "forcinglab-replay.jsonl";
  auto* rep = app.add_subcommand("replay", "rerun the instance of one counterexample");
  rep->add_option("id", id, "counterexample id from a report")->required();
  rep->add_option("--report", report, "report of the run that found it")->capture_default_str();
  rep->add_option("--out", out, "replay report path")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (!config_path.empty()) {
      std::vector<std::string> args(argv + 1, argv + argc);
      for (const auto& [key, value] : read_config(config_path)) {
        const CLI::Option* opt = run->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config") {
          std::cerr << "error: unknown config key " << key << "\n";
          return kUsage;
        }
        if (opt->count() == 0) {
          args.push_back("--" + key);
          args.push_back(value);
        }
      }
      std::reverse(args.begin(), args.end());
      app.parse(args);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*rep) return do_replay(id, report, out);
    if (!replay_id.empty()) return do_replay(replay_id, cfg.out, out);
    cfg.validate();
    return emit(cfg, run_suites(cfg), cfg.out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
