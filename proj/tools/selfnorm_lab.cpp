#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "selfnorm/cli_runner.hpp"

namespace {

using namespace selfnorm;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string suite;
};

void add_common(CLI::App* cmd, Flags& f, bool needs_config) {
  auto* c = cmd->add_option("--config", f.config, "configuration file (key = value)");
  if (needs_config) c->required();
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
  cmd->add_option("--threads", f.threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
}

int run(const std::string& command, const Flags& f) {
  RunOptions opt;
  opt.threads = static_cast<int>(resolve_threads(f.threads));
  if (command == "reproduce") {
    SuiteOptions so;
    if (f.seed) so.seed = *f.seed;
    so.threads = opt.threads;
    so.out_dir = f.out.empty() ? std::string("results") : f.out;
    const auto result = run_reproduce(f.suite, so);
    for (const auto& c : result.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << "criterion " << c.criterion << "  " << c.name << " = "
                << fmt17(c.value) << "\n";
    }
    if (!result.pass()) {
      for (const auto& c : result.checks) {
        if (!c.pass) std::cerr << "failed: criterion " << c.criterion << " (" << c.name << ")\n";
      }
      return kExitFail;
    }
    return kExitOk;
  }
  const auto raw = FlatConfig::load(f.config);
  const auto e = load_experiment(raw, f.seed, f.out.empty() ? std::nullopt : std::optional<std::string>(f.out));
  if (command == "simulate") return run_simulate(e, opt);
  if (command == "limit") return run_limit(e, opt);
  if (command == "diagnose") return run_diagnose(e, opt);
  return run_levy(e, opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"selfnorm_lab: randomly weighted and self-normalized sums"};
  app.require_subcommand(1);
  Flags f;
  for (const char* name : {"simulate", "limit", "diagnose", "levy"}) {
    add_common(app.add_subcommand(name, std::string("run the ") + name + " command"), f, true);
  }
  auto* rep = app.add_subcommand("reproduce", "run an acceptance suite (S1..S6)");
  add_common(rep, f, false);
  rep->add_option("--suite", f.suite, "suite id")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, f);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const parameter_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
