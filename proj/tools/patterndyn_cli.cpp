// patterndyn: generate data, train, verify and sweep from a JSON config.
//
//   patterndyn gen    [--config f] [--seed s] [--out dir]
//   patterndyn train  [--config f] [--seed s] [--out dir] [--emit-svg]
//   patterndyn verify --theorem id [--config f] [--seed s] [--out dir]
//   patterndyn sweep  [--theorem id] [--config f] [--seed s] [--seeds n] [--out dir]
//
// Exit codes: 0 success, 1 config or verification failure, 2 I/O failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "patterndyn/analysis.hpp"
#include "patterndyn/config.hpp"
#include "patterndyn/csv_io.hpp"
#include "patterndyn/svg.hpp"
#include "patterndyn/verify.hpp"

namespace fs = std::filesystem;
using namespace patterndyn;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string theorem;
  std::optional<std::size_t> seeds;
  bool emit_svg = false;
};

ExperimentConfig resolve(const Flags& f, std::string_view theorem) {
  std::optional<fs::path> path;
  if (!f.config.empty()) path = f.config;
  ExperimentConfig c = load_config(path, theorem);
  if (f.seed) c.training.seed = *f.seed;
  if (!f.out.empty()) c.output.dir = f.out;
  if (f.seeds) {
    require(*f.seeds >= 1, ErrorCode::invalid_config, "--seeds must be at least 1");
    c.analysis.n_seeds = *f.seeds;
  }
  if (f.emit_svg) c.output.emit_svg = true;
  return c;
}

int cmd_gen(const Flags& f) {
  const ExperimentConfig c = resolve(f, "");
  const std::uint64_t seed = c.training.seed;
  const DistSpec spec = build_spec(c, seed);
  Rng rng = Rng(seed).substream(stream::dataset);
  const Dataset data = empirical_dataset(spec, c.distribution.n_samples, rng);

  std::size_t valid = 0;
  std::string first_reason;
  for (const auto& s : data.samples) {
    const SupportCheck chk = validate_sample(s, spec);
    if (chk.ok) ++valid;
    else if (first_reason.empty()) first_reason = chk.reason;
  }
  std::ostringstream csv;
  write_dataset_csv(csv, data);
  const fs::path out = fs::path(c.output.dir) / "dataset.csv";
  write_file(out, csv.str());
  std::cout << "wrote " << data.samples.size() << " samples to " << out.string() << "\n";
  std::cout << "support check: " << valid << "/" << data.samples.size() << " valid"
            << (first_reason.empty() ? "" : " (first failure: " + first_reason + ")") << "\n";
  return valid == data.samples.size() ? 0 : 1;
}

int cmd_train(const Flags& f) {
  const ExperimentConfig c = resolve(f, "");
  const TrainConfig tc = build_train_config(c, c.training.seed);
  const TrainResult res = run_training(tc);
  const fs::path dir = c.output.dir;

  std::ostringstream traj, bank;
  write_trajectory_csv(traj, res.records);
  write_bank_csv(bank, res.final_bank);
  write_file(dir / "trajectory.csv", traj.str());
  write_file(dir / "bank.csv", bank.str());
  if (c.output.emit_svg) {
    write_file(dir / "norms.svg", norms_svg(res.records));
    write_file(dir / "sin_theta.svg", sin_theta_svg(res.records));
  }
  std::cout << "trained " << tc.h << " filters for " << tc.steps << " steps; " << res.records.size()
            << " records in " << (dir / "trajectory.csv").string() << "\n";
  return 0;
}

int cmd_verify(const Flags& f) {
  require(!f.theorem.empty(), ErrorCode::invalid_config, "verify needs --theorem");
  const ExperimentConfig c = resolve(f, f.theorem);
  const TheoremReport report = run_check(f.theorem, c);
  const fs::path out = fs::path(c.output.dir) / (f.theorem + ".json");
  write_file(out, report.to_json());
  std::cout << f.theorem << ": " << (report.pass ? "PASS" : "FAIL") << " (" << out.string() << ")\n";
  return report.pass ? 0 : 1;
}

int cmd_sweep(const Flags& f) {
  const ExperimentConfig c = resolve(f, f.theorem);
  const TrainConfig base = build_train_config(c, c.training.seed);
  auto rebuild = [&c](std::uint64_t seed) { return build_sampler(c, build_spec(c, seed), seed); };
  SweepResult sweep = success_probability_sweep(base, c.analysis.n_seeds, AccuracyOne{c.analysis.n_test},
                                                c.analysis.success_fraction, rebuild);
  sweep.report.theorem_id = f.theorem.empty() ? "sweep" : "sweep_" + f.theorem;
  sweep.report.config_digest = config_digest(c);

  const fs::path dir = c.output.dir;
  for (std::size_t i = 0; i < sweep.seeds.size(); ++i) {
    std::ostringstream csv;
    const TrajectoryRecord rec = sweep.seeds[i].final_record;
    write_trajectory_csv(csv, std::span<const TrajectoryRecord>(&rec, 1));
    write_file(dir / ("seed_" + std::to_string(i) + ".csv"), csv.str());
  }
  write_file(dir / "sweep.json", sweep.report.to_json());
  std::cout << sweep.report.theorem_id << ": success fraction "
            << format_double(sweep.report.statistics.at("success_fraction")) << " over " << sweep.seeds.size()
            << " seeds, " << (sweep.report.pass ? "PASS" : "FAIL") << "\n";
  return sweep.report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patterndyn: SGD dynamics of a two-layer conv net on planted-pattern data"};
  app.require_subcommand(1);
  Flags flags;

  auto common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON config (merged onto the defaults)");
    sub->add_option("--seed", flags.seed, "master seed (overrides training.seed)");
    sub->add_option("--out", flags.out, "output directory (overrides output.dir)");
  };
  auto* gen = app.add_subcommand("gen", "generate a dataset");
  common(gen);
  auto* train = app.add_subcommand("train", "run one training and write its trajectory");
  common(train);
  train->add_flag("--emit-svg", flags.emit_svg, "also write norm and sin theta plots");
  auto* verify = app.add_subcommand("verify", "run one theorem check");
  common(verify);
  verify->add_option("--theorem", flags.theorem, "check id")->required();
  auto* sweep = app.add_subcommand("sweep", "multi-seed success probability");
  common(sweep);
  sweep->add_option("--theorem", flags.theorem, "check id whose defaults to start from");
  sweep->add_option("--seeds", flags.seeds, "number of seeds (overrides analysis.n_seeds)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_gen(flags);
    if (*train) return cmd_train(flags);
    if (*verify) return cmd_verify(flags);
    if (*sweep) return cmd_sweep(flags);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::io ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
