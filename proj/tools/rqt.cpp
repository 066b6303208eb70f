// rqt: trajectory, node and residual datasets for a relativistic particle in
// constant and linear potentials.
//
// Exit codes: 0 success, 1 a reported check failed, 2 bad usage or config,
// 3 numerical failure.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rqt/cli/commands.hpp"

namespace {

struct Flags {
  std::string config, out, dt, samples, ab, hbar_scale, method, step;
  std::vector<std::string> set;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "key = value config file");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--dt", f.dt, "time step in s");
  app->add_option("--samples", f.samples, "sample count");
  app->add_option("--ab", f.ab, "trajectory family as \"a,b;a,b\"");
  app->add_option("--hbar-scale", f.hbar_scale, "epsilon in (0, 1]");
  app->add_option("--method", f.method, "Klein-Gordon stepper: euler or rk4");
  app->add_option("--step", f.step, "Klein-Gordon step in fm");
  app->add_option("--set", f.set, "extra key=value config entries");
}

rqt::cli::RunConfig build_config(const Flags& f) {
  using rqt::cli::apply_key;
  rqt::cli::RunConfig cfg;
  if (!f.config.empty()) cfg = rqt::cli::load_config(f.config);
  // Command-line values override the file.
  for (const auto& kv : f.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw rqt::ConfigError("--set expects key=value, got '" + kv + "'");
    apply_key(cfg, rqt::cli::detail::trim(kv.substr(0, eq)), rqt::cli::detail::trim(kv.substr(eq + 1)));
  }
  if (!f.out.empty()) apply_key(cfg, "out", f.out);
  if (!f.dt.empty()) apply_key(cfg, "dt_s", f.dt);
  if (!f.samples.empty()) apply_key(cfg, "samples", f.samples);
  if (!f.ab.empty()) apply_key(cfg, "ab_list", f.ab);
  if (!f.hbar_scale.empty()) cfg.hbar_scale = rqt::cli::parse_epsilon("hbar_scale", f.hbar_scale);
  if (!f.method.empty()) apply_key(cfg, "method", f.method);
  if (!f.step.empty()) apply_key(cfg, "step_fm", f.step);
  if (!f.hbar_scale.empty()) cfg.echo["hbar_scale"] = f.hbar_scale;
  rqt::cli::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rqt"};
  app.require_subcommand(1);
  Flags flags;
  int figure_id = 0;

  auto* fig = app.add_subcommand("figure", "datasets for figure 1-4");
  fig->add_option("id", figure_id, "figure number")->required();
  add_common(fig, flags);
  struct Named {
    const char* name;
    const char* help;
    int (*run)(const rqt::cli::RunConfig&, std::ostream&);
  };
  const std::vector<Named> plain{
      {"report", "node and momentum summary with checks", rqt::cli::cmd_report},
      {"residuals", "RQSHJE, trajectory-equation and velocity residuals", rqt::cli::cmd_residuals},
      {"trajectory", "trajectory CSVs", rqt::cli::cmd_trajectory},
      {"nodes", "node table", rqt::cli::cmd_nodes},
      {"kg-solve", "numeric Klein-Gordon basis", rqt::cli::cmd_kg_solve},
      {"classical-limit", "deviation versus hbar scale", rqt::cli::cmd_classical_limit},
  };
  std::vector<CLI::App*> subs;
  for (const auto& n : plain) {
    subs.push_back(app.add_subcommand(n.name, n.help));
    add_common(subs.back(), flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const rqt::cli::RunConfig cfg = build_config(flags);
    if (*fig) return rqt::cli::cmd_figure(figure_id, cfg, std::cout);
    for (std::size_t i = 0; i < plain.size(); ++i)
      if (*subs[i]) return plain[i].run(cfg, std::cout);
  } catch (const rqt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rqt::PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const rqt::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
