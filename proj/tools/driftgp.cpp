#include <iostream>

#include "CLI11.hpp"
#include "driftgp/commands.hpp"
#include "driftgp/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ocean-current estimation from dead-reckoning drift"};
  app.require_subcommand(1);

  std::string config, out, cycles, hyper, kernel = "incompressible";
  std::uint64_t seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Simulate a mission and write its cycle log");
  simulate->add_option("--config", config, "Key-value configuration file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Mission seed")->required();
  simulate->add_option("--out", out, "Output JSON Lines path")->required();

  auto* estimate = app.add_subcommand("estimate", "Estimate the current field from a cycle log");
  estimate->add_option("--cycles", cycles, "Cycle log (JSON Lines)")->required()->check(CLI::ExistingFile);
  estimate->add_option("--hyper", hyper, "Key-value configuration file")->required()->check(CLI::ExistingFile);
  estimate->add_option("--kernel", kernel, "incompressible|standard")
      ->check(CLI::IsMember({"incompressible", "standard"}));
  estimate->add_option("--out", out, "Output directory")->required();

  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo convergence study");
  mc->add_option("--config", config, "Key-value configuration file")->required()->check(CLI::ExistingFile);
  mc->add_option("--out", out, "Output directory")->required();

  driftgp::KernelCheckOptions kc;
  auto* check = app.add_subcommand("kernel-check", "Print kernel consistency report as JSON");
  check->add_option("--lengthscale", kc.hp.lengthscale, "Lengthscale (m)");
  check->add_option("--variance", kc.hp.current_variance, "Current self-variance (m^2/s^2)");
  check->add_option("--points", kc.points, "Points in the PSD sample");
  check->add_option("--lags", kc.lags, "Random lags in the finite-difference check");
  check->add_option("--seed", kc.seed, "Sampling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      driftgp::run_simulate(config, seed, out);
    } else if (*estimate) {
      driftgp::run_estimate(cycles, hyper, driftgp::parse_kernel_kind(kernel), out);
    } else if (*mc) {
      driftgp::run_montecarlo(config, out, std::cerr);
    } else if (*check) {
      std::cout << driftgp::kernel_check_json(kc) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
