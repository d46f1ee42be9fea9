#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "driftgp/kernels.hpp"

namespace driftgp {

/// `simulate`: runs one mission and writes its cycle log (JSON Lines).
void run_simulate(const std::filesystem::path& config, std::uint64_t seed,
                  const std::filesystem::path& out);

/// `estimate`: GP-EM over a cycle log; writes diagnostics.json, model.json and
/// field.csv into out_dir.
void run_estimate(const std::filesystem::path& cycles, const std::filesystem::path& hyper,
                  KernelKind kind, const std::filesystem::path& out_dir);

/// `montecarlo`: convergence study; writes convergence.csv and summary.json.
void run_montecarlo(const std::filesystem::path& config, const std::filesystem::path& out_dir,
                    std::ostream& log);

struct KernelCheckOptions {
  HyperParams hp;
  std::size_t points = 40;     // PSD sample size
  std::size_t lags = 100;      // FD sample size
  std::uint64_t seed = 7;
};

/// `kernel-check`: zero-lag matrix, PSD minimum eigenvalue and finite-difference
/// consistency of the incompressible kernel, as JSON.
std::string kernel_check_json(const KernelCheckOptions& opts);

}  // namespace driftgp
