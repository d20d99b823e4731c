#pragma once

#include <filesystem>
#include <vector>

#include "greenlab/config.hpp"
#include "greenlab/report.hpp"

namespace greenlab {

/// Grid used by single-domain experiments in dimension `dim`.
BoxGrid experiment_grid(const ExperimentConfig& cfg, int dim);

std::vector<CheckRecord> run_solve(const ExperimentConfig& cfg);
std::vector<CheckRecord> run_decay(const ExperimentConfig& cfg);
std::vector<CheckRecord> run_lorentz(const ExperimentConfig& cfg);
std::vector<CheckRecord> run_lift(const ExperimentConfig& cfg);
std::vector<CheckRecord> run_monotone(const ExperimentConfig& cfg);
std::vector<CheckRecord> run_adjoint(const ExperimentConfig& cfg);
std::vector<CheckRecord> run_uniform(const ExperimentConfig& cfg);
std::vector<CheckRecord> run_experiment(Experiment e, const ExperimentConfig& cfg);

/// Coercivity and periodicity of every configured field.
std::vector<CheckRecord> field_info(const ExperimentConfig& cfg);

/// Runs the selected experiments in order and fills config and runtime
/// metadata. Configuration errors propagate; solver breakdowns become
/// failed checks.
VerificationReport run(const ExperimentConfig& cfg);

/// Writes one CSV per (dimension, field) for each configured quantity and
/// returns a report listing the files.
VerificationReport dump(const ExperimentConfig& cfg);

/// 0 when every check passes, 1 otherwise.
int exit_code(const VerificationReport& report);

}  // namespace greenlab
