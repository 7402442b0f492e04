#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "isoc/montecarlo.hpp"
#include "isoc/solver.hpp"

namespace isoc {

inline constexpr const char* kToolVersion = "0.1.0";

// --- JSON model files --------------------------------------------------------
// Top-level keys: system, cost, noise, layout. Matrices are row-major
// nested arrays, vectors flat arrays. See docs/file-formats.md.

nlohmann::json model_to_json(const ModelBundle& bundle);
ModelBundle model_from_json(const nlohmann::json& j);

// Accepts a path or "builtin:reaching-lqg" / "builtin:reaching-lqs".
ModelBundle load_model(const std::string& spec);
void save_model(const ModelBundle& bundle, const std::string& path);

// --- moment CSV ---------------------------------------------------------------
// One row per t: t, mean_1..mean_D, cov_1_1, cov_1_2, ..., cov_D_D
// (row-major full matrix), with a header row. The full trajectory uses
// D = 2n (stacked state and estimate), the measured one D = n_measured.

void save_moments_csv(const GroundTruthMoments& moments, const std::string& path);
GroundTruthMoments load_moments_csv(const std::string& path);

void save_trajectory_moments_csv(const MomentTrajectory& traj, const std::string& path);

// --- trajectory batches ---------------------------------------------------------
// CSV columns: sample, t, x_1..x_D; the JSON sidecar holds seed, sample
// count and mode.

void save_batch_csv(const TrajectoryBatch& batch, const std::string& csv_path,
                    const std::string& sidecar_path);
TrajectoryBatch load_batch_csv(const std::string& csv_path, const std::string& sidecar_path);

// --- solver configuration and results -------------------------------------------

IsocConfig isoc_config_from_json(const nlohmann::json& j);
nlohmann::json isoc_config_to_json(const IsocConfig& cfg);
IsocConfig load_isoc_config(const std::string& path);

nlohmann::json fit_report_to_json(const FitReport& fit);
nlohmann::json isoc_result_to_json(const IsocResult& result);
void save_trace_jsonl(const std::vector<GridTraceRecord>& trace, const std::string& path);

nlohmann::json gains_to_json(const GainSchedule& gains);

// --- misc ------------------------------------------------------------------------

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

// FNV-1a 64-bit over the raw file bytes, for manifests.
std::uint64_t fnv1a64_file(const std::string& path);

} // namespace isoc
