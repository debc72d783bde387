// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <beampred/eval.hpp>
#include <beampred/mlp.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beampred {

inline constexpr std::string_view kReportSchema = "beampred-report/1";

/// Hierarchical JSON document for one report. Doubles round-trip exactly.
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view text);

/// JSON document holding several reports under "reports".
std::string reports_to_json(std::span<const EvalReport> reports);
std::vector<EvalReport> reports_from_json(std::string_view text);

/// Flat CSV, one row per (feature_set, stratum, k). Overall accuracy uses
/// dimension "overall" and stratum "all".
std::string reports_to_csv(std::span<const EvalReport> reports);

/// Per-epoch training history: epoch,learning_rate,loss,top1.
std::string history_to_csv(std::span<const EpochRecord> history, std::string_view config_hash,
                           std::uint64_t master_seed);

}  // namespace beampred
