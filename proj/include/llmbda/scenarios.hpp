#pragma once

#include <optional>
#include <string>
#include <vector>

#include "llmbda/lattice.hpp"
#include "llmbda/value.hpp"

namespace llmbda {

/// Per-field audit of an outbound queue entry: the label and a byte-stable
/// rendering, both computed from evaluator results.
struct FieldAudit {
    Label label;
    std::string rendered;
};

struct QueueEntryAudit {
    Label label;
    std::vector<std::pair<std::string, FieldAudit>> fields;
};

struct ScenarioReport {
    std::string name;
    bool completed = false;
    std::string blocked_reason;   // error kind when blocked
    std::string blocked_message;
    Label conversation_label;
    Label queue_label;
    std::vector<QueueEntryAudit> queue;
    std::string transcript_path;
    std::string result_pretty;
};

/// tool-benign | tool-attacked | camel-benign | camel-attacked |
/// camel-tainted-subject.
std::vector<std::string> scenario_names();

/// Runs one scenario over the powerset-US lattice against its shipped strict
/// transcript. `injection_override` replaces the attack text (used by the
/// two-run noninterference check); it must not contain a single quote.
ScenarioReport run_scenario(const std::string& name, std::int64_t fuel = 100000,
                            const std::optional<std::string>& injection_override = std::nullopt);

std::string scenario_report_text(const ScenarioReport& report, const LatticeSpec& lattice);
std::string scenario_report_json(const ScenarioReport& report, const LatticeSpec& lattice);

/// Resolves a file under the shipped asset directory (LLMBDA_ASSETS
/// overrides the build-time default).
std::string asset_path(const std::string& relative);

}  // namespace llmbda
