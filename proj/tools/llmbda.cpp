// Command-line entry point: script runner, REPL, property-check campaigns,
// and scenario runs.

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "llmbda/harness.hpp"
#include "llmbda/scenarios.hpp"
#include "llmbda/session.hpp"

using namespace llmbda;

namespace {

struct GlobalOptions {
    std::string model = "echo";
    std::optional<std::string> transcript;
    std::optional<std::string> record;
    bool strict = false;
    std::string lattice = "powerset-US";
    std::int64_t fuel = 100000;
    std::string engine = "big";
    std::vector<std::string> preludes;
    bool no_prelude = false;
    bool trace = false;
};

// Keeps a file-loaded lattice alive for the process lifetime.
const LatticeSpec& resolve_lattice(const std::string& flag) {
    static std::optional<LatticeSpec> file_spec;
    try {
        return LatticeSpec::builtin(flag);
    } catch (const std::exception&) {
        std::ifstream probe(flag);
        if (!probe) throw;
        file_spec = LatticeSpec::load_file(flag);
        return *file_spec;
    }
}

SessionConfig build_session_config(const GlobalOptions& opts) {
    SessionConfig cfg;
    cfg.lattice = &resolve_lattice(opts.lattice);
    cfg.model = make_backend_from_flag(opts.model, opts.transcript, opts.strict);
    if (opts.record) cfg.model = make_recording_backend(cfg.model, *opts.record);
    cfg.fuel = opts.fuel;
    cfg.trace = opts.trace;
    cfg.load_default_prelude = !opts.no_prelude;
    cfg.extra_prelude_files = opts.preludes;
    if (opts.engine == "small")
        cfg.engine = SessionConfig::Engine::Small;
    else if (opts.engine == "diff")
        cfg.engine = SessionConfig::Engine::Diff;
    return cfg;
}

int run_check(const GlobalOptions& opts, const std::string& property, const std::string& sublanguage,
              const std::string& label_flag, const std::string& k_flag, std::size_t trials, std::uint64_t seed,
              const std::string& report_path) {
    const LatticeSpec& lattice = resolve_lattice(opts.lattice);
    std::ofstream report_file;
    std::ostream* report = nullptr;
    if (!report_path.empty()) {
        report_file.open(report_path, std::ios::trunc);
        if (!report_file) {
            std::cerr << "Error: cannot write report file '" << report_path << "'\n";
            return 2;
        }
        report = &report_file;
    }

    auto parse_k_values = [&]() -> std::vector<Label> {
        if (!k_flag.empty()) {
            auto k = lattice.parse_label(k_flag);
            if (!k) throw std::runtime_error("bad label '" + k_flag + "' for lattice " + lattice.name());
            return {*k};
        }
        std::vector<Label> all;
        for (std::size_t i = 0; i < lattice.size(); ++i) all.push_back(lattice.element(i));
        return all;
    };

    if (property == "tini" || property == "confine") {
        auto sub = sublanguage_from_name(sublanguage);
        if (!sub) {
            std::cerr << "Error: unknown sublanguage '" << sublanguage
                      << "' (notest, single, assertstrong, unrestricted)\n";
            return 2;
        }
        GenConfig gen;
        gen.lattice = &lattice;
        gen.sub = *sub;
        if (!label_flag.empty()) {
            auto l = lattice.parse_label(label_flag);
            if (!l) throw std::runtime_error("bad label '" + label_flag + "'");
            gen.single_label = *l;
        } else {
            gen.single_label = lattice.top();
        }
        ConfinementChecker confinement(lattice);
        bool any_violation = false;
        double worst_health = 1.0;
        for (Label k : parse_k_values()) {
            gen.k = k;
            CampaignSummary s = run_tini_campaign(gen, trials, seed, opts.fuel, report,
                                                  property == "confine" ? &confinement : nullptr);
            std::cout << "tini " << sublanguage_name(gen.sub) << " k=" << lattice.show_or_bot(k) << ": " << s.trials
                      << " trials, " << s.passed << " passed, " << s.skipped << " skipped, " << s.violations
                      << " violations\n";
            for (const auto& v : s.violation_details) std::cout << "  violation: " << v.witness << "\n";
            any_violation |= s.violations > 0;
            worst_health = std::min(worst_health, s.non_skipped_fraction());
        }
        if (property == "confine") {
            std::cout << "confinement: " << confinement.judgements() << " judgements, " << confinement.violations()
                      << " violations\n";
            for (const auto& d : confinement.details()) std::cout << "  " << d << "\n";
            return confinement.violations() == 0 ? 0 : 1;
        }
        std::cout << "generator health: " << worst_health * 100 << "% non-skipped\n";
        return any_violation ? 1 : 0;
    }
    if (property == "erase") {
        ErasureSummary s = run_erasure_campaign(lattice, trials, seed, report);
        std::cout << "erase: " << s.trials << " trials, " << s.passed << " passed\n";
        return s.passed == s.trials ? 0 : 1;
    }
    if (property == "diff") {
        DiffSummary s = run_diff_campaign(lattice, trials, seed, opts.fuel, report);
        std::cout << "diff: " << s.trials << " trials, " << s.agreed << " agreed, " << s.cut_off << " cut off, "
                  << s.disagreements.size() << " disagreements\n";
        for (const auto& [dseed, details] : s.disagreements)
            std::cout << "  disagreement (seed " << dseed << "): " << details << "\n";
        return s.disagreements.empty() ? 0 : 1;
    }
    if (property == "derived") {
        DerivedRuleSummary s = run_derived_rule_campaign(lattice, trials, seed, report);
        std::cout << "derived rules: " << s.trials << " trials, " << s.agreed << " agreed\n";
        for (const auto& [dseed, details] : s.disagreements)
            std::cout << "  disagreement (seed " << dseed << "): " << details << "\n";
        return s.disagreements.empty() ? 0 : 1;
    }
    std::cerr << "Error: unknown property '" << property << "' (tini, confine, erase, diff, derived)\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"llmbda: a lambda calculus with labelled prompt-response conversations"};
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOptions opts;
    app.add_option("--model", opts.model, "Backend: echo | constant:TEXT | scripted[:PATH] | rulebook[:PATH] | "
                                          "live:ENDPOINT/MODEL");
    app.add_option("--transcript", opts.transcript, "Transcript file for scripted/rulebook backends");
    app.add_option("--record", opts.record, "Capture every exchange to this transcript file");
    app.add_flag("--strict", opts.strict, "Unmatched prompts are errors");
    app.add_option("--lattice", opts.lattice, "Built-in lattice name or a lattice file path");
    app.add_option("--fuel", opts.fuel, "Evaluation fuel (rule applications)");
    app.add_option("--engine", opts.engine, "big | small | diff");
    app.add_option("--prelude", opts.preludes, "Extra prelude file (repeatable)");
    app.add_flag("--no-prelude", opts.no_prelude, "Skip the built-in prelude");
    app.add_flag("--trace", opts.trace, "Print each big-step judgement");

    auto* run_cmd = app.add_subcommand("run", "Run script files");
    std::vector<std::string> scripts;
    run_cmd->add_option("scripts", scripts, "Script files")->required();

    auto* repl_cmd = app.add_subcommand("repl", "Interactive session");

    auto* check_cmd = app.add_subcommand("check", "Property-test campaigns");
    std::string property = "tini", sublanguage = "notest", label_flag, k_flag, report_path;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    check_cmd->add_option("--property", property, "tini | confine | erase | diff | derived");
    check_cmd->add_option("--sublanguage", sublanguage, "notest | single | assertstrong | unrestricted");
    check_cmd->add_option("--label", label_flag, "The one non-bottom label for the single sublanguage");
    check_cmd->add_option("--k", k_flag, "Observer level (default: every element)");
    check_cmd->add_option("--trials", trials, "Trials per configuration");
    check_cmd->add_option("--seed", seed, "Campaign seed");
    check_cmd->add_option("--report", report_path, "Write one JSON record per trial to this file");

    auto* scenario_cmd = app.add_subcommand("scenario", "Agent security scenarios");
    auto* scenario_run = scenario_cmd->add_subcommand("run", "Run one scenario");
    std::string scenario_name;
    bool scenario_json = false;
    scenario_run->add_option("name", scenario_name, "Scenario name")->required();
    scenario_run->add_flag("--json", scenario_json, "Machine-readable report");
    auto* scenario_list = scenario_cmd->add_subcommand("list", "List scenario names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return run_script(scripts, build_session_config(opts), std::cout, std::cerr);
        }
        if (repl_cmd->parsed()) {
            return repl(build_session_config(opts), std::cin, std::cout);
        }
        if (check_cmd->parsed()) {
            ModelPtr probe = make_backend_from_flag(opts.model, opts.transcript, opts.strict);
            require_formal_backend(*probe);
            return run_check(opts, property, sublanguage, label_flag, k_flag, trials, seed, report_path);
        }
        if (scenario_cmd->parsed()) {
            if (scenario_list->parsed()) {
                for (const auto& name : scenario_names()) std::cout << name << "\n";
                return 0;
            }
            if (scenario_run->parsed()) {
                ScenarioReport report = run_scenario(scenario_name, opts.fuel);
                const LatticeSpec& lattice = LatticeSpec::powerset_us();
                std::cout << (scenario_json ? scenario_report_json(report, lattice)
                                            : scenario_report_text(report, lattice));
                if (scenario_json) std::cout << "\n";
                return 0;
            }
            std::cerr << "Error: scenario needs a subcommand (run, list)\n";
            return 2;
        }
        // No subcommand: behave like `repl` on a terminal would be surprising
        // in pipes, so print help instead.
        std::cout << app.help();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "Error: " << e.what() << "\n";
        return 2;
    }
}
