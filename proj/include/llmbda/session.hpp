#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "llmbda/eval.hpp"
#include "llmbda/model.hpp"
#include "llmbda/parser.hpp"

namespace llmbda {

const char* builtin_prelude_core();
const char* builtin_prelude_powerset();

struct SessionConfig {
    const LatticeSpec* lattice = nullptr;
    ModelPtr model;
    std::int64_t fuel = 100000;
    bool trace = false;
    bool load_default_prelude = true;
    std::vector<std::string> extra_prelude_files;
    enum class Engine { Big, Small, Diff } engine = Engine::Big;
};

/// Raised when the prelude fails to load; startup aborts.
struct PreludeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An interactive or script session: a top-level environment of immutable
/// bindings plus one conversation threaded across items.
class Session {
  public:
    explicit Session(const SessionConfig& cfg);

    const LatticeSpec& lattice() const { return *cfg_.lattice; }
    const Conversation& conversation() const { return conv_; }
    const PreludeDefs& prelude_defs() const { return prelude_defs_; }
    const LabelledValue* lookup(const std::string& name) const;

    /// Substitutes every environment binding for its free occurrences.
    ExprPtr resolve(const ExprPtr& e) const;

    /// Evaluates one item, updating the environment and conversation. On
    /// success `line` receives the echo text ("name = value" or the pretty
    /// value).
    EvalOutcome run_item(const Item& item, std::string* line);

    /// Fresh conversation and environment; the prelude is reloaded.
    void reset();

    EvalConfig eval_config() const;

  private:
    bool agree(const EvalOutcome& big, const EvalOutcome& small) const;
    void load_prelude();
    void run_prelude_text(const std::string& text, const std::string& origin);

    SessionConfig cfg_;
    std::vector<std::pair<std::string, LabelledValue>> env_;
    PreludeDefs prelude_defs_;
    Conversation conv_{Label{0}, {}};
};

/// Loads the prelude, then each file, evaluating items in order. Prints
/// `name = value` for bindings and the pretty value for bare expressions;
/// the final line carries elapsed seconds. Exit codes: 0 success,
/// 1 evaluation failure, 2 parse/config failure.
int run_script(const std::vector<std::string>& paths, const SessionConfig& cfg, std::ostream& out,
               std::ostream& err);

/// Interactive loop. Meta-commands: :load FILE, :conv, :reset, :model, :quit.
int repl(const SessionConfig& cfg, std::istream& in, std::ostream& out);

}  // namespace llmbda
