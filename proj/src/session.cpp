#include "llmbda/session.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "llmbda/printer.hpp"
#include "llmbda/smallstep.hpp"

namespace llmbda {

namespace {

// Differential agreement for script items: identical conversations,
// observationally equal values, or both cut off / failed.
bool agree_impl(const EvalOutcome& big, const EvalOutcome& small, const LatticeSpec& lattice) {
    if (fuel_exhausted(big) || fuel_exhausted(small)) return true;
    const auto* b = success_of(big);
    const auto* s = success_of(small);
    if (b && s) return b->conv == s->conv && values_observationally_equal(b->value, s->value, lattice);
    return !b && !s;
}

}  // namespace

Session::Session(const SessionConfig& cfg) : cfg_(cfg) {
    conv_ = Conversation::empty(cfg_.lattice->bot());
    load_prelude();
}

EvalConfig Session::eval_config() const {
    EvalConfig ec;
    ec.lattice = cfg_.lattice;
    ec.model = cfg_.model;
    ec.fuel = cfg_.fuel;
    ec.trace = cfg_.trace;
    ec.prelude = &prelude_defs_;
    return ec;
}

const LabelledValue* Session::lookup(const std::string& name) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
        if (it->first == name) return &it->second;
    return nullptr;
}

ExprPtr Session::resolve(const ExprPtr& e) const {
    ExprPtr out = e;
    for (const auto& name : free_vars(e)) {
        if (const LabelledValue* v = lookup(name)) out = substitute(out, name, to_expr(*v, lattice()));
    }
    return out;
}

void Session::run_prelude_text(const std::string& text, const std::string& origin) {
    std::vector<Item> items;
    try {
        items = parse_program(text, lattice(), origin);
    } catch (const ParseError& e) {
        throw PreludeError(std::string("prelude parse failure: ") + e.what());
    }
    EvalConfig ec = eval_config();
    ec.trace = false;
    for (const auto& item : items) {
        EvalOutcome out = eval(lattice().bot(), conv_, resolve(item.expr), ec);
        const auto* ok = success_of(out);
        if (!ok) {
            std::string why = fuel_exhausted(out) ? "fuel exhausted" : failure_of(out)->message;
            throw PreludeError("prelude evaluation failure in " + origin + ": " + why);
        }
        conv_ = ok->conv;
        if (item.let_name) env_.emplace_back(*item.let_name, ok->value);
    }
}

void Session::load_prelude() {
    if (cfg_.load_default_prelude) {
        run_prelude_text(builtin_prelude_core(), "<prelude>");
        if (lattice().name() == "powerset-US") run_prelude_text(builtin_prelude_powerset(), "<prelude:powerset>");
    }
    for (const auto& path : cfg_.extra_prelude_files) {
        std::ifstream in(path);
        if (!in) throw PreludeError("cannot open prelude file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        run_prelude_text(ss.str(), path);
    }
    prelude_defs_.clear();
    for (const auto& [name, value] : env_) prelude_defs_[name] = to_expr(value, lattice());
}

bool Session::agree(const EvalOutcome& big, const EvalOutcome& small) const {
    return agree_impl(big, small, lattice());
}

EvalOutcome Session::run_item(const Item& item, std::string* line) {
    ExprPtr resolved = resolve(item.expr);
    EvalOutcome out;
    if (cfg_.engine == SessionConfig::Engine::Small) {
        out = run_small_from(conv_, resolved, eval_config());
    } else if (cfg_.engine == SessionConfig::Engine::Diff) {
        out = eval(lattice().bot(), conv_, resolved, eval_config());
        EvalOutcome small = run_small_from(conv_, resolved, eval_config());
        if (!agree(out, small))
            out = EvalFailure{ErrorKind::StuckTerm,
                              "differential check failed: the engines disagree on this item", std::nullopt};
    } else {
        out = eval(lattice().bot(), conv_, resolved, eval_config());
    }
    const auto* ok = success_of(out);
    if (ok) {
        conv_ = ok->conv;
        if (item.let_name) {
            env_.emplace_back(*item.let_name, ok->value);
            if (line) *line = *item.let_name + " = " + pretty_binding(ok->value, lattice());
        } else if (line) {
            *line = pretty(ok->value, lattice());
        }
    }
    return out;
}

void Session::reset() {
    env_.clear();
    prelude_defs_.clear();
    conv_ = Conversation::empty(lattice().bot());
    load_prelude();
}

namespace {

std::string describe_failure(const EvalOutcome& out) {
    if (fuel_exhausted(out)) return "fuel exhausted";
    const auto* f = failure_of(out);
    std::string msg = std::string("[") + error_kind_name(f->kind) + "] " + f->message;
    if (f->loc) msg += " (at " + std::to_string(f->loc->line) + ":" + std::to_string(f->loc->column) + ")";
    return msg;
}

std::string format_elapsed(double seconds) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " (%.1fs)", seconds);
    return buf;
}

}  // namespace

int run_script(const std::vector<std::string>& paths, const SessionConfig& cfg, std::ostream& out,
               std::ostream& err) {
    auto start = std::chrono::steady_clock::now();
    std::unique_ptr<Session> session;
    try {
        session = std::make_unique<Session>(cfg);
    } catch (const PreludeError& e) {
        err << "Error: " << e.what() << "\n";
        return 2;
    }

    std::vector<std::string> lines;
    auto flush_lines = [&](bool timed) {
        for (std::size_t i = 0; i < lines.size(); ++i) {
            out << lines[i];
            if (timed && i + 1 == lines.size()) {
                double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                out << format_elapsed(secs);
            }
            out << "\n";
        }
    };

    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) {
            err << "Error: cannot open script '" << path << "'\n";
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        std::vector<Item> items;
        try {
            items = parse_program(ss.str(), session->lattice(), path);
        } catch (const ParseError& e) {
            err << "Error: " << e.what() << "\n";
            return 2;
        }
        for (const auto& item : items) {
            std::string line;
            EvalOutcome o = session->run_item(item, &line);
            if (!success_of(o)) {
                flush_lines(false);
                err << "Error: " << describe_failure(o) << "\n";
                return 1;
            }
            lines.push_back(line);
        }
    }
    flush_lines(true);
    return 0;
}

int repl(const SessionConfig& cfg, std::istream& in, std::ostream& out) {
    std::unique_ptr<Session> session;
    try {
        session = std::make_unique<Session>(cfg);
    } catch (const PreludeError& e) {
        out << "Error: " << e.what() << "\n";
        return 2;
    }
    out << "llmbda repl — lattice " << session->lattice().name() << ", model " << cfg.model->describe()
        << ". :quit to exit.\n";

    std::string buffer;
    auto prompt = [&] { out << (buffer.empty() ? "> " : "… ") << std::flush; };
    prompt();
    std::string line;
    while (std::getline(in, line)) {
        if (buffer.empty() && !line.empty() && line[0] == ':') {
            std::istringstream meta(line);
            std::string cmd, arg;
            meta >> cmd;
            std::getline(meta, arg);
            if (!arg.empty() && arg[0] == ' ') arg.erase(0, 1);
            if (cmd == ":quit" || cmd == ":q") return 0;
            if (cmd == ":conv") {
                out << pretty_conversation(session->conversation(), session->lattice()) << "\n";
            } else if (cmd == ":reset") {
                try {
                    session->reset();
                    out << "reset.\n";
                } catch (const PreludeError& e) {
                    out << "Error: " << e.what() << "\n";
                }
            } else if (cmd == ":model") {
                out << cfg.model->describe() << "\n";
            } else if (cmd == ":load") {
                std::ifstream file(arg);
                if (!file) {
                    out << "Error: cannot open '" << arg << "'\n";
                } else {
                    std::stringstream ss;
                    ss << file.rdbuf();
                    try {
                        for (const auto& item : parse_program(ss.str(), session->lattice(), arg)) {
                            std::string echo;
                            EvalOutcome o = session->run_item(item, &echo);
                            if (!success_of(o)) {
                                out << "Error: " << describe_failure(o) << "\n";
                                break;
                            }
                            out << echo << "\n";
                        }
                    } catch (const ParseError& e) {
                        out << "Error: " << e.what() << "\n";
                    }
                }
            } else {
                out << "unknown command " << cmd << " (:load :conv :reset :model :quit)\n";
            }
            prompt();
            continue;
        }

        buffer += line;
        buffer += "\n";
        if (buffer.find_first_not_of(" \t\n") == std::string::npos) {
            buffer.clear();
            prompt();
            continue;
        }
        std::vector<Item> items;
        try {
            items = parse_program(buffer, session->lattice(), "<repl>");
        } catch (const ParseError& e) {
            if (e.at_eof) {
                prompt();  // keep reading: the item may continue on the next line
                continue;
            }
            out << "Error: " << e.what() << "\n";
            buffer.clear();
            prompt();
            continue;
        }
        buffer.clear();
        for (const auto& item : items) {
            std::string echo;
            EvalOutcome o = session->run_item(item, &echo);
            if (!success_of(o)) {
                out << "Error: " << describe_failure(o) << "\n";
                break;
            }
            out << echo << "\n";
        }
        prompt();
    }
    return 0;
}

}  // namespace llmbda
