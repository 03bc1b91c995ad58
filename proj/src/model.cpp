#include "llmbda/model.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

namespace llmbda {

namespace {

std::string escape_field(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unescape_field(const std::string& s, const std::string& where) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (++i >= s.size()) throw ModelError(where + ": dangling backslash");
        switch (s[i]) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            default: throw ModelError(where + ": unknown escape '\\" + std::string(1, s[i]) + "'");
        }
    }
    return out;
}

// Reads a double-quoted, escaped string starting at s[i] (which must be '"').
std::string read_quoted(const std::string& s, std::size_t& i, const std::string& where) {
    if (i >= s.size() || s[i] != '"') throw ModelError(where + ": expected '\"'");
    std::size_t start = ++i;
    std::string raw;
    for (; i < s.size(); ++i) {
        if (s[i] == '\\') {
            if (i + 1 >= s.size()) throw ModelError(where + ": dangling backslash");
            raw += s[i];
            raw += s[++i];
        } else if (s[i] == '"') {
            ++i;
            return unescape_field(raw, where);
        } else {
            raw += s[i];
        }
    }
    throw ModelError(where + ": unterminated string starting at column " + std::to_string(start));
}

void skip_spaces(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

std::string read_word(const std::string& s, std::size_t& i) {
    std::string w;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') w += s[i++];
    return w;
}

}  // namespace

Transcript Transcript::parse(const std::string& text, const std::string& origin) {
    Transcript t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = origin + ":" + std::to_string(lineno);
        std::size_t i = 0;
        skip_spaces(line, i);
        if (i >= line.size() || line[i] == '#') continue;
        std::string word = read_word(line, i);
        if (word != "rule") throw ModelError(where + ": expected 'rule', got '" + word + "'");
        skip_spaces(line, i);
        std::string kind = read_word(line, i);
        TranscriptRule rule;
        skip_spaces(line, i);
        if (kind == "substring") {
            rule.matcher = TranscriptRule::Matcher::Substring;
            rule.pattern = read_quoted(line, i, where);
        } else if (kind == "exact") {
            rule.matcher = TranscriptRule::Matcher::Exact;
            rule.pattern = read_quoted(line, i, where);
        } else if (kind == "index") {
            rule.matcher = TranscriptRule::Matcher::Index;
            std::string num = read_word(line, i);
            try {
                rule.index = std::stoul(num);
            } catch (...) {
                throw ModelError(where + ": bad index '" + num + "'");
            }
        } else if (kind == "always") {
            rule.matcher = TranscriptRule::Matcher::Always;
        } else {
            throw ModelError(where + ": unknown matcher '" + kind + "' (substring, exact, index, always)");
        }
        skip_spaces(line, i);
        std::string next = read_word(line, i);
        if (next == "once") {
            rule.consume_once = true;
            skip_spaces(line, i);
            next = read_word(line, i);
        }
        if (next != "=>") throw ModelError(where + ": expected '=>'");
        skip_spaces(line, i);
        rule.response = read_quoted(line, i, where);
        skip_spaces(line, i);
        if (i < line.size()) throw ModelError(where + ": trailing text after the response");
        t.rules.push_back(std::move(rule));
    }
    return t;
}

Transcript Transcript::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open transcript '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

std::string Transcript::save() const {
    std::string out = "# llmbda transcript\n";
    for (const auto& r : rules) {
        out += "rule ";
        switch (r.matcher) {
            case TranscriptRule::Matcher::Substring: out += "substring \"" + escape_field(r.pattern) + "\""; break;
            case TranscriptRule::Matcher::Exact: out += "exact \"" + escape_field(r.pattern) + "\""; break;
            case TranscriptRule::Matcher::Index: out += "index " + std::to_string(r.index); break;
            case TranscriptRule::Matcher::Always: out += "always"; break;
        }
        if (r.consume_once) out += " once";
        out += " => \"" + escape_field(r.response) + "\"\n";
    }
    return out;
}

void Transcript::save_to(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ModelError("cannot write transcript '" + path + "'");
    out << save();
}

namespace {

class EchoBackend final : public ModelBackend {
  public:
    std::string complete(const std::string&, const std::string& prompt) override { return prompt; }
    std::string describe() const override { return "echo"; }
};

class ConstantBackend final : public ModelBackend {
  public:
    explicit ConstantBackend(std::string text) : text_(std::move(text)) {}
    std::string complete(const std::string&, const std::string&) override { return text_; }
    std::string describe() const override { return "constant:" + text_; }

  private:
    std::string text_;
};

class TranscriptBackend final : public ModelBackend {
  public:
    TranscriptBackend(Transcript transcript, bool strict)
        : transcript_(std::move(transcript)), strict_(strict), consumed_(transcript_.rules.size(), false) {}

    std::string complete(const std::string&, const std::string& prompt) override {
        std::size_t ordinal = calls_++;
        for (std::size_t i = 0; i < transcript_.rules.size(); ++i) {
            const auto& r = transcript_.rules[i];
            if (consumed_[i]) continue;
            bool hit = false;
            switch (r.matcher) {
                case TranscriptRule::Matcher::Substring: hit = prompt.find(r.pattern) != std::string::npos; break;
                case TranscriptRule::Matcher::Exact: hit = prompt == r.pattern; break;
                case TranscriptRule::Matcher::Index: hit = ordinal == r.index; break;
                case TranscriptRule::Matcher::Always: hit = true; break;
            }
            if (!hit) continue;
            if (r.consume_once) consumed_[i] = true;
            return r.response;
        }
        if (strict_) throw ModelError("no transcript rule matched prompt: " + prompt);
        return "no transcript rule matched";  // prose: parses to [false, ...]
    }

    void reset() override {
        calls_ = 0;
        std::fill(consumed_.begin(), consumed_.end(), false);
    }

    std::string describe() const override {
        return std::string(strict_ ? "scripted" : "rulebook") + "(" + std::to_string(transcript_.rules.size()) +
               " rules)";
    }

  private:
    Transcript transcript_;
    bool strict_;
    std::vector<bool> consumed_;
    std::size_t calls_ = 0;
};

class RecordingBackend final : public ModelBackend {
  public:
    RecordingBackend(ModelPtr inner, std::string path) : inner_(std::move(inner)), path_(std::move(path)) {}

    std::string complete(const std::string& history, const std::string& prompt) override {
        std::string response = inner_->complete(history, prompt);
        TranscriptRule rule;
        rule.matcher = TranscriptRule::Matcher::Exact;
        rule.pattern = prompt;
        rule.consume_once = true;
        rule.response = response;
        captured_.rules.push_back(std::move(rule));
        captured_.save_to(path_);
        return response;
    }

    bool is_formal() const override { return inner_->is_formal(); }
    void reset() override { inner_->reset(); }
    std::string describe() const override { return "record(" + inner_->describe() + " -> " + path_ + ")"; }

  private:
    ModelPtr inner_;
    std::string path_;
    Transcript captured_;
};

}  // namespace

ModelPtr make_echo_backend() { return std::make_shared<EchoBackend>(); }
ModelPtr make_constant_backend(std::string text) { return std::make_shared<ConstantBackend>(std::move(text)); }
ModelPtr make_transcript_backend(Transcript transcript, bool strict) {
    return std::make_shared<TranscriptBackend>(std::move(transcript), strict);
}
ModelPtr make_recording_backend(ModelPtr inner, std::string capture_path) {
    return std::make_shared<RecordingBackend>(std::move(inner), std::move(capture_path));
}

ModelPtr make_backend_from_flag(const std::string& flag, const std::optional<std::string>& transcript_path,
                                bool strict_override) {
    auto split = [&](const std::string& s) -> std::pair<std::string, std::string> {
        auto colon = s.find(':');
        if (colon == std::string::npos) return {s, ""};
        return {s.substr(0, colon), s.substr(colon + 1)};
    };
    auto [kind, arg] = split(flag);
    if (kind == "echo") return make_echo_backend();
    if (kind == "constant") return make_constant_backend(arg);
    if (kind == "scripted" || kind == "rulebook") {
        std::string path = !arg.empty() ? arg : transcript_path.value_or("");
        if (path.empty()) throw ModelError("backend '" + kind + "' needs a transcript path (--transcript)");
        bool strict = kind == "scripted" || strict_override;
        return make_transcript_backend(Transcript::load(path), strict);
    }
    if (kind == "live") {
        // live:ENDPOINT/MODEL, e.g. live:https://api.openai.com/gpt-4o-mini
        auto slash = arg.rfind('/');
        if (arg.empty() || slash == std::string::npos || slash + 1 >= arg.size())
            throw ModelError("live backend needs 'live:ENDPOINT/MODEL-NAME'");
        LiveConfig cfg;
        cfg.endpoint = arg.substr(0, slash);
        cfg.model_name = arg.substr(slash + 1);
        return make_live_backend(std::move(cfg));
    }
    throw ModelError("unknown model backend '" + flag + "' (echo, constant:TEXT, scripted[:PATH], rulebook[:PATH], live:ENDPOINT/MODEL)");
}

}  // namespace llmbda
