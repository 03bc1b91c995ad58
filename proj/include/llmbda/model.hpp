#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace llmbda {

/// Raised by backends on unmatched prompts (strict mode) and transport or
/// persistence failures; the evaluator reports it as a model error.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A deterministic scripted model: ordered matcher -> response rules.
/// Rules are tried in order, first hit wins; a consumed once-rule never
/// fires again until reset.
struct TranscriptRule {
    enum class Matcher { Substring, Exact, Index, Always };
    Matcher matcher = Matcher::Always;
    std::string pattern;      // for Substring/Exact
    std::size_t index = 0;    // for Index: 0-based prompt ordinal
    std::string response;
    bool consume_once = false;
};

struct Transcript {
    std::vector<TranscriptRule> rules;

    static Transcript load(const std::string& path);
    static Transcript parse(const std::string& text, const std::string& origin);
    /// Canonical file rendering; save(load(f)) is byte-identical for
    /// canonical files.
    std::string save() const;
    void save_to(const std::string& path) const;
};

/// The model behaviour function: a response from the flattened history plus
/// the new prompt. Non-live backends are deterministic.
class ModelBackend {
  public:
    virtual ~ModelBackend() = default;
    virtual std::string complete(const std::string& history, const std::string& prompt) = 0;
    /// Formal-mode backends are deterministic; the property harness refuses
    /// anything that is not.
    virtual bool is_formal() const { return true; }
    virtual std::string describe() const = 0;
    /// Starts a fresh evaluation: clears consumed-rule state and call counters.
    virtual void reset() {}
};

using ModelPtr = std::shared_ptr<ModelBackend>;

/// Responds with the prompt itself. Prompts are serialized values, so the
/// echo response parses back to the value that was sent.
ModelPtr make_echo_backend();
ModelPtr make_constant_backend(std::string text);
/// strict: unmatched prompt raises ModelError; otherwise a fixed
/// non-parsing fallback response is returned.
ModelPtr make_transcript_backend(Transcript transcript, bool strict);

/// Records every (prompt, response) exchange of the wrapped backend to a
/// transcript file as exact-match once-rules; replaying that file through a
/// strict transcript backend reproduces the session.
ModelPtr make_recording_backend(ModelPtr inner, std::string capture_path);

struct LiveConfig {
    std::string endpoint;      // e.g. https://api.openai.com
    std::string model_name;
    std::string credential_env = "OPENAI_API_KEY";
};
/// OpenAI-compatible chat-completions client. Non-formal: the harness
/// refuses it. The conversation maps to alternating user/assistant messages.
ModelPtr make_live_backend(LiveConfig config);

/// Parses a --model flag value: echo | constant:TEXT | scripted[:PATH] |
/// rulebook[:PATH] | live:ENDPOINT/MODEL. scripted is strict, rulebook is
/// not; both read the transcript file format.
ModelPtr make_backend_from_flag(const std::string& flag, const std::optional<std::string>& transcript_path,
                                bool strict_override);

}  // namespace llmbda
