// OpenAI-compatible chat-completions client. Formal mode never uses this:
// the harness refuses non-deterministic backends.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <cstdlib>

#include "json.hpp"
#include "llmbda/model.hpp"

namespace llmbda {

namespace {

using nlohmann::json;

class LiveBackend final : public ModelBackend {
  public:
    explicit LiveBackend(LiveConfig cfg) : cfg_(std::move(cfg)) {
        const char* key = std::getenv(cfg_.credential_env.c_str());
        if (!key || !*key)
            throw ModelError("live backend: credential environment variable " + cfg_.credential_env + " is not set");
        credential_ = key;
    }

    std::string complete(const std::string&, const std::string& prompt) override {
        // The conversation arrives as alternating user/assistant messages;
        // formal mode flattens instead (the divergence is documented).
        history_.push_back({"user", prompt});
        json messages = json::array();
        for (const auto& [role, text] : history_) messages.push_back({{"role", role}, {"content", text}});
        json body = {{"model", cfg_.model_name}, {"messages", messages}};

        httplib::Client client(cfg_.endpoint);
        client.set_read_timeout(120, 0);
        httplib::Headers headers = {{"Authorization", "Bearer " + credential_}};
        auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
        if (!res) throw ModelError("live backend: transport error contacting " + cfg_.endpoint);
        if (res->status != 200)
            throw ModelError("live backend: HTTP " + std::to_string(res->status) + ": " + res->body);
        try {
            json reply = json::parse(res->body);
            std::string text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
            history_.push_back({"assistant", text});
            return text;
        } catch (const json::exception& e) {
            throw ModelError(std::string("live backend: malformed response: ") + e.what());
        }
    }

    bool is_formal() const override { return false; }
    void reset() override { history_.clear(); }
    std::string describe() const override { return "live(" + cfg_.endpoint + ", " + cfg_.model_name + ")"; }

  private:
    LiveConfig cfg_;
    std::string credential_;
    std::vector<std::pair<std::string, std::string>> history_;
};

}  // namespace

ModelPtr make_live_backend(LiveConfig config) { return std::make_shared<LiveBackend>(std::move(config)); }

}  // namespace llmbda
