#pragma once

#include <string>
#include <vector>

#include "llmbda/lattice.hpp"

namespace llmbda {

/// One prompt/response exchange. Messages are realized as UTF-8 text.
struct Message {
    std::string prompt;
    std::string response;

    friend bool operator==(const Message& a, const Message& b) {
        return a.prompt == b.prompt && a.response == b.response;
    }
};

/// A labelled conversation: the label bounds the provenance of everything
/// the model has seen. Entries are only ever appended (prompt), wholly
/// reset (clear), or wholly restored (fork).
struct Conversation {
    Label label;
    std::vector<Message> entries;

    static Conversation empty(Label bot) { return Conversation{bot, {}}; }

    /// Flat concatenation of all messages, the model's view of history.
    std::string flattened() const {
        std::string out;
        for (const auto& m : entries) {
            out += m.prompt;
            out += m.response;
        }
        return out;
    }

    friend bool operator==(const Conversation& a, const Conversation& b) {
        return a.label == b.label && a.entries == b.entries;
    }
    friend bool operator!=(const Conversation& a, const Conversation& b) { return !(a == b); }
};

}  // namespace llmbda
