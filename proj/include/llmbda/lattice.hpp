#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace llmbda {

/// A security label: an element of a finite join-semilattice.
/// Labels are plain ids into the session's LatticeSpec; one lattice is
/// chosen per session and never mixed.
struct Label {
    std::uint8_t id = 0;

    friend bool operator==(Label a, Label b) { return a.id == b.id; }
    friend bool operator!=(Label a, Label b) { return a.id != b.id; }
};

/// A finite join-semilattice of security labels with designated bottom and
/// top. Immutable after construction; safe to share across threads.
class LatticeSpec {
  public:
    /// Builds a lattice from elements and a covering relation (a < b pairs).
    /// Validates that every pair of elements has a unique least upper bound
    /// and that there is a unique bottom and top.
    static LatticeSpec from_covers(std::string name,
                                   std::vector<std::string> elements,
                                   const std::vector<std::pair<std::string, std::string>>& covers);

    /// The paper's default: subsets of {U, S} ordered by inclusion.
    static const LatticeSpec& powerset_us();
    /// Two-point lattice bot < top.
    static const LatticeSpec& two_point();
    /// Three-element chain L < M < H.
    static const LatticeSpec& chain3();

    /// Looks up a built-in spec by name, or loads a lattice file.
    static const LatticeSpec& builtin(std::string_view name);
    static LatticeSpec load_file(const std::string& path);
    /// Parses the declarative lattice-file format (see docs/grammar.md).
    static LatticeSpec parse_spec_text(std::string_view text, const std::string& origin);

    const std::string& name() const { return name_; }
    std::size_t size() const { return element_names_.size(); }

    Label bot() const { return bot_; }
    Label top() const { return top_; }

    Label join(Label a, Label b) const;
    /// May-flow-to: a may flow to b iff join(a, b) == b.
    bool leq(Label a, Label b) const;

    /// Parses a brace-delimited label literal: "{U,S}", "{M}", "{}" (bot).
    /// For the powerset lattice the braces contain a tag set; for other
    /// lattices a single element name.
    std::optional<Label> parse_label(std::string_view text) const;
    /// Resolves the element denoted by a brace-less tag list (used by the
    /// parser which has already split the braces).
    std::optional<Label> resolve_tags(const std::vector<std::string>& tags) const;

    /// Canonical rendering, e.g. "{U,S}" or "{}" for bot.
    std::string show(Label l) const;
    /// Like show but renders bot as the word "bot" (used in messages and
    /// conversation displays).
    std::string show_or_bot(Label l) const;

    Label element(std::size_t i) const { return Label{static_cast<std::uint8_t>(i)}; }
    const std::string& element_name(Label l) const { return element_names_[l.id]; }

  private:
    LatticeSpec() = default;

    std::string name_;
    std::vector<std::string> element_names_;
    std::vector<std::uint8_t> join_table_;  // size*size, row-major
    Label bot_{0};
    Label top_{0};
    bool powerset_ = false;          // powerset lattices parse tag sets
    std::vector<std::string> tags_;  // tag names for powerset lattices

    void check_element(Label l) const;
};

}  // namespace llmbda
