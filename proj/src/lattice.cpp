#include "llmbda/lattice.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace llmbda {

namespace {

// Reflexive-transitive closure of the covering relation.
std::vector<bool> closure(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& covers) {
    std::vector<bool> le(n * n, false);
    for (std::size_t i = 0; i < n; ++i) le[i * n + i] = true;
    for (auto [a, b] : covers) le[a * n + b] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (le[a * n + b])
                    for (std::size_t c = 0; c < n; ++c)
                        if (le[b * n + c] && !le[a * n + c]) {
                            le[a * n + c] = true;
                            changed = true;
                        }
    }
    return le;
}

}  // namespace

LatticeSpec LatticeSpec::from_covers(std::string name, std::vector<std::string> elements,
                                     const std::vector<std::pair<std::string, std::string>>& covers) {
    if (elements.empty()) throw std::runtime_error("lattice '" + name + "': no elements");
    if (elements.size() > 64) throw std::runtime_error("lattice '" + name + "': too many elements (max 64)");
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (!index.emplace(elements[i], i).second)
            throw std::runtime_error("lattice '" + name + "': duplicate element '" + elements[i] + "'");
    }
    std::vector<std::pair<std::size_t, std::size_t>> cov;
    for (const auto& [a, b] : covers) {
        auto ia = index.find(a), ib = index.find(b);
        if (ia == index.end()) throw std::runtime_error("lattice '" + name + "': unknown element '" + a + "'");
        if (ib == index.end()) throw std::runtime_error("lattice '" + name + "': unknown element '" + b + "'");
        cov.emplace_back(ia->second, ib->second);
    }

    const std::size_t n = elements.size();
    auto le = closure(n, cov);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && le[a * n + b] && le[b * n + a])
                throw std::runtime_error("lattice '" + name + "': cycle involving '" + elements[a] + "' and '" +
                                         elements[b] + "'");

    LatticeSpec spec;
    spec.name_ = std::move(name);
    spec.element_names_ = std::move(elements);
    spec.join_table_.assign(n * n, 0);

    // Binary joins must exist and be unique.
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            std::vector<std::size_t> ubs;
            for (std::size_t c = 0; c < n; ++c)
                if (le[a * n + c] && le[b * n + c]) ubs.push_back(c);
            std::size_t lub = n;
            for (auto c : ubs) {
                bool least = true;
                for (auto d : ubs)
                    if (!le[c * n + d]) { least = false; break; }
                if (least) { lub = c; break; }
            }
            if (lub == n)
                throw std::runtime_error("lattice '" + spec.name_ + "': elements '" + spec.element_names_[a] +
                                         "' and '" + spec.element_names_[b] + "' have no join");
            spec.join_table_[a * n + b] = static_cast<std::uint8_t>(lub);
        }
    }

    // Unique bottom (below everything) and top (above everything).
    std::size_t bot = n, top = n;
    for (std::size_t c = 0; c < n; ++c) {
        bool is_bot = true, is_top = true;
        for (std::size_t d = 0; d < n; ++d) {
            if (!le[c * n + d]) is_bot = false;
            if (!le[d * n + c]) is_top = false;
        }
        if (is_bot) bot = c;
        if (is_top) top = c;
    }
    if (bot == n) throw std::runtime_error("lattice '" + spec.name_ + "': no bottom element");
    if (top == n) throw std::runtime_error("lattice '" + spec.name_ + "': no top element");
    spec.bot_ = Label{static_cast<std::uint8_t>(bot)};
    spec.top_ = Label{static_cast<std::uint8_t>(top)};
    return spec;
}

const LatticeSpec& LatticeSpec::powerset_us() {
    static const LatticeSpec spec = [] {
        // Element id doubles as the tag bitmask: bit 0 = U, bit 1 = S.
        LatticeSpec s = from_covers("powerset-US", {"{}", "{U}", "{S}", "{U,S}"},
                                    {{"{}", "{U}"}, {"{}", "{S}"}, {"{U}", "{U,S}"}, {"{S}", "{U,S}"}});
        s.powerset_ = true;
        s.tags_ = {"U", "S"};
        return s;
    }();
    return spec;
}

const LatticeSpec& LatticeSpec::two_point() {
    static const LatticeSpec spec = from_covers("two-point", {"bot", "top"}, {{"bot", "top"}});
    return spec;
}

const LatticeSpec& LatticeSpec::chain3() {
    static const LatticeSpec spec = from_covers("chain3", {"L", "M", "H"}, {{"L", "M"}, {"M", "H"}});
    return spec;
}

const LatticeSpec& LatticeSpec::builtin(std::string_view name) {
    if (name == "powerset-US" || name == "powerset-us") return powerset_us();
    if (name == "two-point") return two_point();
    if (name == "chain3") return chain3();
    throw std::runtime_error("unknown lattice '" + std::string(name) +
                             "' (built-ins: powerset-US, two-point, chain3)");
}

LatticeSpec LatticeSpec::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lattice file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec_text(ss.str(), path);
}

LatticeSpec LatticeSpec::parse_spec_text(std::string_view text, const std::string& origin) {
    std::string name;
    std::vector<std::string> elements;
    std::vector<std::pair<std::string, std::string>> covers;

    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "lattice") {
            if (!(ls >> name)) throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected name");
        } else if (word == "elements") {
            std::string e;
            while (ls >> e) elements.push_back(e);
        } else if (word == "cover") {
            std::string a, b;
            if (!(ls >> a >> b))
                throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected 'cover <lo> <hi>'");
            covers.emplace_back(a, b);
        } else {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": unknown directive '" + word + "'");
        }
    }
    if (name.empty()) name = origin;
    return from_covers(std::move(name), std::move(elements), covers);
}

void LatticeSpec::check_element(Label l) const {
    if (l.id >= element_names_.size())
        throw std::runtime_error("label id " + std::to_string(l.id) + " is not an element of lattice '" + name_ + "'");
}

Label LatticeSpec::join(Label a, Label b) const {
    check_element(a);
    check_element(b);
    return Label{join_table_[a.id * size() + b.id]};
}

bool LatticeSpec::leq(Label a, Label b) const { return join(a, b) == b; }

std::optional<Label> LatticeSpec::resolve_tags(const std::vector<std::string>& tags) const {
    if (tags.empty()) return bot_;
    if (powerset_) {
        std::uint8_t mask = 0;
        for (const auto& t : tags) {
            auto it = std::find(tags_.begin(), tags_.end(), t);
            if (it == tags_.end()) return std::nullopt;
            mask |= static_cast<std::uint8_t>(1u << (it - tags_.begin()));
        }
        return Label{mask};
    }
    if (tags.size() != 1) return std::nullopt;
    for (std::size_t i = 0; i < element_names_.size(); ++i)
        if (element_names_[i] == tags[0]) return Label{static_cast<std::uint8_t>(i)};
    return std::nullopt;
}

std::optional<Label> LatticeSpec::parse_label(std::string_view text) const {
    // Strip whitespace and the surrounding braces, then split on commas.
    auto strip = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = strip(text);
    if (text.size() < 2 || text.front() != '{' || text.back() != '}') return std::nullopt;
    text = strip(text.substr(1, text.size() - 2));
    std::vector<std::string> tags;
    while (!text.empty()) {
        auto comma = text.find(',');
        std::string_view piece = strip(text.substr(0, comma));
        if (piece.empty()) return std::nullopt;
        tags.emplace_back(piece);
        if (comma == std::string_view::npos) break;
        text = text.substr(comma + 1);
        if (strip(text).empty()) return std::nullopt;  // trailing comma
        text = strip(text);
    }
    return resolve_tags(tags);
}

std::string LatticeSpec::show(Label l) const {
    check_element(l);
    if (powerset_) {
        std::string out = "{";
        bool first = true;
        for (std::size_t i = 0; i < tags_.size(); ++i) {
            if (l.id & (1u << i)) {
                if (!first) out += ",";
                out += tags_[i];
                first = false;
            }
        }
        out += "}";
        return out;
    }
    if (l == bot_) return "{}";
    return "{" + element_names_[l.id] + "}";
}

std::string LatticeSpec::show_or_bot(Label l) const {
    if (l == bot_) return "bot";
    return show(l);
}

}  // namespace llmbda
