#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trajkit/errors.hpp"

namespace trajkit {

enum class diagram_kind { sequence_diagram, class_diagram };

inline const char* to_string(diagram_kind d) {
    return d == diagram_kind::sequence_diagram ? "SequenceDiagram" : "ClassDiagram";
}

/// One row of the stereotype vocabulary. The stereotype is stored without
/// guillemets but otherwise byte-exact, including any internal spacing or
/// casing quirks; normalization happens only while matching.
struct stereotype_entry {
    std::string element;
    std::string stereotype;
    diagram_kind diagram;

    friend bool operator==(const stereotype_entry&, const stereotype_entry&) = default;
};

struct profile_document {
    std::string name;
    std::vector<stereotype_entry> entries;
};

/// The Trajectory-UML vocabulary: 4 sequence-diagram entries followed by
/// 11 class-diagram entries, in source order.
inline const profile_document& trajectory_uml_profile() {
    static const profile_document doc = {
        "Trajectory-UML",
        {
            {"doctor", "MEDICALSTAFF", diagram_kind::sequence_diagram},
            {"patient", "SUFFERING", diagram_kind::sequence_diagram},
            {"Ulpda", "userInterface", diagram_kind::sequence_diagram},
            {"Control pda", "management", diagram_kind::sequence_diagram},
            {"Trajectory", "trajectory", diagram_kind::class_diagram},
            {"Trajectory-section", "trajectory-section", diagram_kind::class_diagram},
            {"Stop", "stop", diagram_kind::class_diagram},
            {"Move", "move", diagram_kind::class_diagram},
            {"Pda", "pda", diagram_kind::class_diagram},
            {"Gps", "gps data", diagram_kind::class_diagram},
            {"Location", "surface", diagram_kind::class_diagram},
            {"Mobile hospital", "moving object", diagram_kind::class_diagram},
            {"Doctor/nurse", " Medical staff ", diagram_kind::class_diagram},
            {"Driver/manager", "actor", diagram_kind::class_diagram},
            {"Patient", "suffering", diagram_kind::class_diagram},
        },
    };
    return doc;
}

enum class export_format { table_text, structured };

namespace detail {

inline std::string guillemets(const std::string& inner) {
    return "«" + inner + "»";
}

/// Matching normalization: trim ASCII whitespace, fold ASCII case.
inline std::string normalize_stereotype(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string out;
    out.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[i]))));
    }
    return out;
}

} // namespace detail

/// Serializes the vocabulary; stable ordering, sequence-diagram rows first.
/// The structured format is one tab-separated record per entry.
inline std::string export_profile(export_format format = export_format::structured,
                                  const profile_document& doc = trajectory_uml_profile()) {
    std::string out;
    if (format == export_format::structured) {
        for (const auto& e : doc.entries) {
            out += e.element;
            out += '\t';
            out += detail::guillemets(e.stereotype);
            out += '\t';
            out += to_string(e.diagram);
            out += '\n';
        }
        return out;
    }
    out += doc.name + "\n";
    for (auto diagram : {diagram_kind::sequence_diagram, diagram_kind::class_diagram}) {
        out += diagram == diagram_kind::sequence_diagram ? "Trajectory data sequence diagram:\n"
                                                         : "Trajectory data class diagram:\n";
        std::size_t width = 0;
        for (const auto& e : doc.entries) {
            if (e.diagram == diagram) width = std::max(width, e.element.size());
        }
        for (const auto& e : doc.entries) {
            if (e.diagram != diagram) continue;
            out += "  " + e.element + std::string(width - e.element.size() + 2, ' ') +
                   detail::guillemets(e.stereotype) + "\n";
        }
    }
    return out;
}

/// Multiplicity of a composition edge: N, N..M, N..*, or *.
struct multiplicity {
    unsigned lower = 1;
    std::optional<unsigned> upper = 1; // nullopt = unbounded

    std::string text() const {
        if (!upper) return lower == 0 ? "*" : std::to_string(lower) + "..*";
        if (*upper == lower) return std::to_string(lower);
        return std::to_string(lower) + ".." + std::to_string(*upper);
    }

    friend bool operator==(const multiplicity&, const multiplicity&) = default;
};

struct model_element {
    std::string id;
    std::string name;
    std::string stereotype; // without guillemets
    std::size_t line = 0;

    friend bool operator==(const model_element& a, const model_element& b) {
        return a.id == b.id && a.name == b.name && a.stereotype == b.stereotype;
    }
};

struct model_composition {
    std::string whole;
    std::string part;
    multiplicity mult;
    std::size_t line = 0;

    friend bool operator==(const model_composition& a, const model_composition& b) {
        return a.whole == b.whole && a.part == b.part && a.mult == b.mult;
    }
};

struct model_association {
    std::string a;
    std::string b;
    std::string label;
    std::size_t line = 0;

    friend bool operator==(const model_association& x, const model_association& y) {
        return x.a == y.a && x.b == y.b && x.label == y.label;
    }
};

/// A parsed model document: stereotyped elements plus composition and
/// association edges. Ids are unique and the composition graph is acyclic.
struct stereotyped_model {
    std::vector<model_element> elements;
    std::vector<model_composition> compositions;
    std::vector<model_association> associations;

    const model_element* find(std::string_view id) const {
        for (const auto& e : elements) {
            if (e.id == id) return &e;
        }
        return nullptr;
    }

    friend bool operator==(const stereotyped_model& a, const stereotyped_model& b) {
        return a.elements == b.elements && a.compositions == b.compositions &&
               a.associations == b.associations;
    }
};

namespace detail {

class model_parser {
public:
    explicit model_parser(std::string_view text) : text_(text) {}

    stereotyped_model run() {
        stereotyped_model m;
        std::size_t pos = 0;
        line_no_ = 0;
        while (pos <= text_.size()) {
            const std::size_t eol = text_.find('\n', pos);
            std::string_view line = text_.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                                    : eol - pos);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            ++line_no_;
            parse_line(line, m);
            if (eol == std::string_view::npos) break;
            pos = eol + 1;
        }
        check_references(m);
        check_acyclic(m);
        return m;
    }

private:
    void parse_line(std::string_view line, stereotyped_model& m) {
        col_ = 0;
        line_ = line;
        skip_ws();
        if (col_ >= line_.size() || line_[col_] == '#') return;
        const std::size_t kw_col = col_;
        const std::string_view kw = take_word();
        if (kw == "class") {
            parse_class(m);
        } else if (kw == "compose") {
            parse_compose(m);
        } else if (kw == "assoc") {
            parse_assoc(m);
        } else {
            fail(kw_col, "expected 'class', 'compose' or 'assoc'");
        }
        skip_ws();
        if (col_ < line_.size()) fail(col_, "unexpected trailing text");
    }

    void parse_class(stereotyped_model& m) {
        const std::string id = expect_identifier("class id");
        skip_ws();
        std::string name = id;
        if (col_ < line_.size() && line_[col_] == '"') name = take_quoted();
        skip_ws();
        const std::string stereotype = take_guillemets();
        for (const auto& e : m.elements) {
            if (e.id == id) throw duplicate_id_error(line_no_, id);
        }
        m.elements.push_back({id, name, stereotype, line_no_});
    }

    void parse_compose(stereotyped_model& m) {
        const std::string whole = expect_identifier("whole id");
        const std::string part = expect_identifier("part id");
        const multiplicity mult = take_multiplicity();
        m.compositions.push_back({whole, part, mult, line_no_});
    }

    void parse_assoc(stereotyped_model& m) {
        const std::string a = expect_identifier("element id");
        const std::string b = expect_identifier("element id");
        skip_ws();
        std::string label;
        if (col_ < line_.size() && line_[col_] == '"') label = take_quoted();
        m.associations.push_back({a, b, label, line_no_});
    }

    void check_references(const stereotyped_model& m) const {
        for (const auto& c : m.compositions) {
            if (!m.find(c.whole)) throw unknown_element_error(c.line, c.whole);
            if (!m.find(c.part)) throw unknown_element_error(c.line, c.part);
        }
        for (const auto& a : m.associations) {
            if (!m.find(a.a)) throw unknown_element_error(a.line, a.a);
            if (!m.find(a.b)) throw unknown_element_error(a.line, a.b);
        }
    }

    void check_acyclic(const stereotyped_model& m) const {
        std::map<std::string, std::vector<std::string>> parts;
        for (const auto& c : m.compositions) parts[c.whole].push_back(c.part);
        std::map<std::string, int> mark; // 0 new, 1 on stack, 2 done
        std::vector<std::string> stack;
        for (const auto& e : m.elements) {
            if (mark[e.id] == 0) visit(e.id, parts, mark, stack);
        }
    }

    void visit(const std::string& id, const std::map<std::string, std::vector<std::string>>& parts,
               std::map<std::string, int>& mark, std::vector<std::string>& stack) const {
        mark[id] = 1;
        stack.push_back(id);
        const auto it = parts.find(id);
        if (it != parts.end()) {
            for (const auto& next : it->second) {
                if (mark[next] == 1) {
                    std::string cycle;
                    for (const auto& s : stack) cycle += s + " -> ";
                    throw composition_cycle_error("composition cycle: " + cycle + next);
                }
                if (mark[next] == 0) visit(next, parts, mark, stack);
            }
        }
        stack.pop_back();
        mark[id] = 2;
    }

    // -- lexing helpers; col_ is a 0-based byte offset into the line ------

    [[noreturn]] void fail(std::size_t col, const std::string& what) const {
        throw syntax_error(line_no_, col + 1, what);
    }

    void skip_ws() {
        while (col_ < line_.size() && (line_[col_] == ' ' || line_[col_] == '\t')) ++col_;
    }

    std::string_view take_word() {
        const std::size_t start = col_;
        while (col_ < line_.size() && line_[col_] != ' ' && line_[col_] != '\t') ++col_;
        return line_.substr(start, col_ - start);
    }

    static bool id_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }

    static bool id_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::string expect_identifier(const std::string& what) {
        skip_ws();
        if (col_ >= line_.size() || !id_start(line_[col_])) fail(col_, "expected " + what);
        const std::size_t start = col_;
        while (col_ < line_.size() && id_char(line_[col_])) ++col_;
        return std::string(line_.substr(start, col_ - start));
    }

    std::string take_quoted() {
        const std::size_t open = col_;
        ++col_; // consume the opening quote
        const std::size_t close = line_.find('"', col_);
        if (close == std::string_view::npos) fail(open, "unterminated string");
        std::string out(line_.substr(col_, close - col_));
        col_ = close + 1;
        return out;
    }

    std::string take_guillemets() {
        static constexpr std::string_view open_g = "«";
        static constexpr std::string_view close_g = "»";
        if (col_ >= line_.size() || line_.substr(col_).substr(0, open_g.size()) != open_g) {
            fail(col_, "expected «-quoted stereotype");
        }
        const std::size_t open = col_;
        col_ += open_g.size();
        const std::size_t close = line_.find(close_g, col_);
        if (close == std::string_view::npos) fail(open, "unterminated stereotype quote");
        std::string out(line_.substr(col_, close - col_));
        col_ = close + close_g.size();
        return out;
    }

    multiplicity take_multiplicity() {
        skip_ws();
        const std::size_t start = col_;
        const std::string_view tok = take_word();
        if (tok.empty()) fail(start, "expected multiplicity");
        const auto number = [&](std::string_view s) -> std::optional<unsigned> {
            if (s.empty()) return std::nullopt;
            unsigned v = 0;
            for (const char c : s) {
                if (c < '0' || c > '9') return std::nullopt;
                v = v * 10 + static_cast<unsigned>(c - '0');
            }
            return v;
        };
        if (tok == "*") return {0, std::nullopt};
        const std::size_t dots = tok.find("..");
        if (dots == std::string_view::npos) {
            const auto v = number(tok);
            if (!v) fail(start, "malformed multiplicity '" + std::string(tok) + "'");
            return {*v, *v};
        }
        const auto lo = number(tok.substr(0, dots));
        if (!lo) fail(start, "malformed multiplicity '" + std::string(tok) + "'");
        const std::string_view hi_tok = tok.substr(dots + 2);
        if (hi_tok == "*") return {*lo, std::nullopt};
        const auto hi = number(hi_tok);
        if (!hi || *hi < *lo) fail(start, "malformed multiplicity '" + std::string(tok) + "'");
        return {*lo, *hi};
    }

    std::string_view text_;
    std::string_view line_;
    std::size_t line_no_ = 0;
    std::size_t col_ = 0;
};

} // namespace detail

/// Parses the line-oriented model text. Errors carry line/column of the
/// first offending token.
inline stereotyped_model parse_model(std::string_view text) {
    return detail::model_parser(text).run();
}

inline std::string serialize_model(const stereotyped_model& m) {
    std::string out;
    for (const auto& e : m.elements) {
        out += "class " + e.id + " \"" + e.name + "\" " + detail::guillemets(e.stereotype) + "\n";
    }
    for (const auto& c : m.compositions) {
        out += "compose " + c.whole + " " + c.part + " " + c.mult.text() + "\n";
    }
    for (const auto& a : m.associations) {
        out += "assoc " + a.a + " " + a.b;
        if (!a.label.empty()) out += " \"" + a.label + "\"";
        out += "\n";
    }
    return out;
}

struct violation {
    std::string rule; // V1..V5
    std::string element_id;
    std::size_t line;
    std::string message;

    friend bool operator==(const violation&, const violation&) = default;
};

/// Checks stereotype usage (V1) and the meta-model structure rules:
///   V2  every «trajectory» composes at least one «trajectory-section»
///   V3  every «trajectory-section» composes exactly two «stop» and one «move»
///   V4  every «moving object» composes exactly one «trajectory»
///   V5  every «pda» associates with at least one «gps data»
/// Violations are data, not failures.
inline std::vector<violation> validate_model(const stereotyped_model& m,
                                             const profile_document& profile = trajectory_uml_profile()) {
    std::vector<violation> out;
    std::set<std::string> known;
    for (const auto& e : profile.entries) known.insert(detail::normalize_stereotype(e.stereotype));

    const auto norm = [&](const model_element& e) {
        return detail::normalize_stereotype(e.stereotype);
    };

    for (const auto& e : m.elements) {
        if (!known.contains(norm(e))) {
            out.push_back({"V1", e.id, e.line,
                           "stereotype " + detail::guillemets(e.stereotype) + " is not in profile '" +
                               profile.name + "'"});
        }
    }

    // Multiplicity totals per (whole element, normalized part stereotype).
    struct span_count {
        unsigned lower = 0;
        std::optional<unsigned> upper = 0;
    };
    std::map<std::pair<std::string, std::string>, span_count> totals;
    for (const auto& c : m.compositions) {
        const model_element* part = m.find(c.part);
        if (!part) continue; // unreferenced ids cannot occur in parsed models
        auto& t = totals[{c.whole, norm(*part)}];
        t.lower += c.mult.lower;
        if (t.upper && c.mult.upper) {
            *t.upper += *c.mult.upper;
        } else {
            t.upper = std::nullopt;
        }
    }
    const auto total_of = [&](const std::string& whole, const std::string& part_st) {
        const auto it = totals.find({whole, part_st});
        return it == totals.end() ? span_count{} : it->second;
    };
    const auto exactly = [](const span_count& t, unsigned n) {
        return t.upper && t.lower == n && *t.upper == n;
    };

    for (const auto& e : m.elements) {
        const std::string st = norm(e);
        if (st == "trajectory") {
            if (total_of(e.id, "trajectory-section").lower < 1) {
                out.push_back({"V2", e.id, e.line,
                               "trajectory '" + e.id + "' must compose at least one trajectory-section"});
            }
        } else if (st == "trajectory-section") {
            if (!exactly(total_of(e.id, "stop"), 2)) {
                out.push_back({"V3", e.id, e.line,
                               "trajectory-section '" + e.id + "' must compose exactly two stops"});
            }
            if (!exactly(total_of(e.id, "move"), 1)) {
                out.push_back({"V3", e.id, e.line,
                               "trajectory-section '" + e.id + "' must compose exactly one move"});
            }
        } else if (st == "moving object") {
            if (!exactly(total_of(e.id, "trajectory"), 1)) {
                out.push_back({"V4", e.id, e.line,
                               "moving object '" + e.id + "' must compose exactly one trajectory"});
            }
        } else if (st == "pda") {
            bool linked = false;
            for (const auto& a : m.associations) {
                const std::string& other = a.a == e.id ? a.b : (a.b == e.id ? a.a : e.id);
                if (other == e.id) continue;
                if (const model_element* o = m.find(other); o && norm(*o) == "gps data") {
                    linked = true;
                    break;
                }
            }
            if (!linked) {
                out.push_back({"V5", e.id, e.line,
                               "pda '" + e.id + "' must associate with at least one gps data element"});
            }
        }
    }
    return out;
}

} // namespace trajkit
