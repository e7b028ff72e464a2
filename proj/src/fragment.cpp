#include "contractcad/fragment.hpp"

#include "contractcad/error.hpp"
#include "contractcad/model.hpp"

#include <algorithm>
#include <cctype>

namespace ccad {

std::string_view to_string(ParseFault::Kind kind) {
    switch (kind) {
    case ParseFault::Kind::UnterminatedMarker: return "unterminated-marker";
    case ParseFault::Kind::UnknownEscape: return "unknown-escape";
    case ParseFault::Kind::EmptyName: return "empty-name";
    case ParseFault::Kind::UnknownMarker: return "unknown-marker";
    }
    return "unterminated-marker";
}

namespace {

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class TemplateScanner {
public:
    explicit TemplateScanner(std::string_view src) : src_(src) {}

    TemplateParse run() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\\') {
                escape();
            } else if (at("{{")) {
                marker();
            } else if (c == '{' && src_.substr(pos_ + 1).starts_with("\\{{")) {
                fault(ParseFault::Kind::UnknownMarker, pos_);
                ++pos_;
            } else {
                literal_ += c;
                ++pos_;
            }
        }
        flush();
        TemplateParse result;
        if (faults_.empty()) result.value = Template{std::move(nodes_)};
        else result.faults = std::move(faults_);
        return result;
    }

private:
    bool at(std::string_view token, std::size_t where) const { return src_.substr(where).starts_with(token); }
    bool at(std::string_view token) const { return at(token, pos_); }

    void fault(ParseFault::Kind kind, std::size_t offset) { faults_.push_back({offset, kind}); }

    void flush() {
        if (!literal_.empty()) nodes_.emplace_back(Literal{std::move(literal_)});
        literal_.clear();
    }

    void escape() {
        if (at("\\{{")) {
            literal_ += "{{";
            pos_ += 3;
        } else if (at("\\\\")) {
            literal_ += '\\';
            pos_ += 2;
        } else {
            fault(ParseFault::Kind::UnknownEscape, pos_);
            ++pos_;
        }
    }

    // Resume after the next "}}" (or at the end) once a marker is known bad.
    void skip_marker(std::size_t from) {
        const auto close = src_.find("}}", from);
        pos_ = close == std::string_view::npos ? src_.size() : close + 2;
    }

    void marker() {
        const std::size_t start = pos_;
        const std::size_t body = pos_ + 2;
        std::size_t after = 0;
        bool is_param = false;
        if (at("param", body)) {
            is_param = true;
            after = body + 5;
        } else if (at("ref", body)) {
            after = body + 3;
        } else {
            fault(ParseFault::Kind::UnknownMarker, start);
            pos_ += 2;
            return;
        }
        if (at("}}", after)) {
            fault(ParseFault::Kind::EmptyName, start);
            pos_ = after + 2;
            return;
        }
        if (after >= src_.size() || src_[after] != ' ') {
            if (after >= src_.size()) {
                fault(ParseFault::Kind::UnterminatedMarker, start);
                pos_ = src_.size();
            } else {
                fault(ParseFault::Kind::UnknownMarker, start);
                pos_ += 2;
            }
            return;
        }
        std::size_t name_end = after + 1;
        while (name_end < src_.size() && is_name_char(src_[name_end])) ++name_end;
        if (name_end == after + 1) {
            fault(ParseFault::Kind::EmptyName, start);
            skip_marker(name_end);
            return;
        }
        if (!at("}}", name_end)) {
            fault(ParseFault::Kind::UnterminatedMarker, start);
            skip_marker(name_end);
            return;
        }
        flush();
        std::string name(src_.substr(after + 1, name_end - after - 1));
        if (is_param) nodes_.emplace_back(ParamSlot{std::move(name)});
        else nodes_.emplace_back(CrossRef{std::move(name)});
        pos_ = name_end + 2;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::string literal_;
    std::vector<TemplateNode> nodes_;
    std::vector<ParseFault> faults_;
};

void escape_literal(std::string& out, std::string_view text) {
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '\\') {
            out += "\\\\";
            ++i;
        } else if (text.substr(i).starts_with("{{")) {
            out += "\\{{";
            i += 2;
        } else {
            out += text[i++];
        }
    }
}

} // namespace

TemplateParse parse_template(std::string_view source) { return TemplateScanner(source).run(); }

Template parse_template_or_throw(std::string_view source) {
    auto parsed = parse_template(source);
    if (!parsed) {
        const auto& f = parsed.faults.front();
        throw Error(ErrorKind::TemplateParse, "template fault " + std::string(to_string(f.kind)) + " at offset " +
                                                  std::to_string(f.offset));
    }
    return std::move(*parsed.value);
}

std::string Template::serialize() const {
    std::string out;
    for (const auto& node : nodes) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Literal>) escape_literal(out, n.text);
                else if constexpr (std::is_same_v<T, ParamSlot>) out += "{{param " + n.name + "}}";
                else out += "{{ref " + n.target + "}}";
            },
            node);
    }
    return out;
}

std::set<std::string> Template::parameters() const {
    std::set<std::string> names;
    for (const auto& node : nodes)
        if (const auto* slot = std::get_if<ParamSlot>(&node)) names.insert(slot->name);
    return names;
}

std::set<std::string> extract_crossrefs(const Template& tmpl) {
    std::set<std::string> targets;
    for (const auto& node : tmpl.nodes)
        if (const auto* ref = std::get_if<CrossRef>(&node)) targets.insert(ref->target);
    return targets;
}

std::string textual_constraint_id(std::string_view version_id, std::string_view target) {
    return "xref:" + std::string(version_id) + "->" + std::string(target);
}

DerivedConstraints derive_textual_constraints(const GenericDocument& doc) {
    DerivedConstraints out;
    for (const auto& [unit_id, versions] : doc.versions) {
        std::vector<const Version*> ordered;
        for (const auto& v : versions) ordered.push_back(&v);
        std::sort(ordered.begin(), ordered.end(), [](const Version* a, const Version* b) { return a->id < b->id; });
        for (const Version* v : ordered) {
            const auto tmpl = parse_template_or_throw(v->source);
            for (const auto& target : extract_crossrefs(tmpl)) {
                if (target == unit_id) continue;
                if (!doc.has_unit(target)) {
                    out.faults.push_back({v->id, target,
                                          "version " + v->id + " cross-references unknown unit '" + target + "'"});
                    continue;
                }
                Constraint c;
                c.id = textual_constraint_id(v->id, target);
                c.body = RequiresRule{Atom::version(v->id), target};
                c.origin = Origin::DerivedTextual;
                c.source_version = v->id;
                out.constraints.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::string render_fragment(const Template& tmpl, const Bindings& bindings, const Labeler& labeler,
                            const FragmentOptions& options) {
    std::string out;
    for (const auto& node : tmpl.nodes) {
        if (const auto* lit = std::get_if<Literal>(&node)) {
            out += lit->text;
        } else if (const auto* slot = std::get_if<ParamSlot>(&node)) {
            if (auto it = bindings.find(slot->name); it != bindings.end()) out += it->second.canonical();
            else if (options.placeholders) out += "⟨unbound:" + slot->name + "⟩";
            else throw Error(ErrorKind::UnboundParameter, "parameter '" + slot->name + "' is not bound");
        } else {
            const auto& ref = std::get<CrossRef>(node);
            auto label = labeler(ref.target);
            if (!label)
                throw Error(ErrorKind::DanglingReference,
                            "cross-reference to '" + ref.target + "' which is not included");
            out += *label;
        }
    }
    return out;
}

} // namespace ccad
