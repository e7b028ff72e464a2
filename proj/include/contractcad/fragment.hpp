#pragma once

#include "contractcad/constraint.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ccad {

struct GenericDocument;

struct Literal {
    std::string text;
    friend bool operator==(const Literal&, const Literal&) = default;
};

struct ParamSlot {
    std::string name;
    friend bool operator==(const ParamSlot&, const ParamSlot&) = default;
};

struct CrossRef {
    std::string target;  // unit id
    friend bool operator==(const CrossRef&, const CrossRef&) = default;
};

using TemplateNode = std::variant<Literal, ParamSlot, CrossRef>;

/// Parsed fragment text. Markers are `{{param NAME}}` and `{{ref UNIT}}`;
/// `\{{` is a literal `{{` and `\\` a literal backslash.
struct Template {
    std::vector<TemplateNode> nodes;

    /// Re-escaped source text.
    std::string serialize() const;
    /// Parameter names referenced, sorted and unique.
    std::set<std::string> parameters() const;

    friend bool operator==(const Template&, const Template&) = default;
};

struct ParseFault {
    enum class Kind {
        UnterminatedMarker,
        UnknownEscape,
        EmptyName,
        /// `{{` not followed by `param ` or `ref `, or a bare `{` directly
        /// before `\{{`; both would make the source ambiguous to re-escape.
        UnknownMarker,
    };
    std::size_t offset = 0;
    Kind kind = Kind::UnterminatedMarker;

    friend bool operator==(const ParseFault&, const ParseFault&) = default;
};

std::string_view to_string(ParseFault::Kind kind);

/// Either a template or the faults found; never both.
struct TemplateParse {
    std::optional<Template> value;
    std::vector<ParseFault> faults;

    explicit operator bool() const noexcept { return value.has_value(); }
};

TemplateParse parse_template(std::string_view source);

/// Parses or throws Error(TemplateParse) describing the first fault.
Template parse_template_or_throw(std::string_view source);

/// Cross-reference targets, deduplicated.
std::set<std::string> extract_crossrefs(const Template& tmpl);

struct AuthoringFault {
    std::string version_id;
    std::string target;
    std::string message;

    friend bool operator==(const AuthoringFault&, const AuthoringFault&) = default;
};

struct DerivedConstraints {
    std::vector<Constraint> constraints;
    std::vector<AuthoringFault> faults;
};

/// Id of the textual-dependency constraint for `version_id` -> `target`.
std::string textual_constraint_id(std::string_view version_id, std::string_view target);

/// One Requires(version selected => target included) per cross-reference to
/// another unit, ordered by unit id, version id, target id. References to
/// unknown units become authoring faults.
DerivedConstraints derive_textual_constraints(const GenericDocument& doc);

/// Maps a unit id to its label, or nullopt when the unit is not part of the
/// instance being rendered.
using Labeler = std::function<std::optional<std::string>(std::string_view unit_id)>;

struct FragmentOptions {
    /// Render unbound parameters as ⟨unbound:NAME⟩ instead of failing.
    bool placeholders = false;
};

/// Substitutes bound values (canonical text) and cross-reference labels.
/// Throws Error(UnboundParameter) or Error(DanglingReference).
std::string render_fragment(const Template& tmpl, const Bindings& bindings, const Labeler& labeler,
                            const FragmentOptions& options = {});

} // namespace ccad
