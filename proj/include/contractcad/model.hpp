#pragma once

#include "contractcad/constraint.hpp"
#include "contractcad/value.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ccad {

/// Structural level of a unit. Ranks increase from Document (0) to
/// Sentence (4); a child always has a strictly greater rank than its parent.
enum class UnitKind { Document, Part, Section, Provision, Sentence };

constexpr int rank(UnitKind kind) noexcept { return static_cast<int>(kind); }
std::string_view to_string(UnitKind kind);
std::optional<UnitKind> unit_kind_from_string(std::string_view text);

/// What a provision does, as metadata for drafters.
enum class RoleTag { Definition, Prescription, Procedure, Formula, SecondaryCondition };

std::string_view to_string(RoleTag tag);
std::optional<RoleTag> role_tag_from_string(std::string_view text);

struct Unit {
    std::string id;
    UnitKind kind = UnitKind::Section;
    std::string heading;
    std::vector<std::string> children;
    std::set<RoleTag> roles;

    friend bool operator==(const Unit&, const Unit&) = default;
};

struct ParameterDecl {
    std::string name;
    ParamType type;
    std::string description;

    friend bool operator==(const ParameterDecl&, const ParameterDecl&) = default;
};

/// One text rendering of a unit. `source` is raw template text.
struct Version {
    std::string id;
    std::string unit_id;
    std::string source;
    std::string rationale;
    std::string provenance;
    std::optional<std::string> derived_from;
    std::string created_at;  // caller-supplied, compared lexically

    friend bool operator==(const Version&, const Version&) = default;
};

inline constexpr int kSchemaVersion = 1;

/// A class of contracts: unit tree, versions, parameters, authored
/// constraints. Plain value type; copies are independent snapshots.
struct GenericDocument {
    std::string id;
    std::string title;
    int schema_version = kSchemaVersion;
    std::string root_id;
    std::map<std::string, Unit> units;
    /// unit id -> versions in insertion order. Append-only.
    std::map<std::string, std::vector<Version>> versions;
    std::vector<ParameterDecl> parameters;
    std::vector<Constraint> constraints;

    static GenericDocument create(std::string id, std::string title, std::string root_id = "root");

    const Unit& unit(std::string_view unit_id) const;
    bool has_unit(std::string_view unit_id) const { return units.find(std::string(unit_id)) != units.end(); }
    const std::vector<Version>& versions_of(std::string_view unit_id) const;
    const Version* find_version(std::string_view version_id) const;
    const ParameterDecl* find_parameter(std::string_view name) const;
    const Constraint* find_constraint(std::string_view constraint_id) const;
    std::optional<std::string> parent_of(std::string_view unit_id) const;

    friend bool operator==(const GenericDocument&, const GenericDocument&) = default;
};

enum class Mode { Notify, Enforce };

std::string_view to_string(Mode mode);
std::optional<Mode> mode_from_string(std::string_view text);

/// One contract drafted from a generic document.
struct DocumentInstance {
    std::string id;
    std::string generic_id;
    int generic_schema_version = kSchemaVersion;
    std::set<std::string> included;
    std::map<std::string, std::string> selections;  // unit id -> version id
    Bindings bindings;
    Mode mode = Mode::Notify;
    /// Bumped by every applied edit; lets checkers detect stale reports.
    std::uint64_t revision = 0;

    /// Instance containing only the root unit.
    static DocumentInstance create(const GenericDocument& doc, std::string id, Mode mode = Mode::Notify);

    bool includes(std::string_view unit_id) const { return included.find(std::string(unit_id)) != included.end(); }

    friend bool operator==(const DocumentInstance&, const DocumentInstance&) = default;
};

/// Content equality: everything except the revision counter.
bool same_content(const DocumentInstance& a, const DocumentInstance& b);

// ---------------------------------------------------------------------------
// Identifiers

/// Unit ids and parameter names: [A-Za-z0-9_-]+ (they appear inside
/// template markers).
bool is_valid_name(std::string_view text);
/// Document, version, constraint and instance ids: [A-Za-z0-9_.:-]+.
bool is_valid_id(std::string_view text);

// ---------------------------------------------------------------------------
// Authoring operations. Each either succeeds completely or throws ccad::Error
// leaving the document untouched.

/// Inserts a unit under `parent_id` at `position`. When `unit_id` is empty a
/// fresh "u<N>" id is chosen.
std::string add_unit(GenericDocument& doc, std::string_view parent_id, UnitKind kind, std::string heading,
                     std::size_t position, std::string unit_id = {}, std::set<RoleTag> roles = {});

/// add_unit at the end of the parent's child list.
std::string append_unit(GenericDocument& doc, std::string_view parent_id, UnitKind kind, std::string heading,
                        std::string unit_id = {}, std::set<RoleTag> roles = {});

struct VersionSpec {
    std::string source;
    std::string rationale;
    std::string provenance;
    std::optional<std::string> derived_from;
    std::string id;          // default "<unit>:v<N>"
    std::string created_at;
};

std::string add_version(GenericDocument& doc, std::string_view unit_id, VersionSpec spec);

void declare_parameter(GenericDocument& doc, ParameterDecl decl);

/// Validates atoms, parameter types and shape; returns the constraint id
/// (default "c<N>").
std::string add_constraint(GenericDocument& doc, Constraint constraint);

// ---------------------------------------------------------------------------
// Labels and structure

struct LabelScheme {
    std::string separator = "-";
};

/// 1-based ordinals along the path from the root (root excluded). With an
/// instance only included siblings are counted.
std::string unit_label(const GenericDocument& doc, const DocumentInstance* instance, std::string_view unit_id,
                       const LabelScheme& scheme = {});

struct StructureFault {
    enum class Kind {
        BadId,
        MissingRoot,
        RootNotDocument,
        DanglingChild,
        DuplicateChild,
        MultipleParents,
        Cycle,
        Unreachable,
        RankInversion,
        UnknownVersionUnit,
        DuplicateVersionId,
        LineageMismatch,
        LineageCycle,
        MissingRationale,
        TemplateParse,
        DuplicateParameter,
        EmptyEnum,
        DuplicateConstraint,
        DanglingConstraint,
        InvalidConstraint,
    };
    Kind kind;
    std::string subject;
    std::string message;

    friend bool operator==(const StructureFault&, const StructureFault&) = default;
};

std::string_view to_string(StructureFault::Kind kind);

/// All invariant violations of the generic document; empty iff valid.
std::vector<StructureFault> validate_structure(const GenericDocument& doc);

/// Instance invariants against its generic document (ancestor closure,
/// selection ownership, binding types). Empty iff the instance is valid.
std::vector<std::string> validate_instance(const GenericDocument& doc, const DocumentInstance& instance);

} // namespace ccad
