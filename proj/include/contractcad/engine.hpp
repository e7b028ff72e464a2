#pragma once

#include "contractcad/constraint.hpp"
#include "contractcad/fragment.hpp"
#include "contractcad/model.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ccad {

struct Violation {
    std::string constraint_id;
    ConstraintKind kind = ConstraintKind::Requires;
    std::vector<Atom> atoms;          // sorted
    std::vector<std::string> params;  // sorted
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

enum class GapKind {
    /// Included unit with versions, none selected on it, above or below it.
    MissingSelection,
    /// Included leaf with no versions that no ancestor selection covers.
    UnversionedLeaf,
    /// Exactly-one group with no member included.
    EmptyExclusiveGroup,
    /// Requires rule whose antecedent is the root: a mandatory unit not yet in.
    MandatoryUnitMissing,
    /// Parameter used by a selected template but unbound.
    UnboundParameter,
    /// Parameter named by a defined() rule but unbound.
    RequiredParameter,
};

std::string_view to_string(GapKind kind);

struct Gap {
    GapKind kind = GapKind::MissingSelection;
    std::string subject;        // unit id or parameter name
    std::string constraint_id;  // empty for structural gaps
    std::string message;

    friend bool operator==(const Gap&, const Gap&) = default;
};

struct CheckReport {
    std::vector<Violation> violations;  // ordered by constraint id
    std::vector<Gap> gaps;              // ordered by kind, subject, constraint id
    std::uint64_t revision = 0;         // instance revision the report describes
    /// Set by check_incremental when it had to fall back to a full check.
    bool full_recheck = false;

    bool clean() const noexcept { return violations.empty() && gaps.empty(); }
};

/// Findings and revision equal; the full_recheck flag is metadata.
bool same_findings(const CheckReport& a, const CheckReport& b);

/// Read-only evaluation context for one generic document: authored plus
/// derived constraints, the atom/parameter -> constraint index, parsed
/// templates and tree navigation. Built once, shared between sessions.
class CheckContext {
public:
    explicit CheckContext(std::shared_ptr<const GenericDocument> doc);

    static std::shared_ptr<const CheckContext> build(GenericDocument doc);

    const GenericDocument& doc() const noexcept { return *doc_; }
    const std::shared_ptr<const GenericDocument>& doc_ptr() const noexcept { return doc_; }

    /// Authored and derived constraints sorted by id.
    const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
    const std::vector<AuthoringFault>& authoring_faults() const noexcept { return authoring_faults_; }
    const Constraint* find_constraint(std::string_view id) const;

    const std::string& root() const noexcept { return doc_->root_id; }
    const std::string* parent(std::string_view unit_id) const;
    const std::vector<std::string>& children(std::string_view unit_id) const;
    std::vector<std::string> ancestors(std::string_view unit_id) const;    // nearest first
    std::vector<std::string> descendants(std::string_view unit_id) const;  // preorder
    /// Units in depth-first preorder from the root.
    const std::vector<std::string>& preorder() const noexcept { return preorder_; }
    bool is_ancestor(std::string_view ancestor, std::string_view unit_id) const;
    bool has_unit(std::string_view unit_id) const { return parents_.contains(std::string(unit_id)); }

    const Version* version(std::string_view version_id) const;
    const Template& template_of(std::string_view version_id) const;
    const std::set<std::string>& template_params(std::string_view version_id) const;
    const std::map<std::string, ParamType>& param_types() const noexcept { return param_types_; }

    /// Indices into constraints() reading the given atom / parameter.
    const std::vector<std::size_t>& constraints_on(const Atom& atom) const;
    const std::vector<std::size_t>& constraints_on_param(std::string_view name) const;

    /// "'<heading>' [<id>]" used in messages.
    std::string describe_unit(std::string_view unit_id) const;
    std::string describe_atom(const Atom& atom) const;

private:
    std::shared_ptr<const GenericDocument> doc_;
    std::vector<Constraint> constraints_;
    std::vector<AuthoringFault> authoring_faults_;
    std::map<std::string, std::size_t> constraint_pos_;
    std::map<std::string, std::string> parents_;  // root maps to ""
    std::vector<std::string> preorder_;
    std::map<std::string, const Version*> versions_;
    std::map<std::string, Template> templates_;
    std::map<std::string, std::set<std::string>> template_params_;
    std::map<std::string, ParamType> param_types_;
    std::map<Atom, std::vector<std::size_t>> atom_index_;
    std::map<std::string, std::vector<std::size_t>> param_index_;
};

// ---------------------------------------------------------------------------
// Deltas

struct Delta {
    enum class Op { Include, Exclude, Select, Deselect, Bind, Unbind };
    Op op = Op::Include;
    std::string target;  // unit id, or parameter name for Bind/Unbind
    std::string version;
    std::optional<ParamValue> value;

    static Delta include(std::string unit) { return {Op::Include, std::move(unit), {}, {}}; }
    static Delta exclude(std::string unit) { return {Op::Exclude, std::move(unit), {}, {}}; }
    static Delta select(std::string unit, std::string version) { return {Op::Select, std::move(unit), std::move(version), {}}; }
    static Delta deselect(std::string unit) { return {Op::Deselect, std::move(unit), {}, {}}; }
    static Delta bind(std::string param, ParamValue value) { return {Op::Bind, std::move(param), {}, std::move(value)}; }
    static Delta unbind(std::string param) { return {Op::Unbind, std::move(param), {}, {}}; }

    std::string str() const;

    friend bool operator==(const Delta&, const Delta&) = default;
};

std::string_view to_string(Delta::Op op);
std::optional<Delta::Op> delta_op_from_string(std::string_view text);

/// Throws when the delta is not well-typed against the document.
void validate_delta(const CheckContext& ctx, const DocumentInstance& instance, const Delta& delta);

/// Applies a delta verbatim (no enforcement): Include adds ancestors,
/// Exclude removes descendants and their selections. Bumps the revision.
void apply_delta(const CheckContext& ctx, DocumentInstance& instance, const Delta& delta);

// ---------------------------------------------------------------------------
// Checking

CheckReport check_full(const CheckContext& ctx, const DocumentInstance& instance);

/// `instance` is the state after `delta`; `prev` the report for the state
/// before it. Re-evaluates only what the delta can affect. When prev's
/// revision is not exactly one behind, falls back to check_full and sets
/// full_recheck.
CheckReport check_incremental(const CheckContext& ctx, const DocumentInstance& instance, const Delta& delta,
                              const CheckReport& prev);

/// Several deltas applied as one edit (an enforced include and its side
/// effects); the instance revision moved by exactly one.
CheckReport check_incremental(const CheckContext& ctx, const DocumentInstance& instance,
                              std::span<const Delta> deltas, const CheckReport& prev);

// ---------------------------------------------------------------------------
// Enforcement

/// One derivation step. An empty constraint id marks containment: the unit
/// was added because a descendant was.
struct ChainStep {
    std::string constraint_id;
    Atom atom;

    friend bool operator==(const ChainStep&, const ChainStep&) = default;
};

struct Contradiction {
    std::string constraint_id;
    std::vector<ChainStep> chain;

    friend bool operator==(const Contradiction&, const Contradiction&) = default;
};

struct EnforceResult {
    std::set<std::string> added;  // units newly included, trigger included
    std::optional<Contradiction> contradiction;

    bool ok() const noexcept { return !contradiction; }

    friend bool operator==(const EnforceResult&, const EnforceResult&) = default;
};

/// Least fixpoint of Requires consequents (plus containment) reachable from
/// including `unit_id`. Does not modify anything.
EnforceResult plan_enforce_include(const CheckContext& ctx, const DocumentInstance& instance, std::string_view unit_id);

/// Same closure seeded by selecting `version_id` for its (included) unit.
EnforceResult plan_enforce_select(const CheckContext& ctx, const DocumentInstance& instance,
                                  std::string_view version_id);

/// plan_enforce_include, then on success includes every added unit. On
/// contradiction the instance is left unchanged.
EnforceResult enforce_include(const CheckContext& ctx, DocumentInstance& instance, std::string_view unit_id);

// ---------------------------------------------------------------------------
// Satisfiability

struct SatLimits {
    std::size_t max_units = 40;            // excluding the root
    std::size_t max_versioned_units = 25;
};

struct SatResult {
    enum class Status { Satisfiable, Unsatisfiable, TooLarge };
    Status status = Status::Unsatisfiable;
    std::optional<DocumentInstance> witness;
};

/// Backtracking search for a complete instance with no violations of
/// Requires/Excludes/ExactlyOne and no structural gaps. Parameter rules and
/// parameter gaps are ignored.
SatResult satisfiable(const CheckContext& ctx, const SatLimits& limits = {});

/// True for gaps satisfiable() is responsible for (everything except the
/// parameter-binding gaps).
bool structural_gap(const Gap& gap);

// ---------------------------------------------------------------------------
// Explanations

/// One paragraph on violation `index` of `report`: constraint origin,
/// involved unit headings (labelled against `instance`), parameter values.
/// Throws Error(BadIndex).
std::string explain(const CheckContext& ctx, const DocumentInstance& instance, const CheckReport& report,
                    std::size_t index);

/// Requirement chain of a contradiction as text.
std::string explain(const CheckContext& ctx, const Contradiction& contradiction);

} // namespace ccad
