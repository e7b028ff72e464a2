#pragma once

#include "contractcad/engine.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace ccad {

struct Applied {
    CheckReport report;
    std::set<std::string> side_effects;  // units included besides the trigger
};

struct Blocked {
    std::string reason;
    std::optional<Contradiction> contradiction;
};

using EditOutcome = std::variant<Applied, Blocked>;

struct UndoEntry {
    Delta delta;
    std::set<std::string> side_effects;
    DocumentInstance before;
    CheckReport report_before;
};

/// Immutable snapshot of a complete, consistent instance together with the
/// hash of the generic document it was drafted against.
class FinalizedInstance {
public:
    FinalizedInstance(std::shared_ptr<const CheckContext> ctx, DocumentInstance instance, std::string generic_sha256)
        : ctx_(std::move(ctx)), instance_(std::move(instance)), generic_sha256_(std::move(generic_sha256)) {}

    const DocumentInstance& instance() const noexcept { return instance_; }
    const std::string& generic_sha256() const noexcept { return generic_sha256_; }
    const CheckContext& context() const noexcept { return *ctx_; }

private:
    std::shared_ptr<const CheckContext> ctx_;
    DocumentInstance instance_;
    std::string generic_sha256_;
};

struct FinalizeOutcome {
    std::optional<FinalizedInstance> finalized;
    /// One line per violation or gap when finalization is refused.
    std::vector<std::string> blockers;
    CheckReport report;
};

class AssemblySession {
public:
    /// Throws Error(StructuralFault) listing every fault of `doc`.
    static AssemblySession create(GenericDocument doc, Mode mode, std::string instance_id = "draft");
    /// Session over an existing instance (loaded from a repository).
    static AssemblySession resume(std::shared_ptr<const CheckContext> ctx, DocumentInstance instance);

    /// Throws for ill-typed deltas; Blocked is returned, not thrown.
    EditOutcome apply_edit(const Delta& delta);
    /// What apply_edit would return; the session is not touched.
    EditOutcome preview_edit(const Delta& delta) const;

    FinalizeOutcome finalize() const;

    /// Adds a version of `unit_id` to the session's generic snapshot (lineage
    /// to the current selection) and selects it. Returns the version id and
    /// the outcome of the selection.
    std::pair<std::string, EditOutcome> promote_version(std::string_view unit_id, std::string source,
                                                        std::string rationale, std::string provenance = "drafting",
                                                        std::string created_at = {});

    /// Throws Error(EmptyLog) when there is nothing to undo.
    void undo();

    void set_mode(Mode mode);

    const GenericDocument& doc() const noexcept { return ctx_->doc(); }
    const CheckContext& context() const noexcept { return *ctx_; }
    const std::shared_ptr<const CheckContext>& context_ptr() const noexcept { return ctx_; }
    const DocumentInstance& instance() const noexcept { return instance_; }
    const DocumentInstance& initial() const noexcept { return initial_; }
    const CheckReport& report() const noexcept { return report_; }
    Mode mode() const noexcept { return instance_.mode; }
    std::uint64_t revision() const noexcept { return instance_.revision; }
    const std::vector<UndoEntry>& undo_log() const noexcept { return log_; }

private:
    AssemblySession(std::shared_ptr<const CheckContext> ctx, DocumentInstance instance);

    std::shared_ptr<const CheckContext> ctx_;
    DocumentInstance initial_;
    DocumentInstance instance_;
    CheckReport report_;
    std::vector<UndoEntry> log_;
};

/// Unit `unit_id` of `instance` would be selected under a selected ancestor,
/// or above a selected descendant.
bool mixed_granularity(const CheckContext& ctx, const DocumentInstance& instance, std::string_view unit_id);

// ---------------------------------------------------------------------------
// Rendering

struct UnitSpan {
    std::string unit_id;
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const UnitSpan&, const UnitSpan&) = default;
};

struct RenderOptions {
    LabelScheme scheme;
};

struct RenderedDocument {
    std::string text;
    std::vector<UnitSpan> spans;  // byte ranges in `text`, tree order
    LabelScheme scheme;
};

/// Drafts render with placeholders and a watermark; `draft == false`
/// requires every parameter to be bound.
RenderedDocument render(const CheckContext& ctx, const DocumentInstance& instance, bool draft,
                        const RenderOptions& options = {});
RenderedDocument render(const AssemblySession& session, const RenderOptions& options = {});
RenderedDocument render(const FinalizedInstance& finalized, const RenderOptions& options = {});

inline constexpr std::string_view kDraftWatermark = "# DRAFT \xE2\x80\x94 not finalized";

// ---------------------------------------------------------------------------
// Diffs

struct InclusionChanged {
    std::string unit;
    bool added = false;
    friend bool operator==(const InclusionChanged&, const InclusionChanged&) = default;
};

struct SelectionChanged {
    std::string unit;
    std::optional<std::string> from;
    std::optional<std::string> to;
    friend bool operator==(const SelectionChanged&, const SelectionChanged&) = default;
};

struct BindingChanged {
    std::string param;
    std::optional<ParamValue> from;
    std::optional<ParamValue> to;
    friend bool operator==(const BindingChanged&, const BindingChanged&) = default;
};

using DiffEntry = std::variant<InclusionChanged, SelectionChanged, BindingChanged>;

const std::string& diff_subject(const DiffEntry& entry);

/// Entries sorted by subject id (inclusion before selection on one unit).
/// Throws Error(DifferentGeneric) when the generic ids differ.
std::vector<DiffEntry> diff(const DocumentInstance& a, const DocumentInstance& b);

DocumentInstance apply_diff(DocumentInstance instance, const std::vector<DiffEntry>& entries);

std::string describe(const DiffEntry& entry);

} // namespace ccad
