#pragma once

#include "contractcad/value.hpp"

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ccad {

enum class AtomKind { UnitIncluded, VersionSelected };

/// A boolean fact about an instance: a unit is included, or a version is
/// selected.
struct Atom {
    AtomKind kind = AtomKind::UnitIncluded;
    std::string id;

    static Atom unit(std::string id) { return {AtomKind::UnitIncluded, std::move(id)}; }
    static Atom version(std::string id) { return {AtomKind::VersionSelected, std::move(id)}; }

    /// "unit:<id>" or "version:<id>".
    std::string str() const;
    static std::optional<Atom> parse(std::string_view text);

    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

// ---------------------------------------------------------------------------
// Parameter predicates

struct Operand {
    enum class Kind { Param, Literal };
    Kind kind = Kind::Param;
    std::string text;

    friend bool operator==(const Operand&, const Operand&) = default;
};

enum class CompareOp { Less, LessEqual, Equal, NotEqual, Distinct, Defined };

struct ParamClause {
    CompareOp op = CompareOp::Defined;
    Operand lhs;
    std::optional<Operand> rhs;

    friend bool operator==(const ParamClause&, const ParamClause&) = default;
};

/// Conjunction of comparison clauses over parameters and quoted literals:
///   distinct(a,b) && defined(c) && a < b && d <= "2024-01-01"
class ParamExpr {
public:
    ParamExpr() = default;
    explicit ParamExpr(std::vector<ParamClause> clauses) : clauses_(std::move(clauses)) {}

    /// Throws Error(InvalidRule) with the offending offset on malformed input.
    static ParamExpr parse(std::string_view text);

    const std::vector<ParamClause>& clauses() const noexcept { return clauses_; }

    /// Canonical surface syntax; parse(str()) == *this.
    std::string str() const;

    /// Parameters named anywhere in the expression, sorted and unique.
    std::vector<std::string> parameters() const;
    /// Parameters that must be defined for comparisons to be decided
    /// (operands of every clause except defined()).
    std::vector<std::string> compared_parameters() const;
    /// Parameters named by defined() clauses.
    std::vector<std::string> required_parameters() const;

    friend bool operator==(const ParamExpr&, const ParamExpr&) = default;

private:
    std::vector<ParamClause> clauses_;
};

using Bindings = std::map<std::string, ParamValue>;

/// Evaluates the comparison clauses (defined() clauses are ignored). Returns
/// nullopt when a compared parameter is unbound. Literals are read with the
/// type of the parameter they are compared with; `types` gives those types.
std::optional<bool> evaluate_comparisons(const ParamExpr& expr, const Bindings& bindings,
                                         const std::map<std::string, ParamType>& types);

/// Authoring-time type check. Returns a description of the first problem, or
/// nullopt when every comparison is between same-typed operands.
std::optional<std::string> type_check(const ParamExpr& expr, const std::map<std::string, ParamType>& types);

// ---------------------------------------------------------------------------
// Constraints

enum class ConstraintKind { Requires, Excludes, ExactlyOne, ParamRule };
enum class Origin { Authored, DerivedTextual };

std::string_view to_string(ConstraintKind kind);
std::optional<ConstraintKind> constraint_kind_from_string(std::string_view text);
std::string_view to_string(Origin origin);

struct RequiresRule {
    Atom antecedent;
    std::string consequent;  // unit id

    friend bool operator==(const RequiresRule&, const RequiresRule&) = default;
};

struct ExcludesRule {
    Atom a;
    Atom b;

    friend bool operator==(const ExcludesRule&, const ExcludesRule&) = default;
};

struct ExactlyOneRule {
    std::vector<std::string> group;  // unit ids, sorted

    friend bool operator==(const ExactlyOneRule&, const ExactlyOneRule&) = default;
};

struct ParamRule {
    ParamExpr expr;

    friend bool operator==(const ParamRule&, const ParamRule&) = default;
};

struct Constraint {
    using Body = std::variant<RequiresRule, ExcludesRule, ExactlyOneRule, ParamRule>;

    std::string id;
    Body body;
    Origin origin = Origin::Authored;
    /// Authored explanation shown to drafters. Empty for derived constraints.
    std::string message;
    /// For DerivedTextual: the version whose cross-reference produced it.
    std::string source_version;

    ConstraintKind kind() const noexcept { return static_cast<ConstraintKind>(body.index()); }

    /// Unit/version atoms the constraint reads.
    std::vector<Atom> atoms() const;
    std::vector<std::string> parameters() const;

    static Constraint requires_rule(std::string id, Atom antecedent, std::string consequent, std::string message = {});
    static Constraint excludes(std::string id, Atom a, Atom b, std::string message = {});
    static Constraint exactly_one(std::string id, std::vector<std::string> group, std::string message = {});
    static Constraint param_rule(std::string id, ParamExpr expr, std::string message = {});

    friend bool operator==(const Constraint&, const Constraint&) = default;
};

} // namespace ccad
