#pragma once

#include "contractcad/cases.hpp"
#include "contractcad/engine.hpp"

#include <optional>

// Deliberately naive reference implementations. They share no code with the
// library beyond the data types and read the generic document directly.
namespace ccad::oracle {

/// Iterate-until-fixpoint enforcement: each round rescans every Requires rule.
EnforceResult enforce_include(const GenericDocument& doc, const std::vector<Constraint>& constraints,
                              const DocumentInstance& instance, const std::string& unit);

/// Every legal instance (ancestor-closed inclusion, at most one version per
/// unit, no selection beneath a selected unit) is tried in turn.
struct SatAnswer {
    bool satisfiable = false;
    std::uint64_t candidates = 0;
};
SatAnswer exhaustive_satisfiable(const GenericDocument& doc, const std::vector<Constraint>& constraints);

/// True when `instance` has no Requires/Excludes/ExactlyOne violation and no
/// structural gap, evaluated from the definitions.
bool structurally_complete(const GenericDocument& doc, const std::vector<Constraint>& constraints,
                           const DocumentInstance& instance);

/// Per-case matcher over string values.
struct CaseAnswer {
    std::vector<std::vector<std::string>> uncovered;                // value labels per case
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> conflicts;  // case, rule ids
};
CaseAnswer brute_force_cases(const CaseSet& set);

} // namespace ccad::oracle
