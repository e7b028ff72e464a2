#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ccad {

struct Factor {
    std::string name;
    std::vector<std::string> domain;  // ordered, distinct, at least two labels
};

/// Value index per factor, in factor declaration order.
using Case = std::vector<std::size_t>;

struct CaseLiteral {
    std::string factor;
    std::vector<std::string> allowed;  // "*" in rule files expands to the whole domain
};

struct CaseRule {
    std::string id;
    std::vector<CaseLiteral> condition;
    std::string outcome;
};

struct CaseSet {
    std::vector<Factor> factors;
    std::vector<CaseRule> rules;
};

inline constexpr std::uint64_t kMaxCases = 1'000'000;
inline constexpr std::size_t kMaxListedCases = 100;

/// Throws Error(InvalidRule) describing the first problem.
void validate_cases(const CaseSet& set);

/// Product of the domain sizes. Throws Error(TooLarge) above kMaxCases.
std::uint64_t universe_size(const std::vector<Factor>& factors);

struct CompletenessReport {
    std::uint64_t universe = 0;
    std::uint64_t uncovered_total = 0;
    std::vector<Case> uncovered;  // first kMaxListedCases, lexicographic
};

struct Conflict {
    Case c;
    std::vector<std::string> rules;  // every matching rule id, in rule order
};

struct ConsistencyReport {
    std::uint64_t universe = 0;
    std::uint64_t conflict_total = 0;
    std::vector<Conflict> conflicts;  // first kMaxListedCases, lexicographic
};

CompletenessReport check_completeness(const CaseSet& set, std::size_t limit = kMaxListedCases);
ConsistencyReport check_consistency(const CaseSet& set, std::size_t limit = kMaxListedCases);

/// "delivery=late, volume=high"
std::string describe_case(const std::vector<Factor>& factors, const Case& c);

/// Parses the rule-file format:
///   factor delivery = on-time | late
///   rule r1: delivery in {late} & volume in * -> penalty
/// '#' starts a comment. Throws Error(InvalidRule) with the line number.
CaseSet parse_case_rules(std::string_view text);

} // namespace ccad
