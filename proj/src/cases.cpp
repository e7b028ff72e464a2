#include "contractcad/cases.hpp"

#include "contractcad/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace ccad {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidRule, what); }

bool is_label(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

// allowed[rule][factor][value]; an absent literal allows every value.
using Matrix = std::vector<std::vector<std::vector<bool>>>;

Matrix compile(const CaseSet& set) {
    Matrix m(set.rules.size());
    std::map<std::string, std::size_t> factor_pos;
    for (std::size_t f = 0; f < set.factors.size(); ++f) factor_pos.emplace(set.factors[f].name, f);
    for (std::size_t r = 0; r < set.rules.size(); ++r) {
        m[r].resize(set.factors.size());
        for (std::size_t f = 0; f < set.factors.size(); ++f) m[r][f].assign(set.factors[f].domain.size(), true);
        for (const auto& lit : set.rules[r].condition) {
            const std::size_t f = factor_pos.at(lit.factor);
            const auto& domain = set.factors[f].domain;
            m[r][f].assign(domain.size(), false);
            for (const auto& v : lit.allowed)
                m[r][f][static_cast<std::size_t>(std::find(domain.begin(), domain.end(), v) - domain.begin())] = true;
        }
    }
    return m;
}

// Visits every case in lexicographic order (last factor varies fastest).
template <typename Fn>
void for_each_case(const std::vector<Factor>& factors, Fn&& fn) {
    Case c(factors.size(), 0);
    while (true) {
        fn(c);
        std::size_t f = factors.size();
        while (f > 0) {
            --f;
            if (++c[f] < factors[f].domain.size()) break;
            c[f] = 0;
            if (f == 0) return;
        }
        if (factors.empty()) return;
    }
}

std::vector<std::size_t> matching(const Matrix& m, const Case& c) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < m.size(); ++r) {
        bool all = true;
        for (std::size_t f = 0; f < c.size() && all; ++f) all = m[r][f][c[f]];
        if (all) out.push_back(r);
    }
    return out;
}

} // namespace

void validate_cases(const CaseSet& set) {
    std::map<std::string, const Factor*> factors;
    for (const auto& f : set.factors) {
        if (!is_label(f.name)) invalid("invalid factor name '" + f.name + "'");
        if (!factors.emplace(f.name, &f).second) invalid("factor '" + f.name + "' declared twice");
        if (f.domain.size() < 2) invalid("factor '" + f.name + "' needs at least two values");
        std::set<std::string> seen;
        for (const auto& v : f.domain) {
            if (!is_label(v)) invalid("factor '" + f.name + "': invalid value '" + v + "'");
            if (!seen.insert(v).second) invalid("factor '" + f.name + "': value '" + v + "' repeated");
        }
    }
    std::set<std::string> ids;
    for (const auto& r : set.rules) {
        if (!is_label(r.id)) invalid("invalid rule id '" + r.id + "'");
        if (!ids.insert(r.id).second) invalid("rule '" + r.id + "' declared twice");
        if (!is_label(r.outcome)) invalid("rule '" + r.id + "': invalid outcome '" + r.outcome + "'");
        std::set<std::string> used;
        for (const auto& lit : r.condition) {
            auto it = factors.find(lit.factor);
            if (it == factors.end()) invalid("rule '" + r.id + "' references unknown factor '" + lit.factor + "'");
            if (!used.insert(lit.factor).second)
                invalid("rule '" + r.id + "' constrains factor '" + lit.factor + "' twice");
            if (lit.allowed.empty()) invalid("rule '" + r.id + "': empty value set for '" + lit.factor + "'");
            const auto& domain = it->second->domain;
            std::set<std::string> values;
            for (const auto& v : lit.allowed) {
                if (std::find(domain.begin(), domain.end(), v) == domain.end())
                    invalid("rule '" + r.id + "': '" + v + "' is not a value of factor '" + lit.factor + "'");
                if (!values.insert(v).second) invalid("rule '" + r.id + "': value '" + v + "' repeated");
            }
        }
    }
}

std::uint64_t universe_size(const std::vector<Factor>& factors) {
    std::uint64_t n = 1;
    for (const auto& f : factors) {
        n *= f.domain.size();
        if (n > kMaxCases)
            throw Error(ErrorKind::TooLarge, "the universe of cases exceeds " + std::to_string(kMaxCases) + " cases");
    }
    return n;
}

CompletenessReport check_completeness(const CaseSet& set, std::size_t limit) {
    validate_cases(set);
    CompletenessReport report;
    report.universe = universe_size(set.factors);
    const Matrix m = compile(set);
    for_each_case(set.factors, [&](const Case& c) {
        if (!matching(m, c).empty()) return;
        ++report.uncovered_total;
        if (report.uncovered.size() < limit) report.uncovered.push_back(c);
    });
    return report;
}

ConsistencyReport check_consistency(const CaseSet& set, std::size_t limit) {
    validate_cases(set);
    ConsistencyReport report;
    report.universe = universe_size(set.factors);
    const Matrix m = compile(set);
    for_each_case(set.factors, [&](const Case& c) {
        const auto hits = matching(m, c);
        if (hits.size() < 2) return;
        const std::string& first = set.rules[hits.front()].outcome;
        if (std::all_of(hits.begin(), hits.end(), [&](std::size_t r) { return set.rules[r].outcome == first; }))
            return;
        ++report.conflict_total;
        if (report.conflicts.size() >= limit) return;
        Conflict conflict{c, {}};
        for (auto r : hits) conflict.rules.push_back(set.rules[r].id);
        report.conflicts.push_back(std::move(conflict));
    });
    return report;
}

std::string describe_case(const std::vector<Factor>& factors, const Case& c) {
    std::string out;
    for (std::size_t f = 0; f < factors.size(); ++f) {
        if (f) out += ", ";
        out += factors[f].name + "=" + factors[f].domain[c[f]];
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

bool starts_with_word(std::string_view line, std::string_view word) {
    return line.starts_with(word) && line.size() > word.size() &&
           std::isspace(static_cast<unsigned char>(line[word.size()]));
}

} // namespace

CaseSet parse_case_rules(std::string_view text) {
    CaseSet set;
    std::size_t line_no = 0;
    for (std::string_view rest = text; !rest.empty() || line_no == 0;) {
        ++line_no;
        const std::size_t nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (rest.empty()) break;
            continue;
        }
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (starts_with_word(line, "factor")) {
            line = trim(line.substr(6));
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) invalid(where + "expected 'factor <name> = v1 | v2'");
            Factor f{std::string(trim(line.substr(0, eq))), {}};
            for (auto v : split(line.substr(eq + 1), '|')) f.domain.emplace_back(v);
            set.factors.push_back(std::move(f));
        } else if (starts_with_word(line, "rule")) {
            line = trim(line.substr(4));
            const auto colon = line.find(':');
            const auto arrow = line.rfind("->");
            if (colon == std::string_view::npos || arrow == std::string_view::npos || arrow < colon)
                invalid(where + "expected 'rule <id>: <condition> -> <outcome>'");
            CaseRule rule{std::string(trim(line.substr(0, colon))), {},
                          std::string(trim(line.substr(arrow + 2)))};
            const std::string_view condition = trim(line.substr(colon + 1, arrow - colon - 1));
            if (!condition.empty()) {
                for (auto literal : split(condition, '&')) {
                    const auto in = literal.find(" in ");
                    if (in == std::string_view::npos) invalid(where + "expected '<factor> in {v, ...}' or '<factor> in *'");
                    CaseLiteral lit{std::string(trim(literal.substr(0, in))), {}};
                    const std::string_view values = trim(literal.substr(in + 4));
                    if (values == "*") {
                        auto f = std::find_if(set.factors.begin(), set.factors.end(),
                                              [&](const Factor& x) { return x.name == lit.factor; });
                        if (f == set.factors.end())
                            invalid(where + "rule '" + rule.id + "' references unknown factor '" + lit.factor + "'");
                        lit.allowed = f->domain;
                    } else {
                        if (values.size() < 2 || values.front() != '{' || values.back() != '}')
                            invalid(where + "value set must be written {v, ...}");
                        const std::string_view inner = trim(values.substr(1, values.size() - 2));
                        if (!inner.empty())
                            for (auto v : split(inner, ',')) lit.allowed.emplace_back(v);
                    }
                    rule.condition.push_back(std::move(lit));
                }
            }
            set.rules.push_back(std::move(rule));
        } else {
            invalid(where + "expected 'factor' or 'rule'");
        }
        if (rest.empty()) break;
    }
    try {
        validate_cases(set);
    } catch (const Error& e) {
        invalid(std::string("rule file: ") + e.what());
    }
    return set;
}

} // namespace ccad
