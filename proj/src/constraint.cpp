#include "contractcad/constraint.hpp"

#include "contractcad/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace ccad {

std::string Atom::str() const {
    return (kind == AtomKind::UnitIncluded ? "unit:" : "version:") + id;
}

std::optional<Atom> Atom::parse(std::string_view text) {
    if (text.starts_with("unit:") && text.size() > 5) return Atom::unit(std::string(text.substr(5)));
    if (text.starts_with("version:") && text.size() > 8) return Atom::version(std::string(text.substr(8)));
    return std::nullopt;
}

namespace {

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    ParamExpr run() {
        std::vector<ParamClause> clauses;
        clauses.push_back(clause());
        skip_space();
        while (pos_ < text_.size()) {
            expect("&&");
            clauses.push_back(clause());
            skip_space();
        }
        return ParamExpr(std::move(clauses));
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorKind::InvalidRule,
                    "parameter rule: " + what + " at offset " + std::to_string(pos_) + " in '" +
                        std::string(text_) + "'");
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(std::string_view token) {
        skip_space();
        return text_.substr(pos_).starts_with(token);
    }

    void expect(std::string_view token) {
        if (!peek(token)) fail("expected '" + std::string(token) + "'");
        pos_ += token.size();
    }

    std::string name() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
        if (start == pos_) fail("expected a parameter name");
        return std::string(text_.substr(start, pos_ - start));
    }

    Operand operand() {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '"') {
            ++pos_;
            std::string lit;
            while (true) {
                if (pos_ >= text_.size()) fail("unterminated literal");
                const char c = text_[pos_++];
                if (c == '"') break;
                if (c == '\\') {
                    if (pos_ >= text_.size()) fail("unterminated literal");
                    lit += text_[pos_++];
                } else {
                    lit += c;
                }
            }
            return {Operand::Kind::Literal, lit};
        }
        return {Operand::Kind::Param, name()};
    }

    ParamClause clause() {
        skip_space();
        const std::size_t save = pos_;
        if (pos_ < text_.size() && text_[pos_] != '"') {
            std::string word = name();
            if ((word == "distinct" || word == "defined") && peek("(")) {
                expect("(");
                ParamClause c;
                c.lhs = {Operand::Kind::Param, name()};
                if (word == "distinct") {
                    c.op = CompareOp::Distinct;
                    expect(",");
                    c.rhs = Operand{Operand::Kind::Param, name()};
                } else {
                    c.op = CompareOp::Defined;
                }
                expect(")");
                return c;
            }
            pos_ = save;
        }
        ParamClause c;
        c.lhs = operand();
        if (peek("<=")) { pos_ += 2; c.op = CompareOp::LessEqual; }
        else if (peek("!=")) { pos_ += 2; c.op = CompareOp::NotEqual; }
        else if (peek("<")) { pos_ += 1; c.op = CompareOp::Less; }
        else if (peek("=")) { pos_ += 1; c.op = CompareOp::Equal; }
        else fail("expected a comparison operator");
        c.rhs = operand();
        return c;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string operand_str(const Operand& o) {
    if (o.kind == Operand::Kind::Param) return o.text;
    std::string out = "\"";
    for (char c : o.text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string_view op_str(CompareOp op) {
    switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::LessEqual: return "<=";
    case CompareOp::Equal: return "=";
    case CompareOp::NotEqual: return "!=";
    default: return "";
    }
}

// Type against which a clause's operands are read; the first param operand.
std::optional<ParamType> clause_type(const ParamClause& c, const std::map<std::string, ParamType>& types) {
    for (const Operand* o : {&c.lhs, c.rhs ? &*c.rhs : nullptr}) {
        if (o && o->kind == Operand::Kind::Param) {
            if (auto it = types.find(o->text); it != types.end()) return it->second;
        }
    }
    return std::nullopt;
}

} // namespace

ParamExpr ParamExpr::parse(std::string_view text) { return ExprParser(text).run(); }

std::string ParamExpr::str() const {
    std::string out;
    for (const auto& c : clauses_) {
        if (!out.empty()) out += " && ";
        switch (c.op) {
        case CompareOp::Defined: out += "defined(" + c.lhs.text + ")"; break;
        case CompareOp::Distinct: out += "distinct(" + c.lhs.text + "," + c.rhs->text + ")"; break;
        default:
            out += operand_str(c.lhs) + " " + std::string(op_str(c.op)) + " " + operand_str(*c.rhs);
        }
    }
    return out;
}

std::vector<std::string> ParamExpr::parameters() const {
    std::set<std::string> names;
    for (const auto& c : clauses_) {
        if (c.lhs.kind == Operand::Kind::Param) names.insert(c.lhs.text);
        if (c.rhs && c.rhs->kind == Operand::Kind::Param) names.insert(c.rhs->text);
    }
    return {names.begin(), names.end()};
}

std::vector<std::string> ParamExpr::compared_parameters() const {
    std::set<std::string> names;
    for (const auto& c : clauses_) {
        if (c.op == CompareOp::Defined) continue;
        if (c.lhs.kind == Operand::Kind::Param) names.insert(c.lhs.text);
        if (c.rhs && c.rhs->kind == Operand::Kind::Param) names.insert(c.rhs->text);
    }
    return {names.begin(), names.end()};
}

std::vector<std::string> ParamExpr::required_parameters() const {
    std::set<std::string> names;
    for (const auto& c : clauses_)
        if (c.op == CompareOp::Defined) names.insert(c.lhs.text);
    return {names.begin(), names.end()};
}

std::optional<bool> evaluate_comparisons(const ParamExpr& expr, const Bindings& bindings,
                                         const std::map<std::string, ParamType>& types) {
    for (const auto& name : expr.compared_parameters())
        if (!bindings.contains(name)) return std::nullopt;

    for (const auto& c : expr.clauses()) {
        if (c.op == CompareOp::Defined) continue;
        const auto type = clause_type(c, types);
        auto resolve = [&](const Operand& o) -> std::optional<ParamValue> {
            if (o.kind == Operand::Kind::Param) return bindings.at(o.text);
            if (!type) return std::nullopt;
            return parse_value(*type, o.text);
        };
        const auto lhs = resolve(c.lhs);
        const auto rhs = resolve(*c.rhs);
        if (!lhs || !rhs) return false;
        const auto order = compare_values(*lhs, *rhs);
        bool holds = false;
        switch (c.op) {
        case CompareOp::Less: holds = order && *order < 0; break;
        case CompareOp::LessEqual: holds = order && *order <= 0; break;
        case CompareOp::Equal: holds = *lhs == *rhs; break;
        case CompareOp::NotEqual:
        case CompareOp::Distinct: holds = !(*lhs == *rhs); break;
        case CompareOp::Defined: break;
        }
        if (!holds) return false;
    }
    return true;
}

std::optional<std::string> type_check(const ParamExpr& expr, const std::map<std::string, ParamType>& types) {
    for (const auto& name : expr.parameters())
        if (!types.contains(name)) return "unknown parameter '" + name + "'";
    for (const auto& c : expr.clauses()) {
        if (c.op == CompareOp::Defined) continue;
        const Operand& l = c.lhs;
        const Operand& r = *c.rhs;
        if (l.kind == Operand::Kind::Literal && r.kind == Operand::Kind::Literal)
            return "comparison between two literals";
        if (l.kind == Operand::Kind::Param && r.kind == Operand::Kind::Param) {
            if (types.at(l.text) != types.at(r.text))
                return "parameters '" + l.text + "' and '" + r.text + "' have different types";
            continue;
        }
        const Operand& p = l.kind == Operand::Kind::Param ? l : r;
        const Operand& lit = l.kind == Operand::Kind::Literal ? l : r;
        if (!parse_value(types.at(p.text), lit.text))
            return "literal \"" + lit.text + "\" is not a " + std::string(to_string(types.at(p.text).kind));
    }
    return std::nullopt;
}

std::string_view to_string(ConstraintKind kind) {
    switch (kind) {
    case ConstraintKind::Requires: return "requires";
    case ConstraintKind::Excludes: return "excludes";
    case ConstraintKind::ExactlyOne: return "exactly-one";
    case ConstraintKind::ParamRule: return "param-rule";
    }
    return "requires";
}

std::optional<ConstraintKind> constraint_kind_from_string(std::string_view text) {
    for (auto k : {ConstraintKind::Requires, ConstraintKind::Excludes, ConstraintKind::ExactlyOne,
                   ConstraintKind::ParamRule})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::string_view to_string(Origin origin) {
    return origin == Origin::Authored ? "authored" : "derived-textual";
}

std::vector<Atom> Constraint::atoms() const {
    return std::visit(
        [](const auto& rule) -> std::vector<Atom> {
            using T = std::decay_t<decltype(rule)>;
            if constexpr (std::is_same_v<T, RequiresRule>) return {rule.antecedent, Atom::unit(rule.consequent)};
            else if constexpr (std::is_same_v<T, ExcludesRule>) return {rule.a, rule.b};
            else if constexpr (std::is_same_v<T, ExactlyOneRule>) {
                std::vector<Atom> out;
                for (const auto& u : rule.group) out.push_back(Atom::unit(u));
                return out;
            } else return {};
        },
        body);
}

std::vector<std::string> Constraint::parameters() const {
    if (const auto* rule = std::get_if<ParamRule>(&body)) return rule->expr.parameters();
    return {};
}

Constraint Constraint::requires_rule(std::string id, Atom antecedent, std::string consequent, std::string message) {
    return {std::move(id), RequiresRule{std::move(antecedent), std::move(consequent)}, Origin::Authored,
            std::move(message), {}};
}

Constraint Constraint::excludes(std::string id, Atom a, Atom b, std::string message) {
    return {std::move(id), ExcludesRule{std::move(a), std::move(b)}, Origin::Authored, std::move(message), {}};
}

Constraint Constraint::exactly_one(std::string id, std::vector<std::string> group, std::string message) {
    std::sort(group.begin(), group.end());
    return {std::move(id), ExactlyOneRule{std::move(group)}, Origin::Authored, std::move(message), {}};
}

Constraint Constraint::param_rule(std::string id, ParamExpr expr, std::string message) {
    return {std::move(id), ParamRule{std::move(expr)}, Origin::Authored, std::move(message), {}};
}

} // namespace ccad
