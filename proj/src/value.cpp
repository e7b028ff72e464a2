#include "contractcad/value.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>

namespace ccad {

std::string_view to_string(ParamKind kind) {
    switch (kind) {
    case ParamKind::Text: return "text";
    case ParamKind::Integer: return "integer";
    case ParamKind::Decimal: return "decimal";
    case ParamKind::Date: return "date";
    case ParamKind::Money: return "money";
    case ParamKind::Party: return "party";
    case ParamKind::Enum: return "enum";
    }
    return "text";
}

std::optional<ParamKind> param_kind_from_string(std::string_view text) {
    for (auto k : {ParamKind::Text, ParamKind::Integer, ParamKind::Decimal, ParamKind::Date,
                   ParamKind::Money, ParamKind::Party, ParamKind::Enum}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

int compare_magnitude(const std::string& ai, const std::string& af, const std::string& bi,
                      const std::string& bf) {
    if (ai.size() != bi.size()) return ai.size() < bi.size() ? -1 : 1;
    if (int c = ai.compare(bi); c != 0) return c < 0 ? -1 : 1;
    const std::size_t n = std::max(af.size(), bf.size());
    for (std::size_t i = 0; i < n; ++i) {
        const char x = i < af.size() ? af[i] : '0';
        const char y = i < bf.size() ? bf[i] : '0';
        if (x != y) return x < y ? -1 : 1;
    }
    return 0;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : days[m - 1];
}

std::string pad(int v, int width) {
    std::string s = std::to_string(v);
    if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
    return s;
}

} // namespace

std::optional<Decimal> Decimal::parse(std::string_view text) {
    Decimal d;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        d.negative_ = text.front() == '-';
        text.remove_prefix(1);
    }
    const auto dot = text.find('.');
    std::string_view ip = text.substr(0, dot);
    std::string_view fp = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (!all_digits(ip)) return std::nullopt;
    if (dot != std::string_view::npos && !all_digits(fp)) return std::nullopt;

    std::string integer(ip.substr(std::min(ip.find_first_not_of('0'), ip.size())));
    if (integer.empty()) integer = "0";
    std::string fraction(fp);
    while (!fraction.empty() && fraction.back() == '0') fraction.pop_back();
    d.integer_ = std::move(integer);
    d.fraction_ = std::move(fraction);
    if (d.integer_ == "0" && d.fraction_.empty()) d.negative_ = false;
    return d;
}

std::string Decimal::str() const {
    std::string out = negative_ ? "-" : "";
    out += integer_;
    if (!fraction_.empty()) out += "." + fraction_;
    return out;
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
    if (a.negative_ != b.negative_) return a.negative_ ? std::strong_ordering::less : std::strong_ordering::greater;
    int c = compare_magnitude(a.integer_, a.fraction_, b.integer_, b.fraction_);
    if (a.negative_) c = -c;
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::optional<Date> Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        auto part = text.substr(pos, len);
        if (!all_digits(part)) return std::nullopt;
        int v = 0;
        std::from_chars(part.data(), part.data() + part.size(), v);
        return v;
    };
    auto y = field(0, 4), m = field(5, 2), d = field(8, 2);
    if (!y || !m || !d) return std::nullopt;
    if (*m < 1 || *m > 12 || *d < 1 || *d > days_in_month(*y, *m)) return std::nullopt;
    return Date{*y, *m, *d};
}

std::string Date::str() const { return pad(year, 4) + "-" + pad(month, 2) + "-" + pad(day, 2); }

std::optional<Money> Money::parse(std::string_view text) {
    const auto space = text.find(' ');
    if (space == std::string_view::npos) return std::nullopt;
    auto amount = Decimal::parse(text.substr(0, space));
    std::string_view code = text.substr(space + 1);
    if (!amount || code.size() != 3 ||
        !std::all_of(code.begin(), code.end(), [](unsigned char c) { return std::isupper(c); }))
        return std::nullopt;
    return Money{*amount, std::string(code)};
}

std::string Money::str() const { return amount.str() + " " + currency; }

std::string ParamValue::canonical() const {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) return v;
            else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
            else return v.str();
        },
        data_);
}

std::optional<ParamValue> parse_value(const ParamType& type, std::string_view text) {
    switch (type.kind) {
    case ParamKind::Text: return ParamValue::text(std::string(text));
    case ParamKind::Party:
        if (text.empty()) return std::nullopt;
        return ParamValue::party(std::string(text));
    case ParamKind::Enum:
        if (std::find(type.enum_values.begin(), type.enum_values.end(), text) == type.enum_values.end())
            return std::nullopt;
        return ParamValue(ParamKind::Enum, std::string(text));
    case ParamKind::Integer: {
        std::int64_t v = 0;
        std::string_view digits = text;
        if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) return std::nullopt;
        return ParamValue::integer(v);
    }
    case ParamKind::Decimal:
        if (auto d = Decimal::parse(text)) return ParamValue(ParamKind::Decimal, *d);
        return std::nullopt;
    case ParamKind::Date:
        if (auto d = Date::parse(text)) return ParamValue::date(*d);
        return std::nullopt;
    case ParamKind::Money:
        if (auto m = Money::parse(text)) return ParamValue(ParamKind::Money, *m);
        return std::nullopt;
    }
    return std::nullopt;
}

bool value_matches(const ParamType& type, const ParamValue& value) {
    if (type.kind != value.kind()) return false;
    auto reparsed = parse_value(type, value.canonical());
    return reparsed && *reparsed == value;
}

std::optional<std::strong_ordering> compare_values(const ParamValue& a, const ParamValue& b) {
    if (a.kind() != b.kind()) return std::nullopt;
    return std::visit(
        [&](const auto& x) -> std::optional<std::strong_ordering> {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.data());
            if constexpr (std::is_same_v<T, Money>) {
                if (x.currency != y.currency) return std::nullopt;
                return x.amount <=> y.amount;
            } else if constexpr (std::is_same_v<T, std::string>) {
                const int c = x.compare(y);
                return c < 0 ? std::strong_ordering::less
                             : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
            } else {
                return x <=> y;
            }
        },
        a.data());
}

} // namespace ccad
