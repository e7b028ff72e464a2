#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ccad {

enum class ParamKind { Text, Integer, Decimal, Date, Money, Party, Enum };

std::string_view to_string(ParamKind kind);
std::optional<ParamKind> param_kind_from_string(std::string_view text);

struct ParamType {
    ParamKind kind = ParamKind::Text;
    std::vector<std::string> enum_values;

    friend bool operator==(const ParamType&, const ParamType&) = default;
};

/// Exact decimal number. Stored normalized: no leading zeros in the integer
/// part, no trailing zeros in the fraction, and no negative zero.
class Decimal {
public:
    Decimal() = default;

    static std::optional<Decimal> parse(std::string_view text);

    std::string str() const;

    friend bool operator==(const Decimal&, const Decimal&) = default;
    friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

private:
    bool negative_ = false;
    std::string integer_ = "0";
    std::string fraction_;
};

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    static std::optional<Date> parse(std::string_view text);
    std::string str() const;

    friend bool operator==(const Date&, const Date&) = default;
    friend auto operator<=>(const Date&, const Date&) = default;
};

struct Money {
    Decimal amount;
    std::string currency;

    static std::optional<Money> parse(std::string_view text);
    std::string str() const;

    friend bool operator==(const Money&, const Money&) = default;
};

/// A bound parameter value tagged with the kind it was parsed as. Text,
/// party and enum values are carried verbatim.
class ParamValue {
public:
    using Storage = std::variant<std::string, std::int64_t, Decimal, Date, Money>;

    ParamValue() = default;
    ParamValue(ParamKind kind, Storage data) : kind_(kind), data_(std::move(data)) {}

    static ParamValue text(std::string s) { return {ParamKind::Text, std::move(s)}; }
    static ParamValue party(std::string s) { return {ParamKind::Party, std::move(s)}; }
    static ParamValue integer(std::int64_t v) { return {ParamKind::Integer, v}; }
    static ParamValue date(Date d) { return {ParamKind::Date, d}; }

    ParamKind kind() const noexcept { return kind_; }
    const Storage& data() const noexcept { return data_; }

    /// Canonical text: ISO dates, "<amount> <currency>" money, base-10
    /// integers, everything else verbatim.
    std::string canonical() const;

    friend bool operator==(const ParamValue&, const ParamValue&) = default;

private:
    ParamKind kind_ = ParamKind::Text;
    Storage data_ = std::string{};
};

/// Parses `text` as a value of `type`. Returns nullopt when the text does not
/// denote a value of that type (including enum values outside the list).
std::optional<ParamValue> parse_value(const ParamType& type, std::string_view text);

/// True when the value is a well-formed member of `type`.
bool value_matches(const ParamType& type, const ParamValue& value);

/// Three-way comparison of two values of the same kind. Returns nullopt for
/// incomparable pairs: different kinds, money in different currencies.
/// Text-like kinds compare bytewise.
std::optional<std::strong_ordering> compare_values(const ParamValue& a, const ParamValue& b);

} // namespace ccad
