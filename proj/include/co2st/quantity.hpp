#pragma once

#include <compare>

namespace co2st {

namespace detail {

// Nonnegative scalar tagged with its unit. Only same-unit addition and
// scaling by a dimensionless factor are allowed; cross-unit conversions are
// spelled out as named functions in the engine.
template <typename Tag>
class quantity {
public:
    constexpr quantity() = default;
    constexpr explicit quantity(double value) : value_(value) {}

    constexpr double value() const { return value_; }

    constexpr quantity& operator+=(quantity other)
    {
        value_ += other.value_;
        return *this;
    }

    friend constexpr quantity operator+(quantity a, quantity b) { return quantity(a.value_ + b.value_); }
    friend constexpr quantity operator*(double k, quantity q) { return quantity(k * q.value_); }
    friend constexpr quantity operator*(quantity q, double k) { return quantity(q.value_ * k); }

    friend constexpr auto operator<=>(quantity, quantity) = default;
    friend constexpr bool operator==(quantity, quantity) = default;

private:
    double value_ = 0.0;
};

struct unit_count_tag {};
struct watt_hours_tag {};
struct kwh_tag {};
struct kg_co2e_tag {};

} // namespace detail

/// Number of canonical interactions (prompts, images, minutes, ...) of one task type.
using UnitCount = detail::quantity<detail::unit_count_tag>;
/// Per-interaction energy constants are published in watt-hours.
using WattHours = detail::quantity<detail::watt_hours_tag>;
using EnergyKWh = detail::quantity<detail::kwh_tag>;
using CarbonKg = detail::quantity<detail::kg_co2e_tag>;

} // namespace co2st
