#pragma once
// Fixtures shared by the unit tests and the acceptance suite.

#include <algorithm>
#include <optional>
#include <vector>

#include "rankdep/elicitation.hpp"
#include "rankdep/equilibrium.hpp"
#include "rankdep/prng.hpp"

namespace fixtures {

using namespace rankdep;

/// Random symmetric instance: n in [n_lo, n_hi], vbar < $10, gaps up to $30,
/// rho entries drawn in [-3.00, 9.99] and sorted non-increasing. Cents.
inline SymmetricInstance random_symmetric(PhiloxStream& rng, int n_lo = 4, int n_hi = 6) {
    const int n = n_lo + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n_hi - n_lo + 1)));
    const auto vbar = static_cast<std::int64_t>(rng.uniform_below(1000));
    const auto v2 = vbar + 1 + static_cast<std::int64_t>(rng.uniform_below(3000));
    const auto v1 = v2 + 1 + static_cast<std::int64_t>(rng.uniform_below(3000));
    std::vector<std::int64_t> r(n);
    for (auto& x : r) x = -300 + static_cast<std::int64_t>(rng.uniform_below(1300));
    std::sort(r.rbegin(), r.rend());
    std::vector<Cents> rc;
    for (auto x : r) rc.emplace_back(x);
    return {n, Cents{v1}, Cents{v2}, Cents{vbar}, RhoSchedule{rc}};
}

struct PaymentCase {
    MplResponse response;
    int draw1, draw2;
    std::optional<Cents> money;  ///< empty: subject keeps the object
};

/// Three responses; draw1 below, at and above the screen-1 row; draw2 below,
/// at and above the screen-2 row. Written out by hand from the payment rules:
/// a money row pays iff its amount exceeds the elicited value.
inline const std::vector<PaymentCase>& payment_table() {
    static const std::vector<PaymentCase> t = [] {
        std::vector<PaymentCase> v;
        auto keep = std::optional<Cents>{};
        auto pay = [](std::int64_t c) { return std::optional<Cents>{Cents{c}}; };
        // (16, 28) elicits $16.56.
        for (int d2 : {27, 28, 29}) v.push_back({{16, 28}, 15, d2, keep});
        v.push_back({{16, 28}, 16, 27, keep});
        v.push_back({{16, 28}, 16, 28, keep});
        v.push_back({{16, 28}, 16, 29, pay(1658)});
        for (int d2 : {27, 28, 29}) v.push_back({{16, 28}, 17, d2, pay(1700)});
        // (30, 2) elicits $30.04.
        for (int d2 : {1, 2, 3}) v.push_back({{30, 2}, 29, d2, keep});
        v.push_back({{30, 2}, 30, 1, keep});
        v.push_back({{30, 2}, 30, 2, keep});
        v.push_back({{30, 2}, 30, 3, pay(3006)});
        for (int d2 : {1, 2, 3}) v.push_back({{30, 2}, 31, d2, pay(3100)});
        // (5, 49) elicits $5.98.
        for (int d2 : {48, 49, 50}) v.push_back({{5, 49}, 4, d2, keep});
        v.push_back({{5, 49}, 5, 48, keep});
        v.push_back({{5, 49}, 5, 49, keep});
        v.push_back({{5, 49}, 5, 50, pay(600)});
        for (int d2 : {48, 49, 50}) v.push_back({{5, 49}, 6, d2, pay(600)});
        return v;
    }();
    return t;
}

inline bool payment_matches(const PaymentCase& c) {
    const auto got = resolve_mpl_payment(c.response, c.draw1, c.draw2);
    if (!c.money) return std::holds_alternative<KeepObject>(got);
    return std::holds_alternative<MoneyPayment>(got) && std::get<MoneyPayment>(got).amount == *c.money;
}

}  // namespace fixtures
