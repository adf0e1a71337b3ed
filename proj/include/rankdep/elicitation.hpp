#pragma once
// Two-screen multiple price list (MPL) and the two lottery tasks.
//
// Screen 1 rows are $1..$50; screen 2 rows are $x.02..$x+1.00 in 2-cent steps,
// where x is the screen-1 row. A selected row is the last row at which the
// subject keeps the object (or prefers lottery/option A).

#include <string>
#include <string_view>
#include <variant>

#include "rankdep/errors.hpp"
#include "rankdep/money.hpp"

namespace rankdep {

inline constexpr int kMplRows = 50;

struct MplResponse {
    int screen1_row = 0;  ///< 0 = would exchange even at $1 (decodes to $0.00)
    int screen2_row = 1;
};

struct KeepObject {
    bool operator==(const KeepObject&) const = default;
};
struct MoneyPayment {
    Cents amount;
    bool operator==(const MoneyPayment&) const = default;
};
using MplPayment = std::variant<KeepObject, MoneyPayment>;

inline void check_row(int row, std::string_view what, int min = 1) {
    if (row < min || row > kMplRows)
        throw ArgumentError(std::string(what) + " must be in " + std::to_string(min) + ".." + std::to_string(kMplRows) +
                            ", got " + std::to_string(row));
}

inline Cents decode_mpl(const MplResponse& r) {
    check_row(r.screen1_row, "screen1_row", 0);
    if (r.screen1_row == 0) return Cents{0};
    check_row(r.screen2_row, "screen2_row");
    return Cents{100 * r.screen1_row + 2 * r.screen2_row};
}

/// Inverse of decode_mpl on its range: even cent amounts in [$1.02, $51.00], plus $0.00.
inline MplResponse encode_mpl(Cents value) {
    const auto v = value.value();
    if (v == 0) return {0, 1};
    if (v < 102 || v > 100 * kMplRows + 100 || v % 2 != 0)
        throw ArgumentError("value " + value.str() + " is not representable on the price list");
    const int row1 = static_cast<int>((v - 2) / 100);
    return {row1, static_cast<int>((v - 100 * row1) / 2)};
}

inline MplPayment resolve_mpl_payment(const MplResponse& r, int draw1, int draw2) {
    check_row(r.screen1_row, "screen1_row", 0);
    if (r.screen1_row > 0) check_row(r.screen2_row, "screen2_row");
    check_row(draw1, "draw1");
    check_row(draw2, "draw2");
    if (draw1 < r.screen1_row) return KeepObject{};
    if (draw1 > r.screen1_row) return MoneyPayment{Cents{100 * draw1}};
    if (draw2 <= r.screen2_row) return KeepObject{};
    return MoneyPayment{Cents{100 * r.screen1_row + 2 * draw2}};
}

enum class LotteryTask { HOLT_LAURY, LOSS_AVERSION };

struct LotteryResponse {
    LotteryTask task = LotteryTask::HOLT_LAURY;
    int switch_row = 1;
};

/// Option B loss on row `row` of the loss-aversion list: $20.00 at row 1 down to $0.40 at row 50.
inline Cents loss_aversion_loss(int row) {
    check_row(row, "loss-aversion row");
    return Cents{2000 - 40 * (row - 1)};
}

/// `coin` is a uniform draw in [0, 1). Holt-Laury pays the high outcome when
/// coin < 2*draw/100; loss aversion pays the bonus (A) or loss (B) when coin < 0.5.
inline Cents resolve_lottery_payment(const LotteryResponse& r, int draw, double coin) {
    check_row(r.switch_row, "switch_row");
    check_row(draw, "draw");
    if (!(coin >= 0.0 && coin < 1.0)) throw ArgumentError("coin must lie in [0, 1)");
    const bool option_a = draw <= r.switch_row;
    if (r.task == LotteryTask::HOLT_LAURY) {
        const bool high = coin * 100.0 < 2.0 * draw;
        if (option_a) return Cents{high ? 2400 : 2000};
        return Cents{high ? 3800 : 1200};
    }
    const bool heads = coin < 0.5;
    if (option_a) return Cents{heads ? 3000 : 2000};
    return Cents{3000} - (heads ? loss_aversion_loss(draw) : Cents{0});
}

}  // namespace rankdep
