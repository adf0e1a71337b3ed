#pragma once
// Experiment session rows: Phase I values, Phase II report and allocation,
// Phase II value of the received good, and covariates. One row per subject.

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rankdep/core.hpp"
#include "rankdep/errors.hpp"
#include "rankdep/mechanisms.hpp"
#include "rankdep/money.hpp"

namespace rankdep::analysis {

inline constexpr int kSessionGoods = 5;
inline constexpr std::array<std::string_view, kSessionGoods> kGoodNames{"backpack", "bottle", "notebook", "mug",
                                                                        "pens"};
inline constexpr std::string_view kSessionHeader =
    "subject_id,treatment,group_id,v_backpack,v_bottle,v_notebook,v_mug,v_pens,rank1,rank2,rank3,rank4,rank5,"
    "good_received,phase2_value,phase1_order,risk_row,loss_row,crt,female,practice";

struct SubjectRecord {
    std::string subject_id;
    MechanismKind treatment = MechanismKind::RSD;
    int group_id = 0;
    std::array<Cents, kSessionGoods> phase1_value{};
    RankList report = RankList::identity(kSessionGoods);
    GoodId good_received = 0;
    Cents phase2_value;
    int phase1_order = 1;
    int risk_row = 1;
    int loss_row = 1;
    int crt = 0;
    int female = 0;
    int practice = 0;

    int rank_received() const { return report.rank(good_received); }
    bool operator==(const SubjectRecord&) const = default;
};

/// Accepts a good name ("mug") or its id ("3").
inline GoodId parse_good(std::string_view s) {
    for (int g = 0; g < kSessionGoods; ++g)
        if (s == kGoodNames[g]) return g;
    if (s.size() == 1 && s[0] >= '0' && s[0] < '0' + kSessionGoods) return s[0] - '0';
    throw std::invalid_argument("unknown good '" + std::string(s) + "'");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline int parse_int(std::string_view s, std::string_view column, std::size_t row) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError("column " + std::string(column) + ": non-numeric cell '" + std::string(s) + "'", row);
    return v;
}

inline void check_range(int v, int lo, int hi, std::string_view column, std::size_t row) {
    if (v < lo || v > hi)
        throw DataError("column " + std::string(column) + ": " + std::to_string(v) + " outside " +
                            std::to_string(lo) + ".." + std::to_string(hi),
                        row);
}

inline Cents parse_money_cell(std::string_view s, std::string_view column, std::size_t row) {
    Cents c;
    try {
        c = Cents::parse(s);
    } catch (const std::invalid_argument&) {
        throw DataError("column " + std::string(column) + ": non-numeric cell '" + std::string(s) + "'", row);
    }
    if (c < Cents{0}) throw DataError("column " + std::string(column) + ": negative value", row);
    return c;
}

}  // namespace detail

/// Parses a session CSV. Row numbers in diagnostics count the header as row 1.
inline std::vector<SubjectRecord> read_session(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: missing header", 1);
    const auto header = detail::split_csv(line);
    const auto expected = detail::split_csv(kSessionHeader);
    for (std::size_t c = 0; c < expected.size(); ++c) {
        if (c >= header.size()) throw DataError("missing column " + std::string(expected[c]), 1);
        if (header[c] != expected[c])
            throw DataError("expected column " + std::string(expected[c]) + ", found '" + std::string(header[c]) + "'",
                            1);
    }
    if (header.size() > expected.size()) throw DataError("unexpected extra column", 1);

    std::vector<SubjectRecord> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv(line);
        if (cells.size() != expected.size())
            throw DataError("expected " + std::to_string(expected.size()) + " cells, found " +
                                std::to_string(cells.size()),
                            row);
        SubjectRecord r;
        r.subject_id = std::string(cells[0]);
        if (r.subject_id.empty()) throw DataError("column subject_id: empty", row);
        try {
            r.treatment = parse_mechanism(cells[1]);
        } catch (const std::exception&) {
            throw DataError("column treatment: expected rsd or boston, found '" + std::string(cells[1]) + "'", row);
        }
        r.group_id = detail::parse_int(cells[2], "group_id", row);
        for (int g = 0; g < kSessionGoods; ++g)
            r.phase1_value[g] = detail::parse_money_cell(cells[3 + g], expected[3 + g], row);
        std::vector<GoodId> order(kSessionGoods);
        for (int k = 0; k < kSessionGoods; ++k) {
            try {
                order[k] = parse_good(cells[8 + k]);
            } catch (const std::invalid_argument& e) {
                throw DataError("column " + std::string(expected[8 + k]) + ": " + e.what(), row);
            }
        }
        if (!is_permutation_of_n(order)) throw DataError("report is not a permutation of the five goods", row);
        r.report = RankList{std::move(order)};
        try {
            r.good_received = parse_good(cells[13]);
        } catch (const std::invalid_argument& e) {
            throw DataError(std::string("column good_received: ") + e.what(), row);
        }
        r.phase2_value = detail::parse_money_cell(cells[14], "phase2_value", row);
        r.phase1_order = detail::parse_int(cells[15], "phase1_order", row);
        detail::check_range(r.phase1_order, 1, 20, "phase1_order", row);
        r.risk_row = detail::parse_int(cells[16], "risk_row", row);
        detail::check_range(r.risk_row, 1, 50, "risk_row", row);
        r.loss_row = detail::parse_int(cells[17], "loss_row", row);
        detail::check_range(r.loss_row, 1, 50, "loss_row", row);
        r.crt = detail::parse_int(cells[18], "crt", row);
        detail::check_range(r.crt, 0, 3, "crt", row);
        r.female = detail::parse_int(cells[19], "female", row);
        detail::check_range(r.female, 0, 1, "female", row);
        r.practice = detail::parse_int(cells[20], "practice", row);
        if (r.practice < 0) throw DataError("column practice: negative", row);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<SubjectRecord> load_session(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
        return read_session(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void write_session(std::ostream& out, const std::vector<SubjectRecord>& records) {
    out << kSessionHeader << '\n';
    for (const auto& r : records) {
        out << r.subject_id << ',' << to_string(r.treatment) << ',' << r.group_id;
        for (Cents v : r.phase1_value) out << ',' << v.str();
        for (GoodId g : r.report.order()) out << ',' << kGoodNames[g];
        out << ',' << kGoodNames[r.good_received] << ',' << r.phase2_value.str() << ',' << r.phase1_order << ','
            << r.risk_row << ',' << r.loss_row << ',' << r.crt << ',' << r.female << ',' << r.practice << '\n';
    }
}

inline void write_session(const std::string& path, const std::vector<SubjectRecord>& records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    write_session(out, records);
}

}  // namespace rankdep::analysis
