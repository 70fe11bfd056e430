#include "qcpd/sweep_io.hpp"

#include <array>
#include <charconv>
#include <ostream>

namespace qcpd {

std::string format_real(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

void write_sweep_csv(const SweepTable &table, std::ostream &out) {
    out << kSweepCsvHeader << '\n';
    for (const SweepRow &row : table.rows) {
        for (const EstimateWithError &e : row.entries) {
            out << format_real(row.axis_value) << ',' << e.strategy << ','
                << format_real(e.mean) << ',' << format_real(e.std_error) << ','
                << e.trials << ',' << format_real(e.epsilon) << ',' << e.seed
                << '\n';
        }
    }
}

nlohmann::ordered_json estimate_to_json(const EstimateWithError &e) {
    nlohmann::ordered_json j;
    j["strategy"] = e.strategy;
    j["mean"] = e.mean;
    j["std_error"] = e.std_error;
    j["trials"] = e.trials;
    j["invalid"] = e.invalid;
    j["n"] = e.n;
    j["c_squared"] = e.c_squared;
    if (e.k) {
        j["k"] = *e.k;
    } else {
        j["k"] = "averaged";
    }
    j["epsilon"] = e.epsilon;
    j["seed"] = e.seed;
    return j;
}

nlohmann::ordered_json sweep_to_json(const SweepTable &table) {
    nlohmann::ordered_json j;
    j["axis"] = table.axis;
    j["master_seed"] = table.master_seed;
    j["strategies"] = table.strategies;
    auto rows = nlohmann::ordered_json::array();
    for (const SweepRow &row : table.rows) {
        nlohmann::ordered_json r;
        r["axis_value"] = row.axis_value;
        auto entries = nlohmann::ordered_json::array();
        for (const auto &e : row.entries) {
            entries.push_back(estimate_to_json(e));
        }
        r["entries"] = std::move(entries);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

} // namespace qcpd
