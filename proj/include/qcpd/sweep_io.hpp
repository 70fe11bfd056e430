#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qcpd/experiments.hpp"

namespace qcpd {

/// Header of the long-format sweep CSV; one line per (axis value, strategy).
inline constexpr const char *kSweepCsvHeader =
    "axis,strategy,mean,std_error,trials,epsilon,seed";

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_real(double v);

void write_sweep_csv(const SweepTable &table, std::ostream &out);
[[nodiscard]] nlohmann::ordered_json sweep_to_json(const SweepTable &table);
[[nodiscard]] nlohmann::ordered_json estimate_to_json(const EstimateWithError &e);

} // namespace qcpd
