#pragma once

#include <string>
#include <vector>

#include "torsion/config.hpp"
#include "torsion/langevin.hpp"

namespace torsion {

// Columnar text form: '#'-prefixed header lines (format tag, channel, dt,
// seed, fingerprint, echoed config), then one sample per line at full
// decimal precision. The echoed config keys are prefixed "config.".
void write_timeseries_text(const TimeSeries& ts, const KeyValueConfig& echo,
                           const std::string& path);

// Parse errors name the offending line. When header_out is given it
// receives the echoed config (without the "config." prefix).
TimeSeries read_timeseries_text(const std::string& path,
                                KeyValueConfig* header_out = nullptr);

// Compact binary form: magic "TPDLTS01", little-endian u32 version and
// channel, f64 dt, u64 seed / fingerprint / count, then 64-bit floats.
void write_timeseries_binary(const TimeSeries& ts, const std::string& path);
TimeSeries read_timeseries_binary(const std::string& path);

// Two-column (or wider) plot-ready data file with the same header style.
void write_columns_text(const std::string& path,
                        const KeyValueConfig& echo,
                        const std::vector<std::string>& column_names,
                        const std::vector<std::vector<double>>& columns);

}  // namespace torsion
