#ifndef TFIM_IO_HPP
#define TFIM_IO_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tfim/correlation_series.hpp"
#include "tfim/quench_spec.hpp"

namespace tfim::io {

// CSV with '#'-prefixed metadata header. The header embeds the full
// resolved configuration (schema version, spec, method options, seed), so
// a reader can reproduce the file bit for bit from the header alone.
// Columns: t,d,value,stderr,method.
inline constexpr int kSchemaVersion = 1;

struct CsvMeta {
    std::string command;                 // "correlate" or "scan"
    QuenchSpec spec;
    std::vector<std::pair<std::string, std::string>> options;  // resolved flags
};

std::string format_double(double x);  // shortest round-trip form (%.17g)

void write_header(std::ostream& os, const CsvMeta& meta, const std::string& columns);

void write_correlation_csv(std::ostream& os, const CsvMeta& meta,
                           const CorrelationSeries& series, const std::string& method);

// One row per scan point; cells already formatted (empty = not requested).
struct ScanTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};
void write_scan_csv(std::ostream& os, const CsvMeta& meta, const ScanTable& table);

// JSON mirrors of the two CSV layouts (same metadata, same values).
std::string correlation_json(const CsvMeta& meta, const CorrelationSeries& series,
                             const std::string& method);
std::string scan_json(const CsvMeta& meta, const ScanTable& table);

}  // namespace tfim::io

#endif
