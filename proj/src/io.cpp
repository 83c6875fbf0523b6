#include "tfim/io.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace tfim::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_header(std::ostream& os, const CsvMeta& meta, const std::string& columns) {
    os << "# tfim-quench schema=" << kSchemaVersion << "\n";
    os << "# cmd=" << meta.command << "\n";
    std::istringstream spec(serialize_spec(meta.spec));
    std::string line;
    while (std::getline(spec, line)) os << "# " << line << "\n";
    for (const auto& [k, v] : meta.options) os << "# " << k << "=" << v << "\n";
    os << "# columns: " << columns << "\n";
}

void write_correlation_csv(std::ostream& os, const CsvMeta& meta,
                           const CorrelationSeries& series, const std::string& method) {
    write_header(os, meta, "t,d,value,stderr,method");
    for (std::size_t it = 0; it < series.times.size(); ++it) {
        for (std::size_t id = 0; id < series.distances.size(); ++id) {
            os << format_double(series.times[it]) << ',' << series.distances[id] << ','
               << format_double(series.value(it, id)) << ','
               << format_double(series.stderr_at(it, id)) << ',' << method << "\n";
        }
    }
}

void write_scan_csv(std::ostream& os, const CsvMeta& meta, const ScanTable& table) {
    std::string cols;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) cols += ',';
        cols += table.columns[i];
    }
    write_header(os, meta, cols);
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << row[i];
        }
        os << "\n";
    }
}

namespace {

nlohmann::json meta_json(const CsvMeta& meta) {
    nlohmann::json j;
    j["schema"] = kSchemaVersion;
    j["cmd"] = meta.command;
    j["spec"]["n"] = meta.spec.n;
    j["spec"]["j"] = meta.spec.j;
    j["spec"]["h_i"] = meta.spec.h_i;
    j["spec"]["h_f"] = meta.spec.h_f;
    j["spec"]["t_list"] = meta.spec.t_grid;
    for (const auto& [k, v] : meta.options) j["options"][k] = v;
    return j;
}

}  // namespace

std::string correlation_json(const CsvMeta& meta, const CorrelationSeries& series,
                             const std::string& method) {
    nlohmann::json j = meta_json(meta);
    j["method"] = method;
    j["columns"] = {"t", "d", "value", "stderr"};
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t it = 0; it < series.times.size(); ++it)
        for (std::size_t id = 0; id < series.distances.size(); ++id)
            rows.push_back({series.times[it], series.distances[id], series.value(it, id),
                            series.stderr_at(it, id)});
    j["rows"] = rows;
    return j.dump(2);
}

std::string scan_json(const CsvMeta& meta, const ScanTable& table) {
    nlohmann::json j = meta_json(meta);
    j["columns"] = table.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) rows.push_back(row);
    j["rows"] = rows;
    return j.dump(2);
}

}  // namespace tfim::io
