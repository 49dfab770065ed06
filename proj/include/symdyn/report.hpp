#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace symdyn {

struct ReportEntry {
    std::string name;
    nlohmann::json value;
    nlohmann::json bound;  // tolerance or bound the value was compared with; null for informational entries
    bool pass = false;
};

struct Report {
    std::string suite;
    std::vector<ReportEntry> entries;
    nlohmann::json environment = nlohmann::json::object();

    void add(std::string name, nlohmann::json value, nlohmann::json bound, bool pass);
    bool all_pass() const;
    int exit_code() const { return all_pass() ? 0 : 1; }
    nlohmann::json to_json() const;
    std::string dump() const;  // two-space indent, sorted keys, trailing newline
};

void write_text(const std::string& path, const std::string& text);
void emit(const Report& report, const std::string& path);

// Rows "n,partial_sum" for n = 0..size-1.
std::string trace_csv(const std::vector<long double>& partial_sums);
void emit_trace_csv(const std::vector<long double>& partial_sums, const std::string& path);

}  // namespace symdyn
