#include "symdyn/report.hpp"

#include <cstdio>
#include <fstream>

#include "symdyn/error.hpp"

namespace symdyn {

void Report::add(std::string name, nlohmann::json value, nlohmann::json bound, bool pass) {
    entries.push_back({std::move(name), std::move(value), std::move(bound), pass});
}

bool Report::all_pass() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return true;
}

nlohmann::json Report::to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["environment"] = environment;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : entries)
        j["entries"].push_back({{"name", e.name}, {"value", e.value}, {"bound", e.bound}, {"pass", e.pass}});
    j["all_pass"] = all_pass();
    j["exit_code"] = exit_code();
    return j;
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error("write to '" + path + "' failed");
}

void emit(const Report& report, const std::string& path) { write_text(path, report.dump()); }

std::string trace_csv(const std::vector<long double>& partial_sums) {
    std::string s = "n,partial_sum\n";
    char buf[64];
    for (std::size_t n = 0; n < partial_sums.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", n, static_cast<double>(partial_sums[n]));
        s += buf;
    }
    return s;
}

void emit_trace_csv(const std::vector<long double>& partial_sums, const std::string& path) {
    write_text(path, trace_csv(partial_sums));
}

}  // namespace symdyn
