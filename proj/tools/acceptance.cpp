// Runs `cmhl suite` three times in separate processes: criteria 1..9 come from the
// first report, criterion 10 compares the reports byte for byte (two runs with one
// worker, one with eight).
#include <json.hpp>

#include <array>
#include <cstdio>
#include <iostream>
#include <string>

#ifndef CMHL_PATH
#error "CMHL_PATH must name the cmhl executable"
#endif

namespace {

struct Run {
    std::string out;
    int status = -1;
};

Run run_suite(int workers) {
    std::string cmd = std::string("\"") + CMHL_PATH + "\" --no-timing --workers " + std::to_string(workers) + " suite";
    Run r;
    FILE* f = popen(cmd.c_str(), "r");
    if (!f) return r;
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) r.out.append(buf.data(), n);
    r.status = pclose(f);
    return r;
}

}  // namespace

int main() {
    Run a = run_suite(1), b = run_suite(1), c = run_suite(8);
    bool all = true;
    auto line = [&](int id, bool pass, const std::string& what) {
        std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << what << "\n";
        all = all && pass;
    };

    auto report = nlohmann::ordered_json::parse(a.out, nullptr, false);
    if (report.is_discarded() || !report.contains("result")) {
        std::cout << "suite produced no report (status " << a.status << ")\n" << a.out;
        for (int id = 1; id <= 9; ++id) line(id, false, "no report");
    } else {
        const auto& crit = report["result"]["criteria"];
        for (int id = 1; id <= 9; ++id) {
            bool found = false;
            for (const auto& cr : crit) {
                if (cr["id"] != id) continue;
                found = true;
                line(id, cr["pass"].get<bool>(), cr["name"].get<std::string>());
                if (!cr["pass"].get<bool>()) std::cout << "  " << cr["detail"].dump() << "\n";
            }
            if (!found) line(id, false, "missing from the report");
        }
    }
    bool same = !a.out.empty() && a.out == b.out && a.out == c.out;
    line(10, same, "suite report identical across two runs and across 1 and 8 workers");
    if (!same) std::cout << "  sizes " << a.out.size() << " " << b.out.size() << " " << c.out.size() << "\n";
    return all ? 0 : 1;
}
