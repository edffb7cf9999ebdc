#include "cmlab/curvedb.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>

namespace cmlab {

namespace {

std::string rational_field(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw Error(Errc::ParseError, std::string("field ") + key + " must be a rational string");
}

}  // namespace

CurveRecord parse_curve_record(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::ParseError, e.what());
    }
    CurveRecord r;
    try {
        r.label = j.at("label").get<std::string>();
        r.d_K = j.at("d_K").get<int>();
        r.A = rational_field(j, "A");
        r.B = rational_field(j, "B");
        const auto& c = j.at("cond_gen");
        if (!c.is_array() || c.size() != 2) throw Error(Errc::ParseError, "cond_gen must be [a, b]");
        r.cond_a = c[0].get<long>();
        r.cond_b = c[1].get<long>();
        r.defined_over_Q = j.at("defined_over_Q").get<bool>();
        if (j.contains("conductor")) r.conductor = j.at("conductor").get<long>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
    return r;
}

CurveDB CurveDB::parse(std::istream& in, const std::string& source) {
    CurveDB db;
    std::set<std::string> labels;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = source + ":" + std::to_string(lineno);
        try {
            CurveRecord rec = parse_curve_record(line);
            if (!labels.insert(rec.label).second)
                throw Error(Errc::DuplicateLabel, "duplicate label " + rec.label);
            db.curves_.push_back(load_curve(rec));
        } catch (const Error& e) {
            throw Error(e.code(), where + ": " + e.what());
        }
    }
    return db;
}

CurveDB CurveDB::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, "cannot open " + path);
    return parse(in, path);
}

std::string CurveDB::default_path() {
    if (const char* env = std::getenv("CMHL_DB")) return env;
    return std::string(CMLAB_DATA_DIR) + "/curves.jsonl";
}

const CMCurve& CurveDB::get(const std::string& label) const {
    for (const auto& c : curves_)
        if (c.label == label) return c;
    throw Error(Errc::UnknownCurve, "no curve labelled " + label);
}

}  // namespace cmlab
