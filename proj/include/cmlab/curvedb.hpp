#pragma once

#include "cmlab/cmcurve.hpp"

#include <istream>
#include <string>
#include <vector>

namespace cmlab {

class CurveDB {
public:
    // JSON lines; ParseError carries the 1-based line number.
    static CurveDB parse(std::istream& in, const std::string& source = "<stream>");
    static CurveDB load(const std::string& path);
    // CMHL_DB if set, otherwise the bundled data file.
    static std::string default_path();

    const CMCurve& get(const std::string& label) const;
    const std::vector<CMCurve>& curves() const { return curves_; }
    bool empty() const { return curves_.empty(); }

private:
    std::vector<CMCurve> curves_;
};

CurveRecord parse_curve_record(const std::string& json_line);

}  // namespace cmlab
