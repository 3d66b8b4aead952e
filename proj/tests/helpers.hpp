#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dta/ingest.hpp"

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<dta::StudyTable> lag_tables() {
    return dta::parse_studies(slurp(LAG_CSV_PATH));
}

inline std::vector<dta::TransformedStudy> load_lag() {
    return dta::transform_studies(
        dta::apply_correction(lag_tables(), 0.5, dta::CorrectionPolicy::all));
}
