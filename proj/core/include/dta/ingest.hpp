#pragma once

#include <string>
#include <vector>

#include "dta/numerics.hpp"

namespace dta {

// One study's 2x2 diagnostic table.
struct StudyTable {
    std::string id;
    long long tp = 0, fn = 0, fp = 0, tn = 0;
};

// Real-valued counts after continuity correction.
struct CorrectedCounts {
    std::string id;
    double tp = 0.0, fn = 0.0, fp = 0.0, tn = 0.0;
};

// Logit-scale study outcome: y = (logit sensitivity, logit FPR) with diagonal
// within-study covariance S (the two proportions come from disjoint subjects).
struct TransformedStudy {
    std::string id;
    Vec2 y;
    Mat2 S;
    Vec2 se;
};

enum class CorrectionPolicy { all, only_zero, none };

CorrectionPolicy parse_policy(const std::string& name);  // "all" | "only-zero" | "none"
std::string policy_name(CorrectionPolicy policy);

// Parse CSV with header `study,TP,FN,FP,TN` (case-insensitive). `header_names`
// substitutes expected column names (same order) for files with renamed headers.
// Errors cite the 1-based data row and the column.
std::vector<StudyTable> parse_studies(const std::string& csv_text,
                                      const std::vector<std::string>& header_names = {});

// policy all: add c to every cell of every study; only-zero: only to studies
// containing a zero cell; none: unchanged.
CorrectedCounts apply_correction(const StudyTable& t, double c, CorrectionPolicy policy);
std::vector<CorrectedCounts> apply_correction(const std::vector<StudyTable>& tables, double c,
                                              CorrectionPolicy policy);

TransformedStudy transform_study(const CorrectedCounts& c);
std::vector<TransformedStudy> transform_studies(const std::vector<CorrectedCounts>& counts);

} // namespace dta
