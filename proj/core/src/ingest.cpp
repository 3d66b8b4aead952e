#include "dta/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace dta {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

long long parse_count(const std::string& s, int row, const std::string& col) {
    const std::string t = trim(s);
    if (t.empty())
        throw input_error("row " + std::to_string(row) + ", column " + col + ": empty value");
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(t, &pos);
    } catch (const std::exception&) {
        throw input_error("row " + std::to_string(row) + ", column " + col +
                          ": not an integer: '" + t + "'");
    }
    if (pos != t.size())
        throw input_error("row " + std::to_string(row) + ", column " + col +
                          ": not an integer: '" + t + "'");
    if (v < 0)
        throw input_error("row " + std::to_string(row) + ", column " + col +
                          ": negative count " + t);
    return v;
}

} // namespace

CorrectionPolicy parse_policy(const std::string& name) {
    if (name == "all") return CorrectionPolicy::all;
    if (name == "only-zero") return CorrectionPolicy::only_zero;
    if (name == "none") return CorrectionPolicy::none;
    throw input_error("unknown correction policy '" + name + "' (expected all|only-zero|none)");
}

std::string policy_name(CorrectionPolicy policy) {
    switch (policy) {
        case CorrectionPolicy::all: return "all";
        case CorrectionPolicy::only_zero: return "only-zero";
        case CorrectionPolicy::none: return "none";
    }
    return "?";
}

std::vector<StudyTable> parse_studies(const std::string& csv_text,
                                      const std::vector<std::string>& header_names) {
    static const std::vector<std::string> kCanonical = {"study", "tp", "fn", "fp", "tn"};
    std::vector<std::string> expected = kCanonical;
    if (!header_names.empty()) {
        if (header_names.size() != 5)
            throw input_error("column map must name exactly 5 columns (study,TP,FN,FP,TN order)");
        for (std::size_t i = 0; i < 5; ++i) expected[i] = lower(trim(header_names[i]));
    }

    std::istringstream in(csv_text);
    std::string line;
    bool have_header = false;
    std::vector<StudyTable> studies;
    std::set<std::string> seen_ids;
    int row = 0;  // 1-based data row number

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);

        if (!have_header) {
            if (fields.size() != 5)
                throw input_error("header: expected 5 columns study,TP,FN,FP,TN, got " +
                                  std::to_string(fields.size()));
            for (std::size_t i = 0; i < 5; ++i) {
                if (lower(fields[i]) != expected[i])
                    throw input_error("header: column " + std::to_string(i + 1) + " is '" +
                                      fields[i] + "', expected '" + expected[i] + "'");
            }
            have_header = true;
            continue;
        }

        ++row;
        if (fields.size() != 5)
            throw input_error("row " + std::to_string(row) + ": expected 5 columns, got " +
                              std::to_string(fields.size()));
        StudyTable t;
        t.id = fields[0];
        if (t.id.empty()) throw input_error("row " + std::to_string(row) + ": empty study id");
        if (!seen_ids.insert(t.id).second)
            throw input_error("row " + std::to_string(row) + ": duplicate study id '" + t.id + "'");
        t.tp = parse_count(fields[1], row, "TP");
        t.fn = parse_count(fields[2], row, "FN");
        t.fp = parse_count(fields[3], row, "FP");
        t.tn = parse_count(fields[4], row, "TN");
        if (t.tp + t.fn < 1)
            throw input_error("row " + std::to_string(row) + ": TP+FN must be >= 1");
        if (t.fp + t.tn < 1)
            throw input_error("row " + std::to_string(row) + ": FP+TN must be >= 1");
        studies.push_back(std::move(t));
    }

    if (!have_header) throw input_error("empty input: no header row");
    if (studies.empty()) throw input_error("no data rows after the header");
    return studies;
}

CorrectedCounts apply_correction(const StudyTable& t, double c, CorrectionPolicy policy) {
    if (c < 0.0) throw input_error("correction constant must be >= 0");
    bool add = false;
    switch (policy) {
        case CorrectionPolicy::all: add = true; break;
        case CorrectionPolicy::only_zero:
            add = (t.tp == 0 || t.fn == 0 || t.fp == 0 || t.tn == 0);
            break;
        case CorrectionPolicy::none: add = false; break;
    }
    const double a = add ? c : 0.0;
    return {t.id, t.tp + a, t.fn + a, t.fp + a, t.tn + a};
}

std::vector<CorrectedCounts> apply_correction(const std::vector<StudyTable>& tables, double c,
                                              CorrectionPolicy policy) {
    std::vector<CorrectedCounts> out;
    out.reserve(tables.size());
    for (const StudyTable& t : tables) out.push_back(apply_correction(t, c, policy));
    return out;
}

TransformedStudy transform_study(const CorrectedCounts& c) {
    if (c.tp <= 0.0 || c.fn <= 0.0 || c.fp <= 0.0 || c.tn <= 0.0)
        throw input_error("study '" + c.id +
                          "': zero corrected cell; use --correction with policy all or only-zero");
    TransformedStudy s;
    s.id = c.id;
    s.y.v1 = logit(c.tp / (c.tp + c.fn));
    s.y.v2 = logit(c.fp / (c.fp + c.tn));
    s.S = Mat2::diag(1.0 / c.tp + 1.0 / c.fn, 1.0 / c.fp + 1.0 / c.tn);
    s.se = {std::sqrt(s.S.a11), std::sqrt(s.S.a22)};
    return s;
}

std::vector<TransformedStudy> transform_studies(const std::vector<CorrectedCounts>& counts) {
    std::vector<TransformedStudy> out;
    out.reserve(counts.size());
    for (const CorrectedCounts& c : counts) out.push_back(transform_study(c));
    return out;
}

} // namespace dta
