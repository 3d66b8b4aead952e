#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dta/bivariate.hpp"
#include "dta/egger.hpp"
#include "dta/ingest.hpp"
#include "dta/mvpbt.hpp"
#include "dta/sroc.hpp"
#include "jsonw.hpp"
#include "svg.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kSchema = 1;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string input;
    double correction = 0.5;
    std::string policy = "all";
    long long B = 2000;
    std::uint64_t seed = 1;
    std::string se_cov = "total";
    int grid = 5000;
    double level = 0.95;
    int threads = 0;  // 0 = hardware concurrency
    std::string out;
    std::string plots_prefix;
    std::vector<std::string> column_map;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read failure on " + path);
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open output file: " + path);
    out << content;
    out.flush();
    if (!out) throw io_error("write failure on " + path);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

struct EggerPart {
    dta::EggerResult res;
    dta::UniFit uni;
    std::vector<double> y, v;
};

struct Analysis {
    std::string digest;
    std::vector<dta::StudyTable> tables;
    std::vector<dta::CorrectedCounts> counts;
    std::vector<dta::TransformedStudy> studies;
    std::optional<dta::BivariateFit> fit;
    std::optional<dta::FitSummary> summary;
    std::optional<dta::HSROCParams> hsroc;
    std::optional<dta::SROCCurve> curve;
    std::optional<EggerPart> egger_sens, egger_fpr;
    std::optional<dta::PBTestResult> m2, m3;
    std::vector<std::string> warnings;
};

Analysis prepare(const Options& o) {
    Analysis a;
    const std::string raw = read_file(o.input);
    a.digest = fnv1a_hex(raw);
    a.tables = dta::parse_studies(raw, o.column_map);
    a.counts = dta::apply_correction(a.tables, o.correction, dta::parse_policy(o.policy));
    a.studies = dta::transform_studies(a.counts);
    return a;
}

void compute_fit(Analysis& a, const Options& o) {
    a.fit = dta::fit_reitsma(a.studies);
    if (!a.fit->converged) a.warnings.push_back("bivariate REML fit did not converge");
    if (a.fit->boundary)
        a.warnings.push_back("between-study covariance estimated at the zero boundary");
    a.summary = dta::summarize(*a.fit, o.level);
}

void compute_sroc(Analysis& a, const Options& o) {
    try {
        a.hsroc = dta::map_hsroc(*a.fit);
        a.curve = dta::sroc_curve(*a.fit, a.tables, o.grid);
    } catch (const dta::fit_error& e) {
        a.warnings.push_back(std::string("SROC unavailable: ") + e.what());
    }
}

void compute_egger(Analysis& a) {
    auto part = [&](int outcome) {
        EggerPart p;
        for (const dta::TransformedStudy& s : a.studies) {
            p.y.push_back(outcome == 0 ? s.y.v1 : s.y.v2);
            p.v.push_back(outcome == 0 ? s.S.a11 : s.S.a22);
        }
        p.res = dta::egger_test(p.y, p.v);
        p.uni = dta::uni_reml_fit(p.y, p.v);
        return p;
    };
    a.egger_sens = part(0);
    a.egger_fpr = part(1);
}

void compute_tests(Analysis& a, const Options& o) {
    if (o.B < 100) throw dta::input_error("--B must be >= 100");
    const dta::SECovariate cov = dta::parse_se_covariate(o.se_cov);
    a.m2 = dta::msset2(a.studies, *a.fit, cov);
    a.m3 = dta::msset3(a.studies, o.B, o.seed, cov, o.threads);
    if (a.m3->n_failed > o.B / 100)
        a.warnings.push_back("more than 1% of bootstrap replicates failed (" +
                             std::to_string(a.m3->n_failed) + " of " + std::to_string(o.B) + ")");
}

// ---- JSON report ----

void emit_settings(JsonW& w, const Options& o) {
    w.begin_obj("settings");
    w.str("input", o.input);
    w.num("correction", o.correction);
    w.str("correction_policy", o.policy);
    w.integer("B", o.B);
    w.uinteger("seed", o.seed);
    w.str("se_covariate", o.se_cov);
    w.integer("grid", o.grid);
    w.num("level", o.level);
    w.integer("threads", o.threads);
    if (!o.column_map.empty()) {
        w.begin_arr("column_map");
        for (const std::string& c : o.column_map) w.arr_str(c);
        w.end_arr();
    }
    if (!o.plots_prefix.empty()) w.str("plots_prefix", o.plots_prefix);
    w.end_obj();
}

void emit_vec2(JsonW& w, const char* k, dta::Vec2 v) {
    w.begin_arr(k);
    w.arr_num(v.v1);
    w.arr_num(v.v2);
    w.end_arr();
}

void emit_mat2(JsonW& w, const char* k, const dta::Mat2& m) {
    w.begin_arr(k);
    w.begin_arr();
    w.arr_num(m.a11);
    w.arr_num(m.a12);
    w.end_arr();
    w.begin_arr();
    w.arr_num(m.a21);
    w.arr_num(m.a22);
    w.end_arr();
    w.end_arr();
}

void emit_fit(JsonW& w, const Analysis& a) {
    const dta::BivariateFit& f = *a.fit;
    const dta::FitSummary& s = *a.summary;
    w.begin_obj("fit");
    emit_vec2(w, "mu", f.mu);
    emit_vec2(w, "se_mu", {s.sens.se, s.fpr.se});
    emit_vec2(w, "z", {s.sens.z, s.fpr.z});
    emit_vec2(w, "p", {s.sens.p, s.fpr.p});
    emit_vec2(w, "ci_logit_sens", {s.sens.ci_lb, s.sens.ci_ub});
    emit_vec2(w, "ci_logit_fpr", {s.fpr.ci_lb, s.fpr.ci_ub});
    w.num("sensitivity", s.sens.back);
    emit_vec2(w, "sensitivity_ci", {s.sens.back_lb, s.sens.back_ub});
    w.num("fpr", s.fpr.back);
    emit_vec2(w, "fpr_ci", {s.fpr.back_lb, s.fpr.back_ub});
    emit_mat2(w, "sigma", f.sigma);
    emit_mat2(w, "cov_mu", f.cov_mu);
    emit_vec2(w, "sd", f.sd);
    w.num("rho", f.rho);
    w.num("loglik", f.loglik);
    w.num("aic", f.aic);
    w.num("bic", f.bic);
    w.integer("n", f.n);
    w.boolean("converged", f.converged);
    w.boolean("boundary", f.boundary);
    w.end_obj();
}

void emit_sroc(JsonW& w, const Analysis& a) {
    if (!a.hsroc || !a.curve) return;
    w.begin_obj("sroc");
    w.num("lambda", a.hsroc->Lambda);
    w.num("beta", a.hsroc->Beta);
    w.num("theta", a.hsroc->Theta);
    w.num("tau_theta2", a.hsroc->tau_theta2);
    w.num("tau_alpha2", a.hsroc->tau_alpha2);
    w.num("auc", a.curve->auc);
    w.num("pauc", a.curve->pauc);
    w.begin_arr("fpr_range");
    w.arr_num(a.curve->fpr_range.first);
    w.arr_num(a.curve->fpr_range.second);
    w.end_arr();
    w.end_obj();
}

void emit_egger_block(JsonW& w, const char* k, const EggerPart& p) {
    w.begin_obj(k);
    w.num("slope", p.res.slope);
    w.num("limit_b", p.res.limit_b);
    w.num("t", p.res.t);
    w.integer("df", p.res.df);
    w.num("p", p.res.p);
    w.num("ci_lb", p.res.ci_lb);
    w.num("ci_ub", p.res.ci_ub);
    w.num("phi", p.res.phi);
    w.num("funnel_mu", p.uni.mu);
    w.num("funnel_tau2", p.uni.tau2);
    w.end_obj();
}

void emit_egger(JsonW& w, const Analysis& a) {
    w.begin_obj("egger");
    emit_egger_block(w, "logit_sens", *a.egger_sens);
    emit_egger_block(w, "logit_fpr", *a.egger_fpr);
    w.end_obj();
}

void emit_msset2(JsonW& w, const Analysis& a, const Options& o) {
    w.begin_obj("msset2");
    w.num("T", a.m2->T);
    w.num("P", a.m2->P);
    emit_vec2(w, "b0", a.m2->b0);
    w.str("se_covariate", o.se_cov);
    w.end_obj();
}

void emit_msset3(JsonW& w, const Analysis& a, const Options& o) {
    const dta::PBTestResult& r = *a.m3;
    w.begin_obj("msset3");
    w.num("T", r.T);
    w.num("P", r.P);
    emit_vec2(w, "b0", r.b0);
    w.integer("B", r.B);
    w.uinteger("seed", r.seed);
    w.integer("n_failed", r.n_failed);
    w.str("se_covariate", o.se_cov);
    double mean = 0.0;
    for (double t : r.boot_stats) mean += t / double(r.boot_stats.size());
    w.num("boot_mean", mean);
    w.begin_arr("boot_stats");
    for (double t : r.boot_stats) w.arr_num(t);
    w.end_arr();
    w.end_obj();
}

std::string build_report(const Analysis& a, const Options& o) {
    JsonW w;
    w.begin_obj();
    w.integer("schema", kSchema);
    w.str("tool_version", kToolVersion);
    w.str("input_digest", a.digest);
    emit_settings(w, o);
    w.integer("n_studies", static_cast<long long>(a.tables.size()));
    if (a.fit) emit_fit(w, a);
    if (a.hsroc && a.curve) emit_sroc(w, a);
    if (a.egger_sens && a.egger_fpr) emit_egger(w, a);
    if (a.m2) emit_msset2(w, a, o);
    if (a.m3) emit_msset3(w, a, o);
    w.begin_arr("warnings");
    for (const std::string& s : a.warnings) w.arr_str(s);
    w.end_arr();
    w.end_obj();
    return w.take();
}

// ---- plots ----

std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
    const double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / target)));
    const double err = span / target / step;
    if (err >= 7.5)
        step *= 10.0;
    else if (err >= 3.5)
        step *= 5.0;
    else if (err >= 1.5)
        step *= 2.0;
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step)
        ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return ticks;
}

std::string render_sroc_svg(const Analysis& a, const Options& o) {
    svgplot::Frame f;
    f.x0 = 0;
    f.x1 = 1;
    f.y0 = 0;
    f.y1 = 1;
    std::string s = svgplot::header(f);
    s += svgplot::axes(f, {0, 0.2, 0.4, 0.6, 0.8, 1}, {0, 0.2, 0.4, 0.6, 0.8, 1},
                       "False positive rate", "Sensitivity", "SROC curve");
    const std::string pct = std::to_string(static_cast<int>(std::lround(o.level * 100)));
    if (a.curve) {
        s += svgplot::polyline(f, a.curve->grid, "stroke=\"#1f6fb4\" stroke-width=\"1.6\"");
        s += svgplot::polyline(f, dta::confidence_region(*a.fit, o.level),
                               "stroke=\"#333333\" stroke-width=\"1.2\" stroke-dasharray=\"6 3\"",
                               true);
        s += svgplot::polyline(f, dta::prediction_region(*a.fit, o.level),
                               "stroke=\"#888888\" stroke-width=\"1.2\" stroke-dasharray=\"2 3\"",
                               true);
    }
    for (const dta::TransformedStudy& st : a.studies) {
        s += svgplot::circle(f.px(dta::invlogit(st.y.v2)), f.py(dta::invlogit(st.y.v1)), 3.5,
                             "fill=\"#4682b4\" fill-opacity=\"0.65\"");
    }
    if (a.fit) {  // summary point as a filled diamond
        const double cx = f.px(dta::invlogit(a.fit->mu.v2));
        const double cy = f.py(dta::invlogit(a.fit->mu.v1));
        s += "<polygon points=\"" + svgplot::fmt(cx) + "," + svgplot::fmt(cy - 5.5) + " " +
             svgplot::fmt(cx + 5.5) + "," + svgplot::fmt(cy) + " " + svgplot::fmt(cx) + "," +
             svgplot::fmt(cy + 5.5) + " " + svgplot::fmt(cx - 5.5) + "," + svgplot::fmt(cy) +
             "\" fill=\"#c03028\"/>\n";
    }
    // legend, bottom right
    const double lx = f.width - f.mr - 190, ly0 = f.height - f.mb - 96;
    double ly = ly0;
    auto legend_line = [&](const std::string& sample, const std::string& label) {
        s += sample;
        s += svgplot::text(lx + 34, ly + 4, "start", 11, label);
        ly += 17;
    };
    legend_line(svgplot::line(lx, ly, lx + 28, ly, "stroke=\"#1f6fb4\" stroke-width=\"1.6\""),
                "SROC curve");
    legend_line(svgplot::line(lx, ly, lx + 28, ly,
                              "stroke=\"#333333\" stroke-width=\"1.2\" stroke-dasharray=\"6 3\""),
                pct + "% confidence region");
    legend_line(svgplot::line(lx, ly, lx + 28, ly,
                              "stroke=\"#888888\" stroke-width=\"1.2\" stroke-dasharray=\"2 3\""),
                pct + "% prediction region");
    legend_line(svgplot::circle(lx + 14, ly, 3.5, "fill=\"#4682b4\" fill-opacity=\"0.65\""),
                "studies");
    legend_line("<polygon points=\"" + svgplot::fmt(lx + 14) + "," + svgplot::fmt(ly - 4.5) + " " +
                    svgplot::fmt(lx + 18.5) + "," + svgplot::fmt(ly) + " " + svgplot::fmt(lx + 14) +
                    "," + svgplot::fmt(ly + 4.5) + " " + svgplot::fmt(lx + 9.5) + "," +
                    svgplot::fmt(ly) + "\" fill=\"#c03028\"/>\n",
                "summary estimate");
    s += svgplot::footer();
    return s;
}

std::string render_funnel(const dta::FunnelSeries& fs, const std::string& effect_label,
                          const std::string& title) {
    double se_max = 0.0;
    double xmin = fs.center, xmax = fs.center;
    for (const auto& [y, se] : fs.points) {
        se_max = std::max(se_max, se);
        xmin = std::min(xmin, y);
        xmax = std::max(xmax, y);
    }
    for (const auto& row : fs.contour) {
        xmin = std::min(xmin, row[1]);
        xmax = std::max(xmax, row[2]);
        se_max = std::max(se_max, row[0]);
    }
    const double pad = 0.06 * (xmax - xmin);
    svgplot::Frame f;
    f.width = 560;
    f.height = 480;
    f.x0 = xmin - pad;
    f.x1 = xmax + pad;
    f.y0 = 0.0;        // SE axis: 0 at the top
    f.y1 = se_max;
    f.y_down = true;

    std::string s = svgplot::header(f);
    s += svgplot::axes(f, nice_ticks(f.x0, f.x1), nice_ticks(0.0, f.y1), effect_label,
                       "Standard error", title);
    // pseudo-confidence contour
    const auto& last = fs.contour.back();
    s += svgplot::line(f.px(fs.center), f.py(0.0), f.px(last[1]), f.py(last[0]),
                       "stroke=\"#555555\" stroke-width=\"1.2\" stroke-dasharray=\"5 4\"");
    s += svgplot::line(f.px(fs.center), f.py(0.0), f.px(last[2]), f.py(last[0]),
                       "stroke=\"#555555\" stroke-width=\"1.2\" stroke-dasharray=\"5 4\"");
    s += svgplot::line(f.px(fs.center), f.py(0.0), f.px(fs.center), f.py(f.y1),
                       "stroke=\"#222222\" stroke-width=\"1.2\"");
    for (const auto& [y, se] : fs.points)
        s += svgplot::circle(f.px(y), f.py(se), 3.5, "fill=\"#4682b4\" fill-opacity=\"0.75\"");
    s += svgplot::footer();
    return s;
}

std::string csv_xy(const char* h1, const char* h2,
                   const std::vector<std::pair<double, double>>& pts) {
    std::string s = std::string(h1) + "," + h2 + "\n";
    char buf[80];
    for (const auto& [x, y] : pts) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, y);
        s += buf;
    }
    return s;
}

void emit_plots(Analysis& a, const Options& o) {
    const std::string& pre = o.plots_prefix;

    write_file(pre + "_sroc.svg", render_sroc_svg(a, o));

    // sroc CSV series
    if (a.curve) {
        write_file(pre + "_sroc_curve.csv", csv_xy("fpr", "sens", a.curve->grid));
        write_file(pre + "_sroc_conf_region.csv",
                   csv_xy("fpr", "sens", dta::confidence_region(*a.fit, o.level)));
        write_file(pre + "_sroc_pred_region.csv",
                   csv_xy("fpr", "sens", dta::prediction_region(*a.fit, o.level)));
    } else {
        a.warnings.push_back("SROC curve/regions omitted from plots (degenerate fit)");
    }
    {
        std::string s = "study,fpr,sens\n";
        char buf[160];
        for (const dta::TransformedStudy& st : a.studies) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", dta::invlogit(st.y.v2),
                          dta::invlogit(st.y.v1));
            s += st.id + "," + buf;
        }
        write_file(pre + "_sroc_points.csv", s);
    }

    auto funnel_files = [&](const EggerPart& p, const std::string& tag,
                            const std::string& effect_label, const std::string& title) {
        const dta::FunnelSeries fs = dta::funnel_series(p.y, p.v, p.uni);
        write_file(pre + "_funnel_" + tag + ".svg", render_funnel(fs, effect_label, title));
        std::string pts = "study,effect,se\n";
        char buf[160];
        for (std::size_t i = 0; i < a.studies.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", fs.points[i].first,
                          fs.points[i].second);
            pts += a.studies[i].id + "," + buf;
        }
        write_file(pre + "_funnel_" + tag + "_points.csv", pts);
        std::string con = "se,lower,center,upper\n";
        for (const auto& row : fs.contour) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", row[0], row[1], fs.center,
                          row[2]);
            con += buf;
        }
        write_file(pre + "_funnel_" + tag + "_contour.csv", con);
    };
    funnel_files(*a.egger_sens, "logit_sens", "logit(sensitivity)",
                 "Funnel plot: logit sensitivity");
    funnel_files(*a.egger_fpr, "logit_fpr", "logit(FPR)", "Funnel plot: logit FPR");
}

// ---- subcommand drivers ----

void deliver(const Analysis& a, const Options& o, bool json_to_stdout) {
    const std::string json = build_report(a, o);
    if (!o.out.empty())
        write_file(o.out, json);
    else if (json_to_stdout)
        std::cout << json;
}

int run_fit(const Options& o) {
    Analysis a = prepare(o);
    compute_fit(a, o);
    std::cout << dta::format_summary(*a.fit, *a.summary);
    deliver(a, o, false);
    return 0;
}

int run_sroc(const Options& o) {
    Analysis a = prepare(o);
    compute_fit(a, o);
    compute_sroc(a, o);
    std::cout << dta::format_summary(*a.fit, *a.summary);
    if (a.curve) {
        std::printf("AUC: %.3f\n", a.curve->auc);
        std::printf("Partial AUC (restricted to observed FPRs [%.4f, %.4f] and normalized): %.3f\n",
                    a.curve->fpr_range.first, a.curve->fpr_range.second, a.curve->pauc);
    }
    for (const std::string& wmsg : a.warnings) std::fprintf(stderr, "warning: %s\n", wmsg.c_str());
    deliver(a, o, false);
    return 0;
}

int run_egger(const Options& o) {
    Analysis a = prepare(o);
    compute_egger(a);
    auto block = [](const char* name, const EggerPart& p) {
        std::printf("Funnel-asymmetry regression, %s\n", name);
        std::printf("  t = %.4f, df = %d, p = %.4f\n", p.res.t, p.res.df, p.res.p);
        std::printf("  limit estimate (as se -> 0): b = %.4f (95%% CI %.4f, %.4f)\n", p.res.limit_b,
                    p.res.ci_lb, p.res.ci_ub);
    };
    block("logit(sensitivity)", *a.egger_sens);
    block("logit(FPR)", *a.egger_fpr);
    deliver(a, o, false);
    return 0;
}

int run_test(const Options& o) {
    Analysis a = prepare(o);
    compute_fit(a, o);
    compute_tests(a, o);
    std::printf("MSSET2: T = %.6f, P = %.9f\n", a.m2->T, a.m2->P);
    std::printf("        b0 = (%.7f, %.7f)\n", a.m2->b0.v1, a.m2->b0.v2);
    std::printf("MSSET3: P = %.9f  (B = %lld, failed = %lld, seed = %llu)\n", a.m3->P, a.m3->B,
                a.m3->n_failed, static_cast<unsigned long long>(a.m3->seed));
    for (const std::string& wmsg : a.warnings) std::fprintf(stderr, "warning: %s\n", wmsg.c_str());
    deliver(a, o, false);
    return 0;
}

int run_report(const Options& o) {
    Analysis a = prepare(o);
    compute_fit(a, o);
    compute_sroc(a, o);
    compute_egger(a);
    compute_tests(a, o);
    if (!o.plots_prefix.empty()) emit_plots(a, o);
    deliver(a, o, true);
    return 0;
}

int run_plot(const Options& o) {
    Analysis a = prepare(o);
    compute_fit(a, o);
    compute_sroc(a, o);
    compute_egger(a);
    emit_plots(a, o);
    for (const std::string& wmsg : a.warnings) std::fprintf(stderr, "warning: %s\n", wmsg.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diagnostic test accuracy meta-analysis: bivariate REML fit, SROC/AUC, "
                 "funnel diagnostics, and multivariate small-study-effect tests"};
    app.require_subcommand(1);

    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("input", o.input, "CSV file with header study,TP,FN,FP,TN")->required();
        sub->add_option("--correction", o.correction, "continuity correction constant")
            ->capture_default_str();
        sub->add_option("--correction-policy", o.policy, "all|only-zero|none")
            ->capture_default_str();
        sub->add_option("--column-map", o.column_map,
                        "5 comma-separated header names replacing study,TP,FN,FP,TN")
            ->delimiter(',');
        sub->add_option("--level", o.level, "confidence level")->capture_default_str();
        sub->add_option("-o,--out", o.out, "write a JSON report to this path");
        return sub;
    };
    auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--grid", o.grid, "AUC integration grid cells")->capture_default_str();
    };
    auto add_boot = [&](CLI::App* sub) {
        sub->add_option("--B", o.B, "bootstrap replicates (>= 100)")->capture_default_str();
        sub->add_option("--seed", o.seed, "RNG master seed")->capture_default_str();
        sub->add_option("--se-covariate", o.se_cov, "within|total standard-error covariate")
            ->capture_default_str();
        sub->add_option("--threads", o.threads, "bootstrap threads (0 = hardware)")
            ->capture_default_str();
    };

    add_common(app.add_subcommand("fit", "bivariate REML fit and summary"));
    CLI::App* sroc = add_common(app.add_subcommand("sroc", "SROC curve, AUC and partial AUC"));
    add_grid(sroc);
    add_common(app.add_subcommand("egger", "univariate funnel-asymmetry tests"));
    CLI::App* test =
        add_common(app.add_subcommand("test", "MSSET2 score test and MSSET3 bootstrap"));
    add_boot(test);
    CLI::App* report = add_common(app.add_subcommand("report", "full pipeline, JSON report"));
    add_grid(report);
    add_boot(report);
    report->add_option("--plots-prefix", o.plots_prefix, "also write SVG/CSV plots");
    CLI::App* plot = add_common(app.add_subcommand("plot", "SVG figures and CSV plot series"));
    add_grid(plot);
    plot->add_option("--plots-prefix", o.plots_prefix, "output path prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!(o.level > 0.0 && o.level < 1.0))
            throw dta::input_error("--level must lie strictly between 0 and 1");
        if (o.correction < 0.0) throw dta::input_error("--correction must be >= 0");
        if (o.grid < 2) throw dta::input_error("--grid must be >= 2");
        if (o.threads < 0) throw dta::input_error("--threads must be >= 0");
        if (app.got_subcommand("fit")) return run_fit(o);
        if (app.got_subcommand("sroc")) return run_sroc(o);
        if (app.got_subcommand("egger")) return run_egger(o);
        if (app.got_subcommand("test")) return run_test(o);
        if (app.got_subcommand("report")) return run_report(o);
        if (app.got_subcommand("plot")) return run_plot(o);
        return 2;
    } catch (const dta::input_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const io_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const dta::fit_error& e) {
        std::fprintf(stderr, "fit error: %s\n", e.what());
        return 3;
    } catch (const dta::test_error& e) {
        std::fprintf(stderr, "test error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
