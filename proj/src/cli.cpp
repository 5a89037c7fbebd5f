#include "hpmod/cli.hpp"

#include "hpmod/error.hpp"
#include "hpmod/specfun.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

namespace hpmod::cli {

using nlohmann::json;

const char* to_string(Mode mode) {
    switch (mode) {
        case Mode::Interior: return "interior";
        case Mode::Conjugate: return "conjugate";
        case Mode::ExteriorInversion: return "exterior-inversion";
        case Mode::ExteriorTruncated: return "exterior-truncated";
    }
    return "?";
}

Mode parse_mode(const std::string& text) {
    if (text == "interior") return Mode::Interior;
    if (text == "conjugate") return Mode::Conjugate;
    if (text == "exterior-inversion" || text == "exterior") return Mode::ExteriorInversion;
    if (text == "exterior-truncated") return Mode::ExteriorTruncated;
    throw Error(ErrorCode::Parse, "unknown mode '" + text + "'");
}

DegreeKind parse_degree(const std::string& text) {
    if (text == "graded") return DegreeKind::Graded;
    if (text == "constant") return DegreeKind::Constant;
    throw Error(ErrorCode::Parse, "unknown degree kind '" + text + "'");
}

ModulusResult run_mode(const QuadrilateralSpec& quad, Mode mode, const SolveOptions& opts) {
    switch (mode) {
        case Mode::Interior: return interior_modulus(quad, opts);
        case Mode::Conjugate: return conjugate_modulus(quad, opts);
        case Mode::ExteriorInversion: return exterior_modulus_inversion(quad, opts);
        case Mode::ExteriorTruncated: return exterior_modulus_truncated(quad, opts);
    }
    throw Error(ErrorCode::InvalidParameter, "unknown mode");
}

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

int log10_ceil(double x) {
    if (x == 0.0) return std::numeric_limits<int>::min();
    return int(std::ceil(std::log10(std::abs(x))));
}

namespace {

std::string opt_real(const std::optional<double>& x) {
    return x ? format_real(*x) : std::string("nan");
}

}  // namespace

// rect-table ---------------------------------------------------------------

std::vector<RectRow> rect_table(const SolveOptions& opts) {
    std::vector<RectRow> rows;
    for (int k = 1; k <= 6; ++k) {
        RectRow row;
        row.k = k;
        row.t = k * std::numbers::pi / 12.0;
        row.exact = specfun::dp_rect_exterior_modulus(2.0 * std::sin(row.t / 2.0), 2.0 * std::cos(row.t / 2.0));
        row.computed = exterior_modulus_inversion(rect_on_circle(row.t), opts);
        row.error = row.computed.modulus - row.exact;
        rows.push_back(row);
    }
    return rows;
}

void write_rect_table(std::ostream& os, const std::vector<RectRow>& rows) {
    os << "k,t,exact,computed,error,log10_error,reciprocal_error,far_field,N\n";
    for (const auto& r : rows) {
        os << r.k << ',' << format_real(r.t) << ',' << format_real(r.exact) << ',' << format_real(r.computed.modulus)
           << ',' << format_real(r.error) << ',' << log10_ceil(r.error) << ','
           << opt_real(r.computed.reciprocal_error) << ',' << opt_real(r.computed.far_field) << ','
           << r.computed.unknowns << '\n';
    }
}

// side-slide ---------------------------------------------------------------

std::vector<SideSlideRow> side_slide(double h, double s, const std::vector<double>& t_grid, const SolveOptions& opts) {
    std::vector<SideSlideRow> rows;
    for (double t : t_grid) {
        SideSlideRow row;
        row.t = t;
        try {
            row.result = exterior_modulus_inversion(side_slide_quad(h, s, t), opts);
            row.valid = true;
            row.status = "ok";
        } catch (const Error& e) {
            row.valid = false;
            row.status = to_string(e.code());
        }
        rows.push_back(row);
    }
    return rows;
}

SideSlideSummary summarize_side_slide(const std::vector<SideSlideRow>& rows, double s) {
    SideSlideSummary out;
    std::vector<const SideSlideRow*> valid;
    for (const auto& r : rows) {
        if (r.valid) valid.push_back(&r);
    }
    if (valid.empty()) return out;
    auto by_value = [](const SideSlideRow* a, const SideSlideRow* b) { return a->result.modulus < b->result.modulus; };
    const auto* hi = *std::max_element(valid.begin(), valid.end(), by_value);
    const auto* lo = *std::min_element(valid.begin(), valid.end(), by_value);
    const bool hi_inside = hi != valid.front() && hi != valid.back();
    out.kind = hi_inside ? "maximum" : "minimum";
    out.t_extremum = hi_inside ? hi->t : lo->t;
    for (const auto* a : valid) {
        out.max_reciprocal_error = std::max(out.max_reciprocal_error, a->result.reciprocal_error.value_or(0.0));
        for (const auto* b : valid) {
            if (std::abs(a->t + b->t - (1.0 + s)) < 1e-9) {
                out.symmetry_defect = std::max(out.symmetry_defect, std::abs(a->result.modulus - b->result.modulus));
            }
        }
    }
    return out;
}

void write_side_slide(std::ostream& os, const std::vector<SideSlideRow>& rows) {
    os << "t,modulus,conjugate,reciprocal_error,far_field,N,status\n";
    for (const auto& r : rows) {
        os << format_real(r.t) << ',';
        if (r.valid) {
            os << format_real(r.result.modulus) << ',' << opt_real(r.result.conjugate) << ','
               << opt_real(r.result.reciprocal_error) << ',' << opt_real(r.result.far_field) << ','
               << r.result.unknowns;
        } else {
            os << "nan,nan,nan,nan,0";
        }
        os << ',' << r.status << '\n';
    }
}

// quad ---------------------------------------------------------------------

namespace {

std::pair<int, int> line_and_column(const std::string& text, std::size_t byte) {
    int line = 1, column = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

template <class T>
T field(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::Parse, std::string("field '") + key + "' has the wrong type");
    }
}

Point2 parse_point(const json& v) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw Error(ErrorCode::Parse, "a vertex must be an array [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

json timings_json(const PhaseTimings& t) {
    return {{"mesh", t.mesh}, {"integrate", t.integrate}, {"assemble", t.assemble}, {"solve", t.solve},
            {"total", t.total}};
}

json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

QuadJob parse_quad_job(const std::string& text, const SolveOptions& defaults) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw Error(ErrorCode::Parse,
                    "malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column));
    }
    if (!doc.is_object()) throw Error(ErrorCode::Parse, "the job must be a JSON object");

    QuadJob job;
    job.opts = defaults;
    const std::string type = field<std::string>(doc, "type", "preset");
    const json params = doc.contains("params") ? doc.at("params") : json::object();
    if (!params.is_object()) throw Error(ErrorCode::Parse, "field 'params' must be an object");
    if (type == "preset") {
        const auto name = field<std::string>(params, "name", "A");
        job.quad = preset_quad(name);
        job.description = "preset " + name;
    } else if (type == "polygon") {
        if (!params.contains("vertices") || !params.at("vertices").is_array() || params.at("vertices").size() != 4) {
            throw Error(ErrorCode::Parse, "polygon needs 'vertices' with four points");
        }
        std::array<Point2, 4> v;
        for (int j = 0; j < 4; ++j) v[j] = parse_point(params.at("vertices")[j]);
        job.quad = polygon_quad(v);
        job.description = "polygon";
    } else if (type == "rect_on_circle") {
        const double t = field<double>(params, "t", std::numbers::pi / 12.0);
        job.quad = rect_on_circle(t);
        job.description = "rect_on_circle t=" + format_real(t);
    } else if (type == "side_slide") {
        const double h = field<double>(params, "h", 1.0);
        const double s = field<double>(params, "s", 2.0);
        const double t = field<double>(params, "t", 1.5);
        job.quad = side_slide_quad(h, s, t);
        job.description = "side_slide h=" + format_real(h) + " s=" + format_real(s) + " t=" + format_real(t);
    } else if (type == "flower") {
        const int n = field<int>(params, "n", 4);
        job.quad = flower_quad(n);
        job.description = "flower n=" + std::to_string(n);
    } else {
        throw Error(ErrorCode::Parse, "unknown type '" + type + "'");
    }
    job.mode = parse_mode(field<std::string>(doc, "mode", "interior"));

    const json opts = doc.contains("opts") ? doc.at("opts") : json::object();
    if (!opts.is_object()) throw Error(ErrorCode::Parse, "field 'opts' must be an object");
    job.opts.alpha = field<double>(opts, "alpha", job.opts.alpha);
    job.opts.nu = field<int>(opts, "nu", job.opts.nu);
    job.opts.p_max = field<int>(opts, "p_max", job.opts.p_max);
    job.opts.radius = field<double>(opts, "radius", job.opts.radius);
    if (opts.contains("degree")) job.opts.degrees = parse_degree(field<std::string>(opts, "degree", "graded"));
    job.opts.validate();
    return job;
}

std::string quad_report(const QuadJob& job, const ModulusResult& result) {
    json j;
    j["description"] = job.description;
    j["mode"] = to_string(job.mode);
    j["opts"] = {{"alpha", job.opts.alpha},
                 {"nu", job.opts.effective_nu()},
                 {"p_max", job.opts.p_max},
                 {"degree", to_string(job.opts.degrees)},
                 {"radius", job.opts.radius}};
    j["modulus"] = result.modulus;
    j["conjugate"] = optional_json(result.conjugate);
    j["reciprocal_error"] = optional_json(result.reciprocal_error);
    j["far_field"] = optional_json(result.far_field);
    j["unknowns"] = result.unknowns;
    j["timings"] = timings_json(result.timings);
    return j.dump(2);
}

// hexagon ------------------------------------------------------------------

std::vector<HexagonRow> hexagon(const std::vector<double>& h_list, const SolveOptions& opts) {
    std::vector<HexagonRow> rows;
    for (double h : h_list) {
        if (!(h > 0.0)) throw Error(ErrorCode::InvalidParameter, "hexagon: h must be positive");
        HexagonRow row;
        row.h = h;
        row.analytic = specfun::hexagon_half_modulus(h);
        const auto quad = polygon_quad({Point2{0.0, -h}, Point2{1.0, -h}, Point2{1.0, h}, Point2{0.0, h}});
        const auto r = exterior_modulus_inversion(quad, opts);
        row.fem_half = 0.5 * r.modulus;
        row.difference = row.fem_half - row.analytic;
        row.reciprocal_error = r.reciprocal_error.value_or(0.0);
        rows.push_back(row);
    }
    return rows;
}

void write_hexagon(std::ostream& os, const std::vector<HexagonRow>& rows) {
    os << "h,analytic,fem_half,difference,reciprocal_error\n";
    for (const auto& r : rows) {
        os << format_real(r.h) << ',' << format_real(r.analytic) << ',' << format_real(r.fem_half) << ','
           << format_real(r.difference) << ',' << format_real(r.reciprocal_error) << '\n';
    }
}

// convergence --------------------------------------------------------------

std::vector<ConvergenceRecord> convergence(const QuadrilateralSpec& quad, Mode mode, const std::vector<int>& p_list,
                                           const SolveOptions& opts, std::optional<double> reference) {
    if (p_list.empty()) throw Error(ErrorCode::InvalidParameter, "convergence: empty degree list");
    std::vector<ConvergenceRecord> records;
    for (int p : p_list) {
        SolveOptions o = opts;
        o.p_max = p;
        const auto r = run_mode(quad, mode, o);
        ConvergenceRecord rec;
        rec.p = p;
        rec.nu = o.effective_nu();
        rec.unknowns = r.unknowns;
        rec.modulus = r.modulus;
        rec.timings = r.timings;
        records.push_back(rec);
    }
    if (!reference) {
        const auto top = std::max_element(records.begin(), records.end(),
                                          [](const auto& a, const auto& b) { return a.p < b.p; });
        reference = top->modulus;
    }
    for (auto& rec : records) rec.relative_error = std::abs(rec.modulus - *reference) / std::abs(*reference);
    return records;
}

namespace {

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double rms = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LinearFit f;
    const double den = n * sxx - sx * sx;
    f.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = y[i] - (f.intercept + f.slope * x[i]);
        ss += d * d;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

}  // namespace

FitResult fit_convergence(const std::vector<ConvergenceRecord>& records) {
    FitResult fit;
    std::vector<const ConvergenceRecord*> sorted;
    for (const auto& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->p < b->p; });
    double last = std::numeric_limits<double>::infinity();
    for (const auto* r : sorted) {
        if (r->relative_error <= 0.0 || r->p > r->nu) continue;
        if (!(r->relative_error < last)) fit.monotone = false;
        last = r->relative_error;
    }

    std::vector<double> n_values, log_err;
    for (const auto* r : sorted) {
        if (r->relative_error > 0.0 && r->relative_error < 1.0) {
            n_values.push_back(double(r->unknowns));
            log_err.push_back(std::log(r->relative_error));
        }
    }
    fit.points = int(n_values.size());
    if (fit.points < 3) return fit;

    // For fixed beta the model is linear in (log c1, c2).
    auto model = [&](double beta) {
        std::vector<double> x(n_values.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::pow(n_values[i], 1.0 / beta);
        return linear_fit(x, log_err);
    };
    double best_beta = 1.0, best_rms = std::numeric_limits<double>::infinity();
    for (double beta = 0.5; beta <= 20.0; beta += 0.05) {
        const double rms = model(beta).rms;
        if (rms < best_rms) {
            best_rms = rms;
            best_beta = beta;
        }
    }
    double lo = std::max(0.5, best_beta - 0.05), hi = best_beta + 0.05;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
        const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        if (model(a).rms < model(b).rms) {
            hi = b;
        } else {
            lo = a;
        }
    }
    fit.beta = 0.5 * (lo + hi);
    const auto f = model(fit.beta);
    fit.c1 = std::exp(f.intercept);
    fit.c2 = -f.slope;
    fit.residual = f.rms;

    std::vector<double> log_n, loglog;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        log_n.push_back(std::log(n_values[i]));
        loglog.push_back(std::log(-log_err[i]));
    }
    const auto lf = linear_fit(log_n, loglog);
    fit.beta_linear = lf.slope != 0.0 ? 1.0 / lf.slope : 0.0;
    return fit;
}

void write_convergence(std::ostream& os, const std::vector<ConvergenceRecord>& records) {
    os << "p,nu,N,N_cbrt,modulus,relative_error,log10_relative_error,mesh,integrate,assemble,solve,total\n";
    for (const auto& r : records) {
        os << r.p << ',' << r.nu << ',' << r.unknowns << ',' << format_real(std::cbrt(double(r.unknowns))) << ','
           << format_real(r.modulus) << ',' << format_real(r.relative_error) << ','
           << format_real(r.relative_error > 0.0 ? std::log10(r.relative_error) : std::nan("")) << ','
           << format_real(r.timings.mesh) << ',' << format_real(r.timings.integrate) << ','
           << format_real(r.timings.assemble) << ',' << format_real(r.timings.solve) << ','
           << format_real(r.timings.total) << '\n';
    }
}

std::string fit_report(const FitResult& fit) {
    json j = {{"beta", fit.beta},         {"c1", fit.c1},           {"c2", fit.c2},
              {"residual", fit.residual}, {"beta_linear", fit.beta_linear}, {"monotone", fit.monotone},
              {"points", fit.points}};
    return j.dump(2);
}

// timing -------------------------------------------------------------------

std::vector<TimingRow> timing(const QuadrilateralSpec& quad, Mode mode, const std::vector<int>& p_list, int repeats,
                              const SolveOptions& opts) {
    if (repeats < 1) throw Error(ErrorCode::InvalidParameter, "timing: repeats must be positive");
    std::vector<TimingRow> rows;
    for (int p : p_list) {
        SolveOptions o = opts;
        o.p_max = p;
        TimingRow row;
        row.p = p;
        for (int r = 0; r < repeats; ++r) {
            const auto res = run_mode(quad, mode, o);
            row.unknowns = res.unknowns;
            row.mean.mesh += res.timings.mesh / repeats;
            row.mean.integrate += res.timings.integrate / repeats;
            row.mean.assemble += res.timings.assemble / repeats;
            row.mean.solve += res.timings.solve / repeats;
            row.mean.total += res.timings.total / repeats;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_timing(std::ostream& os, const std::vector<TimingRow>& rows) {
    os << "p,N,mesh,integrate,assemble,solve,total\n";
    for (const auto& r : rows) {
        os << r.p << ',' << r.unknowns << ',' << format_real(r.mean.mesh) << ',' << format_real(r.mean.integrate)
           << ',' << format_real(r.mean.assemble) << ',' << format_real(r.mean.solve) << ','
           << format_real(r.mean.total) << '\n';
    }
}

// entry point --------------------------------------------------------------

namespace {

struct Common {
    int p_max = 12;
    double alpha = 0.15;
    int nu = -1;
    std::string degree = "graded";
    double radius = 1.0e6;
    int threads = 0;
    std::string out;

    void attach(CLI::App* app) {
        app->add_option("--p-max", p_max, "maximum polynomial degree")->check(CLI::Range(1, kMaxDegree));
        app->add_option("--alpha", alpha, "geometric refinement factor");
        app->add_option("--nu", nu, "refinement levels (default min(16, p-max))");
        app->add_option("--degree", degree, "degree distribution")->check(CLI::IsMember({"graded", "constant"}));
        app->add_option("--radius", radius, "truncation radius");
        app->add_option("--threads", threads, "assembly workers (0 = all cores)");
        app->add_option("--out", out, "output file (default standard output)");
    }

    SolveOptions options() const {
        SolveOptions o;
        o.p_max = p_max;
        o.alpha = alpha;
        o.nu = nu;
        o.degrees = parse_degree(degree);
        o.radius = radius;
        o.threads = threads;
        o.validate();
        return o;
    }
};

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::InvalidParameter, "cannot open " + path);
    f << text;
}

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> out;
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidParameter, "grid step must be positive");
    const int n = int(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
    return out;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"hp-FEM conformal modulus experiments"};
    app.require_subcommand(1);

    Common c_rect, c_slide, c_quad, c_hex, c_conv, c_time;

    auto* rect = app.add_subcommand("rect-table", "exterior moduli of rectangles inscribed in the unit circle");
    c_rect.attach(rect);

    auto* slide = app.add_subcommand("side-slide", "exterior modulus while sliding the top side of a trapezoid");
    c_slide.attach(slide);
    double slide_h = 1.0, slide_s = 2.0, t_min = 0.5, t_max = 2.5, t_step = 0.1;
    std::vector<double> t_list;
    slide->add_option("--height", slide_h, "height");
    slide->add_option("--side", slide_s, "top side length");
    slide->add_option("--t-min", t_min);
    slide->add_option("--t-max", t_max);
    slide->add_option("--t-step", t_step);
    slide->add_option("--t", t_list, "explicit grid (overrides the range)");

    auto* quad = app.add_subcommand("quad", "one computation from a JSON job or a preset");
    c_quad.attach(quad);
    std::string spec_file, preset, mode_text = "interior";
    quad->add_option("--spec", spec_file, "JSON job file");
    quad->add_option("--preset", preset, "preset quadrilateral")->check(CLI::IsMember({"A", "B", "C", "D"}));
    quad->add_option("--mode", mode_text, "interior|conjugate|exterior-inversion|exterior-truncated");

    auto* hex = app.add_subcommand("hexagon", "symmetric hexagon duplication check");
    c_hex.attach(hex);
    std::vector<double> h_list{0.2, 0.3, 0.4, 0.5};
    hex->add_option("--heights", h_list, "half-heights");

    auto* conv = app.add_subcommand("convergence", "p-convergence study with rate fit");
    c_conv.attach(conv);
    std::string conv_preset = "D", conv_mode = "conjugate", fit_out;
    std::vector<int> p_list{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::optional<double> reference;
    conv->add_option("--preset", conv_preset)->check(CLI::IsMember({"A", "B", "C", "D"}));
    conv->add_option("--mode", conv_mode);
    conv->add_option("--p", p_list, "degrees");
    conv->add_option("--reference", reference, "reference modulus (default: highest-p value)");
    conv->add_option("--fit-out", fit_out, "fit report file (default standard error)");

    auto* tim = app.add_subcommand("timing", "averaged phase timings");
    c_time.attach(tim);
    std::string time_preset = "D", time_mode = "conjugate";
    std::vector<int> time_p{4, 8, 12};
    int repeats = 3;
    tim->add_option("--preset", time_preset)->check(CLI::IsMember({"A", "B", "C", "D"}));
    tim->add_option("--mode", time_mode);
    tim->add_option("--p", time_p, "degrees");
    tim->add_option("--repeats", repeats);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        specfun::self_check();
        std::ostringstream os;
        if (*rect) {
            write_rect_table(os, rect_table(c_rect.options()));
            emit(c_rect.out, os.str());
        } else if (*slide) {
            const auto ts = t_list.empty() ? grid(t_min, t_max, t_step) : t_list;
            const auto rows = side_slide(slide_h, slide_s, ts, c_slide.options());
            write_side_slide(os, rows);
            emit(c_slide.out, os.str());
            const auto summary = summarize_side_slide(rows, slide_s);
            std::cerr << "extremum: " << summary.kind << " at t=" << format_real(summary.t_extremum)
                      << "; symmetry defect " << format_real(summary.symmetry_defect) << "; max reciprocal error "
                      << format_real(summary.max_reciprocal_error) << '\n';
        } else if (*quad) {
            QuadJob job;
            if (!spec_file.empty()) {
                std::ifstream f(spec_file);
                if (!f) throw Error(ErrorCode::Parse, "cannot read " + spec_file);
                std::stringstream text;
                text << f.rdbuf();
                job = parse_quad_job(text.str(), c_quad.options());
                if (quad->count("--mode")) job.mode = parse_mode(mode_text);
            } else {
                job.quad = preset_quad(preset.empty() ? "A" : preset);
                job.description = "preset " + (preset.empty() ? std::string("A") : preset);
                job.mode = parse_mode(mode_text);
                job.opts = c_quad.options();
            }
            emit(c_quad.out, quad_report(job, run_mode(job.quad, job.mode, job.opts)) + "\n");
        } else if (*hex) {
            write_hexagon(os, hexagon(h_list, c_hex.options()));
            emit(c_hex.out, os.str());
        } else if (*conv) {
            const auto records =
                convergence(preset_quad(conv_preset), parse_mode(conv_mode), p_list, c_conv.options(), reference);
            write_convergence(os, records);
            emit(c_conv.out, os.str());
            const auto report = fit_report(fit_convergence(records)) + "\n";
            if (fit_out.empty()) {
                std::cerr << report;
            } else {
                emit(fit_out, report);
            }
        } else if (*tim) {
            write_timing(os, timing(preset_quad(time_preset), parse_mode(time_mode), time_p, repeats, c_time.options()));
            emit(c_time.out, os.str());
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace hpmod::cli
