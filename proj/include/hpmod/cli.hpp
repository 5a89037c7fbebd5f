#pragma once

// Experiment drivers behind the hpmod command-line tool. Each command writes
// CSV or JSON to the given stream; reals are printed with 17 significant digits.

#include "hpmod/modulus.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hpmod::cli {

enum class Mode { Interior, Conjugate, ExteriorInversion, ExteriorTruncated };
const char* to_string(Mode mode);
/// Accepts interior, conjugate, exterior-inversion, exterior-truncated.
Mode parse_mode(const std::string& text);
DegreeKind parse_degree(const std::string& text);

/// Runs one computation of the given mode.
ModulusResult run_mode(const QuadrilateralSpec& quad, Mode mode, const SolveOptions& opts);

/// Formats x with 17 significant digits ("nan" for NaN).
std::string format_real(double x);
/// ceil(log10|x|), or the smallest int for x = 0.
int log10_ceil(double x);

// rect-table ---------------------------------------------------------------

struct RectRow {
    int k = 0;
    double t = 0.0;
    double exact = 0.0;
    ModulusResult computed;
    double error = 0.0;
};

std::vector<RectRow> rect_table(const SolveOptions& opts);
void write_rect_table(std::ostream& os, const std::vector<RectRow>& rows);

// side-slide ---------------------------------------------------------------

struct SideSlideRow {
    double t = 0.0;
    bool valid = false;
    std::string status;
    ModulusResult result;
};

struct SideSlideSummary {
    /// Grid point with the extreme modulus and its kind ("maximum" or
    /// "minimum", judged against the two ends of the grid).
    double t_extremum = 0.0;
    std::string kind;
    /// max over t of |M(t) - M(1 + s - t)| for grid pairs.
    double symmetry_defect = 0.0;
    double max_reciprocal_error = 0.0;
};

std::vector<SideSlideRow> side_slide(double h, double s, const std::vector<double>& t_grid, const SolveOptions& opts);
SideSlideSummary summarize_side_slide(const std::vector<SideSlideRow>& rows, double s);
void write_side_slide(std::ostream& os, const std::vector<SideSlideRow>& rows);

// quad ---------------------------------------------------------------------

/// Parsed JSON experiment description.
struct QuadJob {
    QuadrilateralSpec quad;
    std::string description;
    Mode mode = Mode::Interior;
    SolveOptions opts;
};

/// Schema: {"type": "preset"|"polygon"|"rect_on_circle"|"side_slide"|"flower",
/// "params": {...}, "mode": "...", "opts": {"alpha", "nu", "p_max", "degree",
/// "radius"}}; every field is optional. Throws Error{Parse} with the line of a
/// syntax error or the offending key.
QuadJob parse_quad_job(const std::string& text, const SolveOptions& defaults);
/// JSON report with every ModulusResult field.
std::string quad_report(const QuadJob& job, const ModulusResult& result);

// hexagon ------------------------------------------------------------------

struct HexagonRow {
    double h = 0.0;
    double analytic = 0.0;
    double fem_half = 0.0;
    double difference = 0.0;
    double reciprocal_error = 0.0;
};

/// FEM value: half the exterior modulus of [0,1]x[-h,h] with plates on the
/// vertical sides.
std::vector<HexagonRow> hexagon(const std::vector<double>& h_list, const SolveOptions& opts);
void write_hexagon(std::ostream& os, const std::vector<HexagonRow>& rows);

// convergence --------------------------------------------------------------

struct ConvergenceRecord {
    int p = 0;
    int nu = 0;
    int unknowns = 0;
    double modulus = 0.0;
    double relative_error = 0.0;
    PhaseTimings timings;
};

struct FitResult {
    /// Nonlinear least squares of log e = log c1 - c2 N^(1/beta).
    double beta = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double residual = 0.0;
    /// Slope fit of log(-log e) against log N.
    double beta_linear = 0.0;
    /// Errors strictly decrease over the records with p <= nu.
    bool monotone = true;
    int points = 0;
};

/// Independent runs per p with nu = min(16, p) unless opts.nu >= 0. The
/// reference defaults to the highest-p value.
std::vector<ConvergenceRecord> convergence(const QuadrilateralSpec& quad, Mode mode, const std::vector<int>& p_list,
                                           const SolveOptions& opts, std::optional<double> reference = {});
/// Fit over records with positive error.
FitResult fit_convergence(const std::vector<ConvergenceRecord>& records);
void write_convergence(std::ostream& os, const std::vector<ConvergenceRecord>& records);
std::string fit_report(const FitResult& fit);

// timing -------------------------------------------------------------------

struct TimingRow {
    int p = 0;
    int unknowns = 0;
    PhaseTimings mean;
};

std::vector<TimingRow> timing(const QuadrilateralSpec& quad, Mode mode, const std::vector<int>& p_list, int repeats,
                              const SolveOptions& opts);
void write_timing(std::ostream& os, const std::vector<TimingRow>& rows);

/// Entry point of the command-line tool.
int run(int argc, char** argv);

}  // namespace hpmod::cli
