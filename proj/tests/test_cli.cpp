#include "hpmod/cli.hpp"
#include "hpmod/error.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace hpmod;
using namespace hpmod::cli;

TEST_CASE("number formatting") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(std::nan("")) == "nan");
    CHECK(std::stod(format_real(1.0 / 3)) == 1.0 / 3);
    CHECK(log10_ceil(2.6e-7) == -6);
    CHECK(log10_ceil(1e-9) == -9);
}

TEST_CASE("modes") {
    CHECK(parse_mode("interior") == Mode::Interior);
    CHECK(parse_mode("exterior-truncated") == Mode::ExteriorTruncated);
    CHECK(std::string(to_string(parse_mode("conjugate"))) == "conjugate");
    CHECK_THROWS_AS(parse_mode("sideways"), Error);
    CHECK(parse_degree("constant") == DegreeKind::Constant);
    CHECK_THROWS_AS(parse_degree("linear"), Error);
}

TEST_CASE("job parsing") {
    const auto job = parse_quad_job(R"({"type": "polygon",
        "params": {"vertices": [[0,0],[2,0],[2,1],[0,1]]},
        "mode": "conjugate", "opts": {"p_max": 3, "alpha": 0.2, "degree": "constant"}})",
                                    SolveOptions{});
    CHECK(job.mode == Mode::Conjugate);
    CHECK(job.opts.p_max == 3);
    CHECK(job.opts.alpha == 0.2);
    CHECK(job.opts.degrees == DegreeKind::Constant);
    CHECK(job.quad.corners[1].x == 2.0);

    const auto preset = parse_quad_job(R"({"type": "preset", "params": {"name": "B"}})", SolveOptions{});
    CHECK(preset.mode == Mode::Interior);
}

TEST_CASE("job parse errors carry a location") {
    try {
        parse_quad_job("{\n  \"type\": \"preset\",\n  \"mode\": }", SolveOptions{});
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_quad_job(R"({"type": "blob"})", SolveOptions{}), Error);
    CHECK_THROWS_AS(parse_quad_job(R"({"type": "polygon", "params": {"vertices": [[0,0]]}})", SolveOptions{}),
                    Error);
    CHECK_THROWS_AS(parse_quad_job(R"({"opts": {"p_max": "high"}})", SolveOptions{}), Error);
    CHECK_THROWS_AS(parse_quad_job(R"({"opts": {"p_max": 40}})", SolveOptions{}), Error);
}

TEST_CASE("quad report round trip") {
    const auto job = parse_quad_job(
        R"({"type": "polygon", "params": {"vertices": [[0,0],[2,0],[2,1],[0,1]]}, "opts": {"p_max": 2}})",
        SolveOptions{});
    const auto result = run_mode(job.quad, job.mode, job.opts);
    const auto text = quad_report(job, result);
    const auto parsed = nlohmann::json::parse(text);
    CHECK(parsed.dump(2) == text);
    CHECK(parsed["modulus"].get<double>() == result.modulus);
    CHECK(parsed["opts"]["p_max"].get<int>() == 2);
    CHECK(parsed["far_field"].is_null());
    CHECK(parsed["timings"].contains("assemble"));
}

TEST_CASE("convergence fit recovers a known rate") {
    std::vector<ConvergenceRecord> records;
    for (int p = 2; p <= 12; ++p) {
        ConvergenceRecord r;
        r.p = p;
        r.nu = p;
        r.unknowns = 1000 * p * p;
        r.relative_error = 0.3 * std::exp(-0.5 * std::pow(double(r.unknowns), 1.0 / 3.5));
        records.push_back(r);
    }
    const auto fit = fit_convergence(records);
    CHECK(fit.monotone);
    CHECK(fit.points == 11);
    CHECK(fit.beta == doctest::Approx(3.5).epsilon(1e-3));
    CHECK(fit.c1 == doctest::Approx(0.3).epsilon(1e-2));
    CHECK(fit.c2 == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(fit.residual < 1e-6);
    CHECK(fit.beta_linear > 0.0);

    std::swap(records[3].relative_error, records[4].relative_error);
    CHECK_FALSE(fit_convergence(records).monotone);
}

TEST_CASE("side slide summary") {
    std::vector<SideSlideRow> rows;
    for (int i = 0; i <= 20; ++i) {
        SideSlideRow r;
        r.t = 0.5 + 0.1 * i;
        r.valid = true;
        r.result.modulus = 1.0 + (r.t - 1.5) * (r.t - 1.5);
        r.result.reciprocal_error = 1e-9;
        rows.push_back(r);
    }
    const auto s = summarize_side_slide(rows, 2.0);
    CHECK(s.kind == "minimum");
    CHECK(s.t_extremum == doctest::Approx(1.5));
    CHECK(s.symmetry_defect < 1e-12);
    CHECK(s.max_reciprocal_error == 1e-9);
}

TEST_CASE("invalid side slide rows are flagged") {
    SolveOptions o;
    o.p_max = 2;
    const auto rows = side_slide(-1.0, 2.0, {1.0, 1.5}, o);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].valid);
    CHECK(rows[0].status == "invalid-geometry");
    std::ostringstream os;
    write_side_slide(os, rows);
    CHECK(os.str().rfind("t,modulus,", 0) == 0);
}
