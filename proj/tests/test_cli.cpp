#include <doctest.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "snowflake/cli.hpp"
#include "snowflake/errors.hpp"
#include "snowflake/expr.hpp"

using namespace snowflake;
using nlohmann::json;

TEST_CASE("expression parsing shapes") {
    auto ast = expr::parse_field_expr("sin(x1)*cos(x2)");
    REQUIRE(ast->kind == expr::NodeKind::Binary);
    CHECK(ast->op == '*');
    CHECK(ast->args[0]->kind == expr::NodeKind::Call);
    CHECK(ast->args[0]->call == "sin");
    CHECK(ast->args[1]->call == "cos");
    CHECK(expr::max_variable(ast) == 2);

    auto pw = expr::parse_field_expr("x1^0.5");
    CHECK(pw->kind == expr::NodeKind::Binary);
    CHECK(pw->op == '^');

    // precedence and unary minus
    auto neg = expr::parse_field_expr("-x1^2 + 3*x1");
    CHECK(neg->op == '+');
    CHECK(neg->args[0]->kind == expr::NodeKind::Unary);
}

TEST_CASE("expression errors carry offsets") {
    try {
        expr::parse_field_expr("foo(x1)");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 0);
        CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
    }

    try {
        expr::parse_field_expr("sin(x1");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 6);
        CHECK(e.expected() == ")");
    }

    try {
        expr::parse_field_expr("1 + * 2");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 4);
        CHECK_FALSE(e.expected().empty());
    }
}

TEST_CASE("compiled expressions evaluate and carry metadata") {
    expr::CompileOptions o;
    o.dim = 2;
    o.alpha = 0.5;
    o.holder_bound = 1.0;
    auto f = expr::compile("x1^0.5 + 0*x2", o);
    double p[2] = {0.49, 0.2};
    CHECK(f.eval(p) == doctest::Approx(0.7));
    CHECK(f.exponent == 0.5);
    CHECK(f.certified);

    // bare lacunary gets certified constants automatically
    expr::CompileOptions lo;
    lo.dim = 1;
    auto lac = expr::compile("lacunary(0.6, 5)", lo);
    CHECK(lac.certified);
    CHECK(lac.exponent == doctest::Approx(0.6));
    CHECK(*lac.holder_bound == doctest::Approx(lacunary_holder_constant(0.6)));

    // koch coordinates are evaluable on [0,1]
    expr::CompileOptions ko;
    ko.dim = 1;
    auto kx = expr::compile("koch_x(2)", ko);
    double t = 0.0;
    CHECK(kx.eval(std::span<const double>(&t, 1)) == doctest::Approx(0.0));

    // dimension guard
    expr::CompileOptions d1;
    d1.dim = 1;
    CHECK_THROWS_AS(expr::compile("x2", d1), ConfigError);
}

TEST_CASE("domain and chain parsing") {
    auto d = cli::parse_domain("0,1;2,3.5");
    REQUIRE(d.size() == 2);
    CHECK(d[1][1] == 3.5);
    CHECK_THROWS_AS(cli::parse_domain("0;1"), ConfigError);

    auto terms = cli::parse_chain_spec("1:[0,1];-2:[2,3]x[0,1]");
    REQUIRE(terms.size() == 2);
    CHECK(terms[0].weight == 1.0);
    CHECK(terms[1].weight == -2.0);
    REQUIRE(terms[1].bounds.size() == 2);
    CHECK(terms[1].bounds[0][0] == 2.0);
    CHECK_THROWS_AS(cli::parse_chain_spec("oops"), ConfigError);
}

TEST_CASE("config round-trips through JSON") {
    cli::RunConfig c;
    c.dim = 2;
    c.domain = {{0.0, 1.0}, {-1.0, 2.0}};
    c.f_expr = "sin(x1)";
    c.g_exprs = {"x1", "x2"};
    c.alpha = 0.9;
    c.betas = {0.8, 0.7};
    c.holder_f = 1.25;
    c.holder_g = {2.0, 3.0};
    c.tol = 1e-5;
    c.k_max = 9;
    c.workers = 3;
    c.stopping = "heuristic";
    c.seed = 77;
    c.eps_list = {0.25, 0.125};
    auto j = cli::config_to_json(c);
    auto back = cli::config_from_json(j);
    CHECK(cli::config_to_json(back) == j);
}

TEST_CASE("bounds command matches the golden file") {
    cli::RunConfig c;
    c.dim = 2;
    c.alpha = 1.0;
    c.betas = {1.0, 1.0};
    c.domain = {{0.0, 1.0}};
    c.k_max = 4;
    auto report = cli::run_command("bounds", c);
    report["runtime_ms"] = 0;

    std::ifstream in(std::string(SNOWFLAKE_GOLDEN_DIR) + "/bounds_n2.json");
    REQUIRE(in.good());
    json golden = json::parse(in);
    CHECK(report == golden);
}

TEST_CASE("integrate command emits the stable schema") {
    cli::RunConfig c;
    c.dim = 1;
    c.domain = {{0.0, 6.283185307179586}};
    c.f_expr = "sin(x1)";
    c.g_exprs = {"cos(x1)"};
    c.alpha = 1.0;
    c.betas = {1.0};
    c.holder_f = 1.0;
    c.holder_g = {1.0};
    c.tol = 1e-4;
    auto report = cli::run_command("integrate", c);
    for (const char* key : {"command", "config_echo", "value", "apriori", "aposteriori",
                            "level", "evaluations", "runtime_ms"})
        CHECK(report.contains(key));
    CHECK(report["command"] == "integrate");
    CHECK(report["value"].get<double>() == doctest::Approx(-3.14159).epsilon(1e-4));

    // identical output for 1 and 3 workers
    cli::RunConfig c3 = c;
    c3.workers = 3;
    cli::RunConfig c1 = c;
    c1.workers = 1;
    auto r1 = cli::run_command("integrate", c1);
    auto r3 = cli::run_command("integrate", c3);
    CHECK(r1["value"].get<double>() == r3["value"].get<double>());
    CHECK(r1["evaluations"].get<std::uint64_t>() == r3["evaluations"].get<std::uint64_t>());
}

TEST_CASE("csv rendering") {
    json rep;
    rep["values"] = json::array({{{"m", 1}, {"v", 2.5}}, {{"m", 2}, {"v", 3.5}}});
    auto text = cli::render_output(rep, "csv");
    CHECK(text.find("m,v") != std::string::npos);
    CHECK(text.find("1,2.5") != std::string::npos);
    CHECK_THROWS_AS(cli::render_output(rep, "yaml"), ConfigError);
}

TEST_CASE("main entry exit codes") {
    std::ostringstream captured;
    auto* old = std::cout.rdbuf(captured.rdbuf());

    // exponent sum too small -> 3
    int code3 = cli::main_entry({"integrate", "--dim", "1", "--domain", "0,1", "--f",
                                 "lacunary(0.5,3)", "--g", "lacunary(0.5,3)", "--alpha", "0.5",
                                 "--beta", "0.5"});
    // config error -> 2
    int code2 = cli::main_entry({"integrate", "--dim", "1", "--domain", "0,1", "--f",
                                 "foo(x1)", "--g", "x1"});
    // fine run -> 0
    int code0 = cli::main_entry({"bounds", "--n", "1", "--alpha", "1", "--beta", "1"});
    // budget exhaustion -> 4
    int code4 = cli::main_entry({"integrate", "--dim", "1", "--domain", "0,1", "--f",
                                 "lacunary(0.8,5)", "--g", "lacunary(0.9,5)", "--alpha", "0.8",
                                 "--beta", "0.9", "--tol", "1e-14", "--kmax", "3"});
    std::cout.rdbuf(old);
    CHECK(code3 == 3);
    CHECK(code2 == 2);
    CHECK(code0 == 0);
    CHECK(code4 == 4);
}
