#include "snowflake/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "snowflake/currents.hpp"
#include "snowflake/errors.hpp"
#include "snowflake/expr.hpp"
#include "snowflake/oracle.hpp"
#include "snowflake/sharpness.hpp"
#include "snowflake/young.hpp"

namespace snowflake::cli {

using nlohmann::json;

Box RunConfig::domain_box() const { return Box(domain); }

json config_to_json(const RunConfig& c) {
    json j;
    j["dim"] = c.dim;
    j["domain"] = c.domain;
    j["f"] = c.f_expr;
    j["g"] = c.g_exprs;
    j["alpha"] = c.alpha;
    j["betas"] = c.betas;
    if (c.holder_f) j["holder_f"] = *c.holder_f;
    j["holder_g"] = c.holder_g;
    if (c.sup_f) j["sup_f"] = *c.sup_f;
    j["tol"] = c.tol;
    j["k_max"] = c.k_max;
    j["level"] = c.level;
    j["workers"] = c.workers;
    j["stopping"] = c.stopping;
    j["adaptive"] = c.adaptive;
    j["seed"] = c.seed;
    j["format"] = c.format;
    j["out_path"] = c.out_path;
    j["m_lo"] = c.m_lo;
    j["m_hi"] = c.m_hi;
    j["resolution"] = c.resolution;
    j["oracle_mode"] = c.oracle_mode;
    j["brute_cells"] = c.brute_cells;
    j["brute_tags"] = c.brute_tags;
    j["eps_list"] = c.eps_list;
    j["search_step_fraction"] = c.search_step_fraction;
    j["koch_lo"] = c.koch_lo;
    j["koch_hi"] = c.koch_hi;
    j["chain_spec"] = c.chain_spec;
    j["staircase"] = c.staircase;
    j["cutoff"] = c.cutoff;
    j["approx_m_max"] = c.approx_m_max;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.dim = j.at("dim").get<int>();
    c.domain = j.at("domain").get<std::vector<std::array<double, 2>>>();
    c.f_expr = j.at("f").get<std::string>();
    c.g_exprs = j.at("g").get<std::vector<std::string>>();
    c.alpha = j.at("alpha").get<double>();
    c.betas = j.at("betas").get<std::vector<double>>();
    if (j.contains("holder_f")) c.holder_f = j.at("holder_f").get<double>();
    c.holder_g = j.at("holder_g").get<std::vector<double>>();
    if (j.contains("sup_f")) c.sup_f = j.at("sup_f").get<double>();
    c.tol = j.at("tol").get<double>();
    c.k_max = j.at("k_max").get<int>();
    c.level = j.at("level").get<int>();
    c.workers = j.at("workers").get<int>();
    c.stopping = j.at("stopping").get<std::string>();
    c.adaptive = j.at("adaptive").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.format = j.at("format").get<std::string>();
    c.out_path = j.at("out_path").get<std::string>();
    c.m_lo = j.at("m_lo").get<int>();
    c.m_hi = j.at("m_hi").get<int>();
    c.resolution = j.at("resolution").get<int>();
    c.oracle_mode = j.at("oracle_mode").get<std::string>();
    c.brute_cells = j.at("brute_cells").get<int>();
    c.brute_tags = j.at("brute_tags").get<std::string>();
    c.eps_list = j.at("eps_list").get<std::vector<double>>();
    c.search_step_fraction = j.at("search_step_fraction").get<double>();
    c.koch_lo = j.at("koch_lo").get<int>();
    c.koch_hi = j.at("koch_hi").get<int>();
    c.chain_spec = j.at("chain_spec").get<std::string>();
    c.staircase = j.at("staircase").get<std::string>();
    c.cutoff = j.at("cutoff").get<int>();
    c.approx_m_max = j.at("approx_m_max").get<int>();
    return c;
}

std::vector<std::array<double, 2>> parse_domain(const std::string& text) {
    std::vector<std::array<double, 2>> out;
    std::stringstream ss(text);
    std::string axis;
    while (std::getline(ss, axis, ';')) {
        const auto comma = axis.find(',');
        if (comma == std::string::npos)
            throw ConfigError("domain axis needs 'lower,upper': " + axis);
        try {
            out.push_back({std::stod(axis.substr(0, comma)), std::stod(axis.substr(comma + 1))});
        } catch (const std::exception&) {
            throw ConfigError("malformed domain bound in: " + axis);
        }
    }
    if (out.empty()) throw ConfigError("empty domain");
    return out;
}

std::vector<ParsedChainTerm> parse_chain_spec(const std::string& text) {
    std::vector<ParsedChainTerm> out;
    std::stringstream ss(text);
    std::string term;
    while (std::getline(ss, term, ';')) {
        if (term.empty()) continue;
        ParsedChainTerm t;
        std::string boxes = term;
        const auto colon = term.find(':');
        if (colon != std::string::npos && term.find('[') > colon) {
            try {
                t.weight = std::stod(term.substr(0, colon));
            } catch (const std::exception&) {
                throw ConfigError("malformed chain weight in: " + term);
            }
            boxes = term.substr(colon + 1);
        }
        std::size_t pos = 0;
        while (pos < boxes.size()) {
            if (boxes[pos] == 'x') {
                ++pos;
                continue;
            }
            if (boxes[pos] != '[') throw ConfigError("expected '[' in chain box: " + boxes);
            const auto close = boxes.find(']', pos);
            if (close == std::string::npos) throw ConfigError("unterminated chain box: " + boxes);
            const std::string pair = boxes.substr(pos + 1, close - pos - 1);
            const auto comma = pair.find(',');
            if (comma == std::string::npos)
                throw ConfigError("chain box needs 'lower,upper': " + pair);
            try {
                t.bounds.push_back(
                    {std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
            } catch (const std::exception&) {
                throw ConfigError("malformed chain bound in: " + pair);
            }
            pos = close + 1;
        }
        if (t.bounds.empty()) throw ConfigError("chain term without a box: " + term);
        out.push_back(std::move(t));
    }
    if (out.empty()) throw ConfigError("empty chain spec");
    return out;
}

namespace {

// a single-axis --domain broadcasts across all axes
Box effective_domain(const RunConfig& c) {
    if (static_cast<int>(c.domain.size()) == 1 && c.dim > 1)
        return Box(std::vector<std::array<double, 2>>(static_cast<std::size_t>(c.dim),
                                                      c.domain[0]));
    return Box(c.domain);
}

int effective_workers(const RunConfig& c) {
    if (c.workers > 0) return c.workers;
    if (const char* env = std::getenv("SNOWFLAKE_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return 0;  // hardware
}

young::Stopping parse_stopping(const std::string& s) {
    if (s == "certified") return young::Stopping::Certified;
    if (s == "heuristic") return young::Stopping::Heuristic;
    if (s == "either") return young::Stopping::Either;
    throw ConfigError("stopping must be certified|heuristic|either");
}

struct CompiledProblem {
    ScalarField f;
    FieldTuple g;
    Box box;
};

CompiledProblem compile_problem(const RunConfig& c, bool need_f = true) {
    CompiledProblem p;
    p.box = effective_domain(c);
    if (p.box.dim() != c.dim) throw ConfigError("domain axes do not match --dim");
    if (static_cast<int>(c.g_exprs.size()) != c.dim)
        throw ConfigError("need one g expression per dimension");
    std::vector<double> betas = c.betas;
    if (betas.empty()) betas.assign(static_cast<std::size_t>(c.dim), 1.0);
    if (static_cast<int>(betas.size()) == 1 && c.dim > 1)
        betas.assign(static_cast<std::size_t>(c.dim), betas[0]);
    if (static_cast<int>(betas.size()) != c.dim)
        throw ConfigError("need one beta per dimension");

    if (need_f) {
        expr::CompileOptions fo;
        fo.dim = c.dim;
        fo.alpha = c.alpha;
        fo.holder_bound = c.holder_f;
        fo.sup_bound = c.sup_f;
        fo.domain = p.box;
        p.f = expr::compile(c.f_expr, fo);
    }
    p.g.domain = p.box;
    for (int i = 0; i < c.dim; ++i) {
        expr::CompileOptions go;
        go.dim = c.dim;
        go.alpha = betas[static_cast<std::size_t>(i)];
        if (static_cast<int>(c.holder_g.size()) > i)
            go.holder_bound = c.holder_g[static_cast<std::size_t>(i)];
        go.domain = p.box;
        p.g.fields.push_back(expr::compile(c.g_exprs[static_cast<std::size_t>(i)], go));
    }
    return p;
}

json result_fields(const young::IntegralResult& r) {
    json j;
    j["value"] = r.value;
    j["apriori"] = std::isfinite(r.apriori) ? json(r.apriori) : json(nullptr);
    j["aposteriori"] = std::isfinite(r.aposteriori) ? json(r.aposteriori) : json(nullptr);
    j["level"] = r.level;
    j["evaluations"] = r.evaluations;
    j["stop_reason"] = young::to_string(r.reason);
    j["certified"] = r.certified;
    j["gamma"] = r.gamma;
    j["tail_factor"] = r.tail_factor;
    return j;
}

young::IntegrateOptions integrate_options(const RunConfig& c) {
    young::IntegrateOptions o;
    o.tol = c.tol;
    o.k_max = c.k_max;
    o.stopping = parse_stopping(c.stopping);
    o.adaptive = c.adaptive;
    o.engine.workers = effective_workers(c);
    o.engine.seed = c.seed;
    return o;
}

json cmd_integrate(const RunConfig& c) {
    auto p = compile_problem(c);
    auto r = young::integrate(p.f, p.g, p.box, integrate_options(c));
    return result_fields(r);
}

json cmd_boundary(const RunConfig& c) {
    auto p = compile_problem(c, false);
    young::EngineOptions eo;
    eo.workers = effective_workers(c);
    const double v = young::boundary_integral(p.box, p.g, c.level, eo);
    json j;
    j["value"] = v;
    j["level"] = c.level;
    return j;
}

json cmd_approx(const RunConfig& c) {
    if (!c.holder_f) throw ConfigError("approx needs --cf (declared Hölder constant)");
    expr::CompileOptions fo;
    fo.dim = c.dim;
    fo.alpha = c.alpha;
    fo.holder_bound = c.holder_f;
    fo.sup_bound = c.sup_f;
    const Box box = c.domain_box();
    fo.domain = box;
    auto f = expr::compile(c.f_expr, fo);
    std::vector<double> eps = c.eps_list;
    if (eps.empty())
        for (int m = 2; m <= 7; ++m) eps.push_back(std::ldexp(1.0, -m));
    json rows = json::array();
    for (double e : eps) {
        auto a = inf_convolution(f, box, e, e * c.search_step_fraction);
        // measured sup |f - f_eps| on a fixed grid
        double sup_meas = 0.0;
        const int grid = 2000;
        for (int i = 0; i <= grid; ++i) {
            std::vector<double> x(static_cast<std::size_t>(c.dim));
            for (int d = 0; d < c.dim; ++d)
                x[d] = box.lower(d) + box.edge(d) * (static_cast<double>(i) / grid);
            sup_meas = std::max(sup_meas, std::abs(f.eval(x) - a.approx.eval(x)));
        }
        json row;
        row["eps"] = e;
        row["search_step"] = a.search_step;
        row["lip_bound"] = a.lip_bound;
        row["sup_error"] = a.sup_error;
        row["holder_bound_out"] = a.holder_bound_out;
        row["grid_error"] = a.grid_error;
        row["measured_sup_diff"] = sup_meas;
        rows.push_back(row);
    }
    json j;
    j["values"] = rows;
    return j;
}

json cmd_oracle(const RunConfig& c) {
    json j;
    if (c.oracle_mode == "quad") {
        auto p = compile_problem(c);
        auto spec = oracle::QuadratureSpec::uniform(c.resolution, c.dim);
        spec.workers = effective_workers(c);
        j["value"] = oracle::det_quadrature_integral(p.f, p.g, p.box, spec);
        j["resolution"] = c.resolution;
    } else if (c.oracle_mode == "brute") {
        if (c.dim != 1) throw ConfigError("oracle brute mode is 1-D");
        auto p = compile_problem(c);
        auto part = oracle::uniform_partition(p.box, c.brute_cells, c.brute_tags == "random",
                                              c.seed ? c.seed : 0x7a65);
        j["value"] = oracle::stieltjes_1d_brute(p.f.eval, p.g.fields[0].eval, part.points,
                                                part.tags);
        j["cells"] = c.brute_cells;
        j["tags"] = c.brute_tags;
    } else {
        throw ConfigError("oracle mode must be quad|brute");
    }
    return j;
}

json cmd_stokes(const RunConfig& c) {
    auto p = compile_problem(c, false);
    auto rep = oracle::stokes_check(p.g, p.box, c.tol, integrate_options(c));
    json j;
    j["value"] = rep.lhs;
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["gap"] = rep.gap;
    j["level"] = rep.level;
    if (rep.quadrature) j["quadrature"] = *rep.quadrature;
    return j;
}

json cmd_sharpness(const RunConfig& c) {
    sharpness::CounterexampleSpec spec;
    spec.n = c.dim;
    spec.alpha = c.alpha;
    spec.betas = c.betas;
    if (spec.betas.empty()) spec.betas.assign(static_cast<std::size_t>(c.dim), c.alpha);
    if (static_cast<int>(spec.betas.size()) == 1 && c.dim > 1)
        spec.betas.assign(static_cast<std::size_t>(c.dim), spec.betas[0]);
    auto rows = sharpness::divergence_sweep(spec, c.m_lo, c.m_hi, 1 << 14,
                                            effective_workers(c));
    json out = json::array();
    for (const auto& r : rows) {
        json row;
        row["m"] = r.m;
        row["numeric_integral"] = r.numeric;
        row["closed_form"] = r.closed_form;
        row["relative_gap"] = r.relative_gap;
        row["resolution"] = r.resolution;
        row["resolution_capped"] = r.resolution_capped;
        out.push_back(row);
    }
    json j;
    j["values"] = out;
    j["gamma"] = spec.gamma();
    return j;
}

json cmd_koch(const RunConfig& c) {
    expr::CompileOptions fo;
    fo.dim = 2;
    fo.alpha = c.alpha;
    fo.holder_bound = c.holder_f.value_or(1.0);
    fo.sup_bound = c.sup_f;
    auto f = expr::compile(c.f_expr, fo);
    expr::CompileOptions go;
    go.dim = 2;
    go.alpha = c.betas.empty() ? 1.0 : c.betas[0];
    go.holder_bound = c.holder_g.empty() ? 1.0 : c.holder_g[0];
    if (c.g_exprs.size() != 1) throw ConfigError("koch needs exactly one --g expression");
    auto g = expr::compile(c.g_exprs[0], go);

    json rows = json::array();
    for (int lvl = c.koch_lo; lvl <= c.koch_hi; ++lvl) {
        auto path = currents::koch_parametrization(lvl);
        auto r = currents::koch_boundary_evaluate(f, g, lvl, c.tol, integrate_options(c));
        json row;
        row["level"] = lvl;
        row["value"] = r.value;
        row["engine_level"] = r.level;
        row["evaluations"] = r.evaluations;
        row["shoelace_area"] = path.area();
        row["segments"] = path.segments();
        row["holder_quotient"] = currents::koch_holder_quotient(path, 4000);
        rows.push_back(row);
    }
    json j;
    j["values"] = rows;
    j["koch_exponent"] = currents::koch_exponent();
    return j;
}

json cmd_chain(const RunConfig& c) {
    currents::BoxChain chain;
    if (!c.staircase.empty()) {
        const auto colon = c.staircase.find(':');
        if (colon == std::string::npos)
            throw ConfigError("staircase spec is kind:value, e.g. geometric:0.5 or power:2");
        const std::string kind = c.staircase.substr(0, colon);
        const double par = std::stod(c.staircase.substr(colon + 1));
        std::vector<double> a;
        for (int m = 1; m <= c.cutoff; ++m) {
            if (kind == "geometric")
                a.push_back(std::pow(par, m));
            else if (kind == "power")
                a.push_back(std::pow(static_cast<double>(m), -par));
            else
                throw ConfigError("staircase kind must be geometric|power");
        }
        chain = currents::staircase_chain(a, c.cutoff);
    } else if (!c.chain_spec.empty()) {
        auto terms = parse_chain_spec(c.chain_spec);
        chain.dim = static_cast<int>(terms[0].bounds.size());
        for (auto& t : terms) chain.terms.push_back({Box(t.bounds), t.weight, 1});
    } else {
        throw ConfigError("chain needs --chain or --staircase");
    }
    if (chain.dim != c.dim && !chain.terms.empty())
        chain.dim = chain.terms[0].box.dim();

    // fields live on the chain's bounding box
    std::vector<std::array<double, 2>> bb = chain.terms[0].box.bounds();
    for (const auto& t : chain.terms)
        for (int a = 0; a < chain.dim; ++a) {
            bb[a][0] = std::min(bb[a][0], t.box.lower(a));
            bb[a][1] = std::max(bb[a][1], t.box.upper(a));
        }
    RunConfig cc = c;
    cc.dim = chain.dim;
    cc.domain = bb;
    auto p = compile_problem(cc);

    auto norms = currents::chain_norms(chain);
    json j;
    j["mass"] = norms.mass;
    j["boundary_mass"] = norms.boundary_mass;
    j["terms"] = chain.terms.size();

    if (c.approx_m_max > 0) {
        currents::ApproxEvalOptions ao;
        ao.m_max = c.approx_m_max;
        ao.quadrature_resolution = c.resolution;
        ao.search_step_fraction = c.search_step_fraction;
        ao.cross_tol = c.tol;
        ao.workers = effective_workers(c);
        auto trace = currents::evaluate_via_approximation(chain, p.f, p.g, ao);
        json steps = json::array();
        for (const auto& s : trace.steps) {
            steps.push_back({{"eps", s.eps}, {"value", s.value}, {"bound", s.bound},
                             {"bound_valid", s.bound_valid}});
        }
        json tj;
        tj["steps"] = steps;
        tj["limit"] = trace.limit;
        tj["tail_bound"] = trace.tail_bound;
        if (trace.cross_value) {
            tj["cross_check"] = {{"engine_value", *trace.cross_value},
                                 {"combined_bound", *trace.cross_combined},
                                 {"gap", *trace.cross_gap}};
        }
        tj["heuristic"] = trace.heuristic;
        j["trace"] = tj;
        j["value"] = trace.limit;
    } else {
        auto r = currents::chain_evaluate(chain, p.f, p.g, c.tol, integrate_options(c));
        j.update(result_fields(r));
    }
    return j;
}

json cmd_bounds(const RunConfig& c) {
    std::vector<double> betas = c.betas;
    if (betas.empty()) betas.assign(static_cast<std::size_t>(c.dim), 1.0);
    if (static_cast<int>(betas.size()) == 1 && c.dim > 1)
        betas.assign(static_cast<std::size_t>(c.dim), betas[0]);
    auto consts = young::error_constants(c.dim, c.alpha, betas);
    json j;
    j["cprime"] = consts.cprime;
    j["csum"] = consts.csum;
    j["gamma"] = consts.gamma;
    j["beta_bar"] = consts.beta_bar;

    const double hf = c.holder_f.value_or(1.0);
    std::vector<double> hg = c.holder_g;
    if (hg.empty()) hg.assign(static_cast<std::size_t>(c.dim), 1.0);
    const Box box = effective_domain(c);
    json table = json::array();
    for (int k = 0; k <= c.k_max; ++k)
        table.push_back(young::apriori_bound(consts, k, box.diameter(), hf, hg));
    j["apriori"] = table;
    j["thin_box"] = young::thin_box_bound(box, consts, c.sup_f.value_or(1.0), hf, hg);
    j["value"] = consts.cprime;
    return j;
}

std::string csv_escape(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace

std::string render_output(const json& report, const std::string& format) {
    if (format == "json") return report.dump(2) + "\n";
    if (format != "csv") throw ConfigError("format must be json|csv");
    std::ostringstream os;
    if (report.contains("values") && report["values"].is_array() &&
        !report["values"].empty() && report["values"][0].is_object()) {
        const auto& rows = report["values"];
        std::vector<std::string> cols;
        for (auto it = rows[0].begin(); it != rows[0].end(); ++it) cols.push_back(it.key());
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < cols.size(); ++i)
                os << (i ? "," : "") << csv_escape(row.value(cols[i], json()));
            os << "\n";
        }
        return os.str();
    }
    // flat single-record CSV
    std::vector<std::string> cols;
    for (auto it = report.begin(); it != report.end(); ++it)
        if (!it.value().is_structured()) cols.push_back(it.key());
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (std::size_t i = 0; i < cols.size(); ++i)
        os << (i ? "," : "") << csv_escape(report[cols[i]]);
    os << "\n";
    return os.str();
}

json run_command(const std::string& command, const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    json body;
    if (command == "integrate") body = cmd_integrate(config);
    else if (command == "boundary") body = cmd_boundary(config);
    else if (command == "approx") body = cmd_approx(config);
    else if (command == "oracle") body = cmd_oracle(config);
    else if (command == "stokes") body = cmd_stokes(config);
    else if (command == "sharpness") body = cmd_sharpness(config);
    else if (command == "koch") body = cmd_koch(config);
    else if (command == "chain") body = cmd_chain(config);
    else if (command == "bounds") body = cmd_bounds(config);
    else throw ConfigError("unknown command: " + command);
    const auto t1 = std::chrono::steady_clock::now();

    json report;
    report["command"] = command;
    report["config_echo"] = config_to_json(config);
    // spec'd envelope keys are always present
    report["value"] = body.contains("value") ? body["value"] : json(nullptr);
    report["values"] = body.contains("values") ? body["values"] : json(nullptr);
    report["apriori"] = body.contains("apriori") ? body["apriori"] : json(nullptr);
    report["aposteriori"] = body.contains("aposteriori") ? body["aposteriori"] : json(nullptr);
    report["level"] = body.contains("level") ? body["level"] : json(nullptr);
    report["evaluations"] = body.contains("evaluations") ? body["evaluations"] : json(nullptr);
    report["runtime_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    for (auto it = body.begin(); it != body.end(); ++it) report[it.key()] = it.value();
    return report;
}

namespace {

void add_common_flags(CLI::App* app, RunConfig& c, std::string& domain_text,
                      std::string& g_text, std::string& beta_text, std::string& cg_text) {
    app->add_option("--dim,--n", c.dim, "dimension n");
    app->add_option("--domain", domain_text, "per-axis bounds 'a,b;c,d'");
    app->add_option("--f", c.f_expr, "f field expression");
    app->add_option("--g", g_text, "g expressions, ';' separated");
    app->add_option("--alpha", c.alpha, "Hölder exponent of f");
    app->add_option("--beta", beta_text, "Hölder exponents of g, ',' separated");
    app->add_option("--cf", [&c](const std::vector<std::string>& v) {
        c.holder_f = std::stod(v[0]);
        return true;
    }, "declared Hölder constant of f");
    app->add_option("--cg", cg_text, "declared Hölder constants of g, ',' separated");
    app->add_option("--sup-f", [&c](const std::vector<std::string>& v) {
        c.sup_f = std::stod(v[0]);
        return true;
    }, "declared sup bound of f");
    app->add_option("--tol", c.tol, "target tolerance");
    app->add_option("--kmax", c.k_max, "maximum refinement level");
    app->add_option("--level", c.level, "fixed level for boundary/riemann");
    app->add_option("--workers", c.workers, "worker threads (0 = SNOWFLAKE_WORKERS/hardware)");
    app->add_option("--stopping", c.stopping, "certified|heuristic|either");
    app->add_flag("--adaptive", c.adaptive, "heuristic adaptive refinement");
    app->add_option("--seed", c.seed, "seed for randomized tags");
    app->add_option("--format", c.format, "json|csv");
    app->add_option("--out", c.out_path, "also write the report to this file");
    app->add_option("--resolution", c.resolution, "quadrature resolution per axis");
    app->add_option("--m", [&c](const std::vector<std::string>& v) {
        const auto dots = v[0].find("..");
        if (dots == std::string::npos) {
            c.m_lo = c.m_hi = std::stoi(v[0]);
        } else {
            c.m_lo = std::stoi(v[0].substr(0, dots));
            c.m_hi = std::stoi(v[0].substr(dots + 2));
        }
        return true;
    }, "series terms m or range 'lo..hi'");
    app->add_option("--mode", c.oracle_mode, "oracle mode: quad|brute");
    app->add_option("--cells", c.brute_cells, "brute partition cells");
    app->add_option("--tags", c.brute_tags, "brute tags: random|midpoint");
    app->add_option("--levels", [&c](const std::vector<std::string>& v) {
        const auto dots = v[0].find("..");
        if (dots == std::string::npos) {
            c.koch_lo = c.koch_hi = std::stoi(v[0]);
        } else {
            c.koch_lo = std::stoi(v[0].substr(0, dots));
            c.koch_hi = std::stoi(v[0].substr(dots + 2));
        }
        return true;
    }, "koch level range 'lo..hi'");
    app->add_option("--chain", c.chain_spec, "chain terms 'w:[a,b]x[c,d];...'");
    app->add_option("--staircase", c.staircase, "staircase sequence 'geometric:r'|'power:p'");
    app->add_option("--cutoff", c.cutoff, "staircase cutoff terms");
    app->add_option("--approx-mmax", c.approx_m_max,
                    "chain: evaluate via eps-approximation down to 2^-m");
    app->add_option("--eps", [&c](const std::vector<std::string>& v) {
        std::stringstream ss(v[0]);
        std::string tok;
        c.eps_list.clear();
        while (std::getline(ss, tok, ',')) c.eps_list.push_back(std::stod(tok));
        return true;
    }, "approx eps list, ',' separated");
    app->add_option("--search-step-fraction", c.search_step_fraction,
                    "inf-convolution grid pitch as a fraction of eps");
}

void finalize_config(RunConfig& c, const std::string& domain_text, const std::string& g_text,
                     const std::string& beta_text, const std::string& cg_text) {
    if (!domain_text.empty()) c.domain = parse_domain(domain_text);
    if (!g_text.empty()) {
        c.g_exprs.clear();
        std::stringstream ss(g_text);
        std::string tok;
        while (std::getline(ss, tok, ';')) c.g_exprs.push_back(tok);
    }
    auto parse_list = [](const std::string& text) {
        std::vector<double> out;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
        return out;
    };
    if (!beta_text.empty()) c.betas = parse_list(beta_text);
    if (!cg_text.empty()) c.holder_g = parse_list(cg_text);
}

}  // namespace

int main_entry(const std::vector<std::string>& args) {
    CLI::App app{"snowflake: generalized Riemann-Stieltjes integration of Hölder fields"};
    app.require_subcommand(1);
    RunConfig config;
    std::string domain_text, g_text, beta_text, cg_text;

    const std::vector<std::string> commands = {"integrate", "boundary", "approx",
                                               "oracle",    "stokes",   "sharpness",
                                               "koch",      "chain",    "bounds"};
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        add_common_flags(sub, config, domain_text, g_text, beta_text, cg_text);
    }

    try {
        std::vector<std::string> rargs(args.rbegin(), args.rend());
        app.parse(rargs);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help() << std::endl;
            return 0;
        }
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    finalize_config(config, domain_text, g_text, beta_text, cg_text);

    json report;
    int code = 0;
    try {
        report = run_command(command, config);
        // budget exhaustion is surfaced but still produces output
        if (report.contains("stop_reason") && report["stop_reason"] == "budget") code = 4;
    } catch (const ExponentError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "parse error at offset " << e.offset() << ": " << e.what();
        if (!e.expected().empty()) std::cerr << " (expected " << e.expected() << ")";
        std::cerr << std::endl;
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    }

    const std::string text = render_output(report, config.format);
    std::cout << text;
    if (!config.out_path.empty()) {
        std::ofstream out(config.out_path);
        if (!out) {
            std::cerr << "cannot write " << config.out_path << std::endl;
            return 2;
        }
        out << text;
    }
    return code;
}

}  // namespace snowflake::cli
