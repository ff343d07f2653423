#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snowflake/currents.hpp"
#include "snowflake/errors.hpp"
#include "snowflake/expr.hpp"
#include "snowflake/oracle.hpp"
#include "snowflake/sharpness.hpp"
#include "snowflake/young.hpp"

namespace py = pybind11;
using namespace snowflake;

namespace {

Box make_box(const std::vector<std::pair<double, double>>& domain) {
    std::vector<std::array<double, 2>> b;
    b.reserve(domain.size());
    for (const auto& [lo, hi] : domain) b.push_back({lo, hi});
    return Box(std::move(b));
}

ScalarField compile_f(const std::string& text, int dim, double alpha,
                      std::optional<double> holder, std::optional<double> sup,
                      const Box& box) {
    expr::CompileOptions o;
    o.dim = dim;
    o.alpha = alpha;
    o.holder_bound = holder;
    o.sup_bound = sup;
    o.domain = box;
    return expr::compile(text, o);
}

FieldTuple compile_g(const std::vector<std::string>& texts, int dim,
                     const std::vector<double>& betas, const std::vector<double>& holders,
                     const Box& box) {
    FieldTuple g;
    g.domain = box;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        expr::CompileOptions o;
        o.dim = dim;
        o.alpha = betas.at(i);
        if (i < holders.size()) o.holder_bound = holders[i];
        o.domain = box;
        g.fields.push_back(expr::compile(texts[i], o));
    }
    return g;
}

py::dict result_dict(const young::IntegralResult& r) {
    py::dict d;
    d["value"] = r.value;
    d["level"] = r.level;
    d["apriori"] = r.apriori;
    d["aposteriori"] = r.aposteriori;
    d["evaluations"] = r.evaluations;
    d["stop_reason"] = std::string(young::to_string(r.reason));
    d["certified"] = r.certified;
    d["gamma"] = r.gamma;
    d["tail_factor"] = r.tail_factor;
    return d;
}

}  // namespace

PYBIND11_MODULE(pysnowflake, m) {
    m.doc() = "Generalized Riemann-Stieltjes integration of Hölder fields on boxes";

    py::register_exception<ExponentError>(m, "ExponentError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "FieldParseError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def(
        "integrate",
        [](const std::string& f, const std::vector<std::string>& g,
           const std::vector<std::pair<double, double>>& domain, double alpha,
           const std::vector<double>& betas, double tol, int k_max,
           std::optional<double> cf, std::vector<double> cg, std::optional<double> sup_f,
           const std::string& stopping, int workers) {
            Box box = make_box(domain);
            const int dim = box.dim();
            auto ff = compile_f(f, dim, alpha, cf, sup_f, box);
            auto gg = compile_g(g, dim, betas, cg, box);
            young::IntegrateOptions o;
            o.tol = tol;
            o.k_max = k_max;
            o.engine.workers = workers;
            o.stopping = stopping == "certified"   ? young::Stopping::Certified
                         : stopping == "heuristic" ? young::Stopping::Heuristic
                                                   : young::Stopping::Either;
            return result_dict(young::integrate(ff, gg, box, o));
        },
        py::arg("f"), py::arg("g"), py::arg("domain"), py::arg("alpha"), py::arg("betas"),
        py::arg("tol") = 1e-6, py::arg("k_max") = 12, py::arg("cf") = std::nullopt,
        py::arg("cg") = std::vector<double>{}, py::arg("sup_f") = std::nullopt,
        py::arg("stopping") = "either", py::arg("workers") = 0,
        "Dyadic-refinement integral of f d(g_1..g_n) over the box domain");

    m.def(
        "boundary_integral",
        [](const std::vector<std::string>& g, const std::vector<std::pair<double, double>>& domain,
           const std::vector<double>& betas, int level, int workers) {
            Box box = make_box(domain);
            auto gg = compile_g(g, box.dim(), betas, {}, box);
            young::EngineOptions eo;
            eo.workers = workers;
            return young::boundary_integral(box, gg, level, eo);
        },
        py::arg("g"), py::arg("domain"), py::arg("betas"), py::arg("level") = 6,
        py::arg("workers") = 0);

    m.def(
        "error_constants",
        [](int n, double alpha, const std::vector<double>& betas) {
            auto c = young::error_constants(n, alpha, betas);
            py::dict d;
            d["cprime"] = c.cprime;
            d["csum"] = c.csum;
            d["gamma"] = c.gamma;
            d["beta_bar"] = c.beta_bar;
            return d;
        },
        py::arg("n"), py::arg("alpha"), py::arg("betas"));

    m.def(
        "apriori_bound",
        [](int n, double alpha, const std::vector<double>& betas, int level, double diam,
           double holder_f, const std::vector<double>& holder_g) {
            auto c = young::error_constants(n, alpha, betas);
            return young::apriori_bound(c, level, diam, holder_f, holder_g);
        },
        py::arg("n"), py::arg("alpha"), py::arg("betas"), py::arg("level"), py::arg("diam"),
        py::arg("holder_f"), py::arg("holder_g"));

    m.def(
        "det_quadrature",
        [](const std::string& f, const std::vector<std::string>& g,
           const std::vector<std::pair<double, double>>& domain, int resolution, int workers) {
            Box box = make_box(domain);
            const int dim = box.dim();
            std::vector<double> betas(static_cast<std::size_t>(dim), 1.0);
            auto ff = compile_f(f, dim, 1.0, std::nullopt, std::nullopt, box);
            auto gg = compile_g(g, dim, betas, {}, box);
            auto spec = oracle::QuadratureSpec::uniform(resolution, dim);
            spec.workers = workers;
            return oracle::det_quadrature_integral(ff, gg, box, spec);
        },
        py::arg("f"), py::arg("g"), py::arg("domain"), py::arg("resolution") = 256,
        py::arg("workers") = 0);

    m.def(
        "sharpness_sweep",
        [](int n, double alpha, const std::vector<double>& betas, int m_lo, int m_hi) {
            sharpness::CounterexampleSpec spec;
            spec.n = n;
            spec.alpha = alpha;
            spec.betas = betas;
            auto rows = sharpness::divergence_sweep(spec, m_lo, m_hi);
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["m"] = r.m;
                d["numeric_integral"] = r.numeric;
                d["closed_form"] = r.closed_form;
                d["relative_gap"] = r.relative_gap;
                d["resolution"] = r.resolution;
                out.append(d);
            }
            return out;
        },
        py::arg("n"), py::arg("alpha"), py::arg("betas"), py::arg("m_lo") = 1,
        py::arg("m_hi") = 6);

    m.def(
        "koch_vertices",
        [](int level) {
            auto p = currents::koch_parametrization(level);
            return p.vertices;
        },
        py::arg("level"));

    m.def(
        "koch_area", [](int level) { return currents::koch_parametrization(level).area(); },
        py::arg("level"));

    m.def(
        "koch_boundary_integral",
        [](const std::string& f, const std::string& g, int level, double tol, int k_max) {
            auto ff = compile_f(f, 2, 1.0, 1.0, std::nullopt, Box::unit(2));
            auto gg = compile_f(g, 2, 1.0, 1.0, std::nullopt, Box::unit(2));
            young::IntegrateOptions opts;
            opts.k_max = k_max;
            return result_dict(currents::koch_boundary_evaluate(ff, gg, level, tol, opts));
        },
        py::arg("f"), py::arg("g"), py::arg("level"), py::arg("tol") = 1e-8,
        py::arg("k_max") = 24,
        "Pushforward integral of f d(g) over the closed level-i snowflake boundary");

    m.def("koch_exponent", &currents::koch_exponent);
    m.def("lacunary_holder_bound", &lacunary_holder_constant, py::arg("alpha"));

    m.def(
        "parse_check",
        [](const std::string& text) { return expr::to_string(expr::parse_field_expr(text)); },
        py::arg("text"), "Parses a field expression; raises FieldParseError on bad input");

    m.attr("__version__") = "0.1.0";
}
