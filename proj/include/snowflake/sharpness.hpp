#pragma once

#include <string>
#include <vector>

#include "snowflake/field.hpp"
#include "snowflake/oracle.hpp"

namespace snowflake::sharpness {

/// Parameters of the oscillatory counterexample demonstrating that the
/// threshold gamma > n is sharp. gamma <= n is allowed here on purpose.
struct CounterexampleSpec {
    int n = 1;
    double alpha = 0.5;
    std::vector<double> betas;  // size n
    int m = 1;                  // number of series terms

    double gamma() const;
};

struct Counterexample {
    ScalarField f;          // sum 2^(-i a) prod_k sin(2^i x_k)
    FieldTuple g;           // g_k = sum 2^(-i b_k) cos(2^i x_k)
    Box domain;             // [0, 2pi]^n
    double closed_form;     // pi^n sum_{i=1..m} 2^(i(n-gamma)), the magnitude
                            // of the Lipschitz-case integral of f_m det Dg_m
                            // (its sign is (-1)^n from the cosine derivatives)
};

Counterexample trig_counterexample(const CounterexampleSpec& spec);

/// Closed form alone: pi^n sum_{i=1..m} 2^(i(n-gamma)); m = 0 gives 0.
double closed_form_value(int n, double gamma, int m);

struct SweepRow {
    int m = 0;
    double numeric = 0.0;      // signed quadrature value of f_m det Dg_m
    double closed_form = 0.0;  // magnitude per the series formula
    double relative_gap = 0.0; // | |numeric| - closed | / closed
    int resolution = 0;
    bool resolution_capped = false;
};

/// Quadrature sweep over m; the per-m resolution is at least 64 * 2^m points
/// per axis so the fastest oscillation stays resolved, capped at
/// `max_resolution` (rows past the cap carry a warning flag).
std::vector<SweepRow> divergence_sweep(const CounterexampleSpec& spec, int m_lo, int m_hi,
                                       int max_resolution = 1 << 14, int workers = 0);

}  // namespace snowflake::sharpness
