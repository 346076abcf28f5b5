#pragma once

#include <string>
#include <variant>
#include <vector>

#include "nhpc/cli/config.hpp"

namespace nhpc::cli {

using Cell = std::variant<long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    // Some rows could not be computed (conditioning on a null event); they are still
    // emitted, with NaN values, and the run exits with the numerical-failure status.
    bool degraded = false;
};

// Comma separated, header row, '.' decimal, 17 significant digits, LF line endings.
std::string to_csv(const Table& t);
// Array of row objects keyed by column name; non-finite numbers become null.
std::string to_json(const Table& t);

// One row per conditioning value: m,mean,variance,log_pmf,flags, or with a reporting
// delay ell,mean,variance,unconditional_mse.
Table cmd_predict(const RunConfig& cfg);

struct FigureOptions {
    double t = 1.0;
    double s = 1.0;
    long m_lo = 10;
    long m_hi = 170;
    QuadratureConfig quadrature;
};

struct FigurePanel {
    std::string name;  // file stem, e.g. "lambda30_mu1_linear"
    Scenario scenario;
    Table table;       // m,mean,reference
};

// The six (Lambda, mu) panels: Lambda in {30x, 60x}, mu in {5x, 5x/(1+x^2), 5x^2}.
std::vector<Scenario> figure_scenarios(double t, double s);
std::vector<FigurePanel> cmd_figure(const FigureOptions& opt);
// t, s, m_range and quadrature taken from a config; its model is ignored.
FigureOptions figure_options(const RunConfig& cfg);

// One row per replicate: replicate,m_t,m_incr,n1,n_hat (n_hat empty without a delay).
Table cmd_simulate(const RunConfig& cfg, int threads);

struct ValidationReport {
    Table table;  // check,at,recursion,oracle,stderr,z,pass
    bool all_passed = true;
};

// Recursion-vs-oracle comparisons on the configured scenario.
ValidationReport cmd_validate(const RunConfig& cfg, int threads);

}  // namespace nhpc::cli
