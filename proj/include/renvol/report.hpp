#pragma once

#include <optional>
#include <string>
#include <vector>

namespace renvol {

inline constexpr const char* kToolVersion = "1.0.0";

/// One numerical check: a computed quantity against its reference.
struct CheckResult {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    std::optional<double> order;   // observed convergence order, when the check is a sweep
    bool pass = false;
    bool skipped = false;
    bool report_only = false;      // recorded but never counted as a failure
    std::string note;
};

/// Builds a check whose residual is |lhs - rhs|.
CheckResult make_check(std::string name, double lhs, double rhs, double tolerance, std::string note = {});

/// Builds a check on a residual that should be small (rhs is zero).
CheckResult make_residual_check(std::string name, double residual, double tolerance, std::string note = {});

/// One-sided check lhs >= bound; the residual is the shortfall and the tolerance zero.
CheckResult make_lower_bound_check(std::string name, double lhs, double bound, std::string note = {});

/// A one-parameter sweep (refinement level, iteration, s-value, ...).
struct Sweep {
    std::string name;
    std::string xlabel;
    std::string ylabel;
    std::vector<double> x;
    std::vector<double> y;
};

struct Report {
    std::string command;
    std::string scene_hash;
    std::vector<CheckResult> checks;
    std::vector<Sweep> sweeps;
    std::vector<std::string> warnings;
    std::optional<double> wall_time_s;
    std::vector<std::pair<std::string, double>> values;   // named scalar outputs

    void add(CheckResult c) { checks.push_back(std::move(c)); }
    void append(const Report& other);
    size_t failed() const;
    size_t passed() const;
    bool all_pass() const { return failed() == 0; }

    std::string to_json() const;
};

/// Least-squares slope of log(y) against log(x); used for observed orders.
double fitted_order(const std::vector<double>& x, const std::vector<double>& y);

/// Writes one two-column text file per sweep into dir, named after the sweep
/// with every character outside [A-Za-z0-9._-] replaced by '_'.
void emit_plotdata(const Report& report, const std::string& dir);

} // namespace renvol
