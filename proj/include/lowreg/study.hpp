#pragma once

#include "lowreg/elements.hpp"
#include "lowreg/fields.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lowreg {

enum class Operator { Canonical, Quasi, QuasiZeroBoundary, BestL2, MaxwellStrong, MaxwellNitsche };

const char* to_string(Operator op);
Operator operator_from_string(const std::string& s);

struct CoefficientRegion {
    Vec3 lower = Vec3::Zero();
    Vec3 upper = Vec3::Ones();
    double nu = 1.0;
    double kappa = 1.0;
};

/// Acceptance thresholds applied by `lowreg-fem run --check`.
struct StudyCheck {
    std::optional<double> eoc_min;
    std::optional<double> eoc_max;
    std::optional<double> effectivity_variation;      // global effectivity, consecutive levels
    std::optional<double> cell_effectivity_variation; // max per-cell effectivity
};

struct StudyConfig {
    std::string domain = "cube";
    int n0 = 1;
    int levels = 4;
    Family element = Family::Nedelec0;
    Operator op = Operator::Quasi;
    std::string field = "smooth_trig";
    FieldParams field_params;
    double r = 1.0;
    double q = 2.0;
    double eta0 = 10.0;
    int cell_degree = 6;
    int pair_level = 0;
    double solver_tol = 1e-10;
    int threads = 0;
    double nu = 1.0;
    double kappa = 1.0;
    std::vector<CoefficientRegion> coefficients;
    bool write_vtk = false;
    StudyCheck check;

    void validate() const;
};

/// Parses a JSON document; unknown keys are rejected.
StudyConfig parse_config(const std::string& json_text);
StudyConfig load_config(const std::string& path);

struct LevelResult {
    int level = 0;
    double h_max = 0.0;
    int num_cells = 0;
    int ndof = 0;
    double err_l2 = 0.0;
    double err_hcurl = 0.0; // H(curl) for Nedelec/Maxwell, H(div) for RT; NaN if unavailable
    double bound_rhs = 0.0;
    double effectivity_global = 0.0;
    double effectivity_cell_max = 0.0;
    double vsharp = 0.0;
    int cg_iterations = 0;
    double seconds = 0.0;
};

struct StudyReport {
    StudyConfig config;
    std::vector<LevelResult> levels;
    std::optional<double> eoc;       // least squares over the last 3 levels of the primary error
    std::optional<double> eoc_l2;
    std::optional<double> eoc_hcurl;
    std::vector<std::string> check_failures;

    /// L2 error for interpolation operators, H(curl) error for Maxwell runs.
    double primary_error(const LevelResult& l) const;
};

/// Least-squares slope of log e against log h over the last min(3, n)
/// entries; nullopt ("exact") when any used error is zero.
std::optional<double> compute_eoc(std::span<const double> errors, std::span<const double> hs);

/// Level meshes come from repeated uniform_refine of the n0 mesh. When
/// config.write_vtk is set and `vtk_dir` is non-empty, level_k.vtk files are written there.
StudyReport run_study(const StudyConfig& config, const std::string& vtk_dir = {});

/// Evaluates config.check against the report; fills check_failures.
bool evaluate_checks(StudyReport& report);

std::string report_csv(const StudyReport& report);
std::string report_json(const StudyReport& report);
/// Writes report.csv and report.json into `dir`.
void write_report(const StudyReport& report, const std::string& dir);

} // namespace lowreg
