#pragma once

// Scenario orchestration: initial conditions, time series of tangles, the
// exact-vs-approximate comparison, the atom-atom scaling study and the sweep
// summary. Each time series has a serial reference and an OpenMP path that
// produce identical rows.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcm/dynamics.hpp"
#include "tcm/entanglement.hpp"
#include "tcm/random_states.hpp"

namespace tcm {

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class FieldKind { fock, coherent };
enum class Execution { serial, parallel };

/// printed: 2 {1 - [c - h(t')] / 4}; pointer_basis: see pointer_basis_tau_F_AA.
enum class ApproxForm { printed, pointer_basis };

struct ScenarioConfig {
    std::string preset;
    std::string atomic = "ee";               ///< state name, or raw amplitudes (see parse_atomic)
    FieldKind field = FieldKind::fock;
    int n = 10;                              ///< Fock photon number
    double mean_n = 100.0;                   ///< coherent-state mean photon number
    double g = 1.0;
    double omega = 0.0;
    double t_max = 5.0;                      ///< in units of 1/g
    int steps = 2000;
    std::string out;
    bool approx_compare = false;
    ApproxForm approx_form = ApproxForm::printed;
    double tail_tol = 1e-12;
    double rank_tol = 1e-10;
    std::uint64_t seed = 1;
    std::uint64_t samples = 1000000;
    std::string dims = "2x2x3";              ///< sweep shape
    std::vector<int> n_list{5, 10, 20, 40};  ///< scaling study photon numbers

    void validate() const;
};

/// fig1: ee, Fock 10, gt in [0, 5], 2000 points.
/// fig2: ee, coherent 100, gt in [0, 80], 4000 points.
/// fig3: sym_plus, coherent 100, gt in [0, 80], 4000 points.
/// fig4: ee, coherent 500, gt in [0, 150], 6000 points, approx comparison.
ScenarioConfig preset_config(const std::string& name);

/// Applies one key=value setting; keys match the CLI flag names with '_' for '-'.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value text; blank lines and '#' comments are ignored. A `preset`
/// key resets the configuration to that preset before later keys apply.
ScenarioConfig parse_config(std::istream& in, ScenarioConfig base = {});

/// key=value lines describing `cfg`, in a fixed order.
std::vector<std::pair<std::string, std::string>> describe(const ScenarioConfig& cfg);

/// Name or comma-separated amplitudes (4 reals or 4 re,im pairs) in the order ee, eg, ge, gg.
CVector parse_atomic(const std::string& spec);

struct InitialCondition {
    ModelParams params;
    PureState state;
    CVector atomic;
};

/// Builds the product state; n_max leaves the guard band above every
/// reachable photon number.
InitialCondition prepare(const ScenarioConfig& cfg);

/// gt values 0, ..., t_max at `steps` points.
std::vector<double> time_grid(double t_max, int steps);

std::vector<TangleReport> run_series(const ScenarioConfig& cfg, Execution exec = Execution::parallel);

void write_scenario_csv(std::ostream& out, const ScenarioConfig& cfg, const std::vector<TangleReport>& rows);

struct ApproxRow {
    double gt;
    double exact;
    double approx;
    double abs_diff;
};

struct ApproxComparison {
    std::vector<ApproxRow> rows;
    double window_lo = 0.0;  ///< gt bounds of the validity window
    double window_hi = 0.0;
    double sup_norm = 0.0;   ///< max |diff| over grid points inside the window
};

/// Window is [lo_fraction, hi_fraction] * 2 pi sqrt(<n>).
ApproxComparison compare_exact_vs_approx(const ScenarioConfig& cfg, Execution exec = Execution::parallel,
                                         double lo_fraction = 0.2, double hi_fraction = 0.8);

void write_compare_csv(std::ostream& out, const ScenarioConfig& cfg, const ApproxComparison& cmp);

struct ScalingPoint {
    int n;
    double peak_tau_AA;
    double peak_gt;
};

struct ScalingStudy {
    std::vector<ScalingPoint> points;
    double slope = 0.0;
    double intercept = 0.0;
};

/// Peak atom-atom tangle over one period for |gg, n>, and the log-log slope.
ScalingStudy scaling_study(const std::vector<int>& ns, double g = 1.0, int steps = 2000);

void write_scaling_csv(std::ostream& out, const ScalingStudy& study);

void write_sweep_summary(std::ostream& out, const SystemShape& shape, std::uint64_t seed, const SweepResult& r);

SystemShape parse_dims(const std::string& spec);

// Series analysis helpers

/// Indices of strict interior local maxima whose value exceeds `floor`.
std::vector<std::size_t> local_maxima(const std::vector<double>& series, double floor = 0.0);

/// Largest oscillation envelope of the inversion after `search_from`; the
/// envelope at a point is the spread max - min over a centered window of
/// `window` grid points.
double revival_time(const std::vector<TangleReport>& rows, double search_from, std::size_t window);

}  // namespace tcm
