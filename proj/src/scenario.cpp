#include "tcm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tcm/markoff.hpp"

namespace tcm {

void ScenarioConfig::validate() const {
    if (steps < 2) throw ConfigError("steps must be at least 2");
    if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
    if (!(g > 0.0)) throw ConfigError("g must be positive");
    if (field == FieldKind::fock && n < 0) throw ConfigError("n must be nonnegative");
    if (field == FieldKind::coherent && !(mean_n >= 0.0)) throw ConfigError("mean_n must be nonnegative");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ConfigError("tail_tol must be in (0, 1)");
    if (!(rank_tol > 0.0)) throw ConfigError("rank_tol must be positive");
}

ScenarioConfig preset_config(const std::string& name) {
    ScenarioConfig c;
    c.preset = name;
    if (name == "fig1") {
        c.atomic = "ee";
        c.field = FieldKind::fock;
        c.n = 10;
        c.t_max = 5.0;
        c.steps = 2000;
    } else if (name == "fig2" || name == "fig3") {
        c.atomic = name == "fig2" ? "ee" : "sym_plus";
        c.field = FieldKind::coherent;
        c.mean_n = 100.0;
        c.t_max = 80.0;
        c.steps = 4000;
    } else if (name == "fig4") {
        c.atomic = "ee";
        c.field = FieldKind::coherent;
        c.mean_n = 500.0;
        c.t_max = 150.0;
        c.steps = 6000;
        c.approx_compare = true;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + key + ": '" + v + "'");
    }
}

long long to_integer(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for " + key + ": '" + v + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, sep);) out.push_back(trim(part));
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

void apply_setting(ScenarioConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string v = trim(raw_value);
    if (key == "preset") {
        cfg = preset_config(v);
    } else if (key == "atomic") {
        parse_atomic(v);
        cfg.atomic = v;
    } else if (key == "field") {
        if (v == "fock") cfg.field = FieldKind::fock;
        else if (v == "coherent") cfg.field = FieldKind::coherent;
        else throw ConfigError("field must be 'fock' or 'coherent'");
    } else if (key == "n") {
        cfg.n = static_cast<int>(to_integer(key, v));
    } else if (key == "mean_n") {
        cfg.mean_n = to_double(key, v);
    } else if (key == "g") {
        cfg.g = to_double(key, v);
    } else if (key == "omega") {
        cfg.omega = to_double(key, v);
    } else if (key == "t_max") {
        cfg.t_max = to_double(key, v);
    } else if (key == "steps") {
        cfg.steps = static_cast<int>(to_integer(key, v));
    } else if (key == "out") {
        cfg.out = v;
    } else if (key == "approx_compare") {
        if (v == "true" || v == "1") cfg.approx_compare = true;
        else if (v == "false" || v == "0") cfg.approx_compare = false;
        else throw ConfigError("approx_compare must be true or false");
    } else if (key == "approx_form") {
        if (v == "printed") cfg.approx_form = ApproxForm::printed;
        else if (v == "pointer") cfg.approx_form = ApproxForm::pointer_basis;
        else throw ConfigError("approx_form must be 'printed' or 'pointer'");
    } else if (key == "tail_tol") {
        cfg.tail_tol = to_double(key, v);
    } else if (key == "rank_tol") {
        cfg.rank_tol = to_double(key, v);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(to_integer(key, v));
    } else if (key == "samples") {
        const long long s = to_integer(key, v);
        if (s < 1) throw ConfigError("samples must be at least 1");
        cfg.samples = static_cast<std::uint64_t>(s);
    } else if (key == "dims") {
        parse_dims(v);
        cfg.dims = v;
    } else if (key == "n_list") {
        cfg.n_list.clear();
        for (const auto& p : split(v, ',')) cfg.n_list.push_back(static_cast<int>(to_integer(key, p)));
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

ScenarioConfig parse_config(std::istream& in, ScenarioConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        apply_setting(base, t.substr(0, eq), t.substr(eq + 1));
    }
    return base;
}

std::vector<std::pair<std::string, std::string>> describe(const ScenarioConfig& cfg) {
    std::ostringstream nl;
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) nl << (i ? "," : "") << cfg.n_list[i];
    return {
        {"preset", cfg.preset},
        {"atomic", cfg.atomic},
        {"field", cfg.field == FieldKind::fock ? "fock" : "coherent"},
        {"n", std::to_string(cfg.n)},
        {"mean_n", format_double(cfg.mean_n)},
        {"g", format_double(cfg.g)},
        {"omega", format_double(cfg.omega)},
        {"t_max", format_double(cfg.t_max)},
        {"steps", std::to_string(cfg.steps)},
        {"approx_compare", cfg.approx_compare ? "true" : "false"},
        {"approx_form", cfg.approx_form == ApproxForm::printed ? "printed" : "pointer"},
        {"tail_tol", format_double(cfg.tail_tol)},
        {"rank_tol", format_double(cfg.rank_tol)},
        {"seed", std::to_string(cfg.seed)},
        {"samples", std::to_string(cfg.samples)},
        {"dims", cfg.dims},
        {"n_list", nl.str()},
    };
}

CVector parse_atomic(const std::string& spec) {
    if (spec.find(',') == std::string::npos) {
        try {
            return atomic_state(spec);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    const auto parts = split(spec, ',');
    CVector raw(4);
    if (parts.size() == 4) {
        for (int i = 0; i < 4; ++i) raw(i) = to_double("atomic", parts[static_cast<std::size_t>(i)]);
    } else if (parts.size() == 8) {
        for (int i = 0; i < 4; ++i)
            raw(i) = cplx(to_double("atomic", parts[2 * static_cast<std::size_t>(i)]),
                          to_double("atomic", parts[2 * static_cast<std::size_t>(i) + 1]));
    } else {
        throw ConfigError("atomic amplitudes: expected 4 reals or 4 re,im pairs");
    }
    try {
        return atomic_state(raw);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

InitialCondition prepare(const ScenarioConfig& cfg) {
    cfg.validate();
    const CVector atomic = parse_atomic(cfg.atomic);
    CVector field;
    int top = 0;
    if (cfg.field == FieldKind::fock) {
        top = cfg.n;
        field = fock_state(cfg.n, cfg.n);
    } else {
        const CoherentField cf = coherent_state(cfg.mean_n, cfg.tail_tol);
        top = cf.n_max;
        field = cf.amplitudes;
    }
    // atoms can release two photons; keep the guard band clear of them
    const int n_max = top + 2 + kGuardWidth + 1;
    ModelParams params{cfg.g, cfg.omega, n_max};
    const CVector padded = resize_field(field, n_max);
    CVector amps(4 * (n_max + 1));
    for (int a = 0; a < 4; ++a) amps.segment(a * (n_max + 1), n_max + 1) = atomic(a) * padded;
    return {params, PureState::normalized(SystemShape::tcm(n_max + 1), amps), atomic};
}

std::vector<double> time_grid(double t_max, int steps) {
    if (steps < 2) throw ConfigError("steps must be at least 2");
    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) grid[static_cast<std::size_t>(k)] = t_max * k / (steps - 1);
    return grid;
}

namespace {

// Evaluates fn(k) for k in [0, count); exceptions from workers are rethrown
// after the loop (the lowest index wins).
template <class Fn>
void for_each_point(std::size_t count, Execution exec, Fn fn) {
    if (exec == Execution::serial) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        try {
            fn(static_cast<std::size_t>(k));
        } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<TangleReport> run_series(const ScenarioConfig& cfg, Execution exec) {
    const InitialCondition ic = prepare(cfg);
    const Propagator prop(ic.params);
    const Trajectory traj(prop, ic.state);
    const auto grid = time_grid(cfg.t_max, cfg.steps);
    std::vector<TangleReport> rows(grid.size());
    for_each_point(grid.size(), exec, [&](std::size_t k) {
        const double t = grid[k] / cfg.g;
        rows[k] = tangle_report(traj.at(t), t, cfg.rank_tol);
    });
    return rows;
}

namespace {

void write_header(std::ostream& out, const ScenarioConfig& cfg) {
    for (const auto& [k, v] : describe(cfg)) out << "# " << k << '=' << v << '\n';
}

}  // namespace

void write_scenario_csv(std::ostream& out, const ScenarioConfig& cfg, const std::vector<TangleReport>& rows) {
    write_header(out, cfg);
    out << "gt,tau_F_AA,tau_A_rest,tau_AA,tau_AF,tau_res,inversion,field_eff_dim\n";
    out << std::setprecision(15);
    for (const auto& r : rows)
        out << cfg.g * r.t << ',' << r.tau_F_AA << ',' << r.tau_A_rest << ',' << r.tau_AA << ',' << r.tau_AF << ','
            << r.tau_res << ',' << r.inversion << ',' << r.field_eff_dim << '\n';
}

ApproxComparison compare_exact_vs_approx(const ScenarioConfig& cfg, Execution exec, double lo_fraction,
                                         double hi_fraction) {
    if (cfg.field != FieldKind::coherent) throw ConfigError("compare-approx requires a coherent field");
    const InitialCondition ic = prepare(cfg);
    const JxCoefficients d = jx_coefficients(ic.atomic);
    const Propagator prop(ic.params);
    const Trajectory traj(prop, ic.state);
    const auto grid = time_grid(cfg.t_max, cfg.steps);

    ApproxComparison cmp;
    const double revival = 2.0 * std::numbers::pi * std::sqrt(cfg.mean_n);
    cmp.window_lo = lo_fraction * revival;
    cmp.window_hi = hi_fraction * revival;
    cmp.rows.resize(grid.size());
    for_each_point(grid.size(), exec, [&](std::size_t k) {
        const double gt = grid[k];
        const double t = gt / cfg.g;
        const double exact = pure_itangle(traj.at(t), {{0, 1}, {2}});
        const double approx = cfg.approx_form == ApproxForm::printed
                                  ? approx_tau_F_AA(d, cfg.g, t, cfg.mean_n)
                                  : pointer_basis_tau_F_AA(d, cfg.g, t, cfg.mean_n);
        cmp.rows[k] = {gt, exact, approx, std::abs(exact - approx)};
    });
    for (const auto& r : cmp.rows)
        if (r.gt >= cmp.window_lo && r.gt <= cmp.window_hi) cmp.sup_norm = std::max(cmp.sup_norm, r.abs_diff);
    return cmp;
}

void write_compare_csv(std::ostream& out, const ScenarioConfig& cfg, const ApproxComparison& cmp) {
    write_header(out, cfg);
    out << "gt,tau_F_AA_exact,tau_F_AA_approx,abs_diff\n";
    out << std::setprecision(15);
    for (const auto& r : cmp.rows) out << r.gt << ',' << r.exact << ',' << r.approx << ',' << r.abs_diff << '\n';
    out << "# window_gt=[" << cmp.window_lo << ',' << cmp.window_hi << "]\n";
    out << "# sup_norm=" << cmp.sup_norm << '\n';
}

ScalingStudy scaling_study(const std::vector<int>& ns, double g, int steps) {
    std::vector<int> distinct(ns);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw ConfigError("scaling: need at least three distinct photon numbers");
    if (distinct.front() < 2) throw ConfigError("scaling: photon numbers must be at least 2");

    ScalingStudy study;
    for (int n : ns) {
        ScenarioConfig cfg;
        cfg.atomic = "gg";
        cfg.field = FieldKind::fock;
        cfg.n = n;
        cfg.g = g;
        const InitialCondition ic = prepare(cfg);
        const Propagator prop(ic.params);
        // one period of the populated block: the spectrum is {-E, 0, E} on the symmetric states
        const BlockPropagator& block = prop.blocks()[static_cast<std::size_t>(n)];
        const double e_max = block.eigenvalues.cwiseAbs().maxCoeff();
        const double period = 2.0 * std::numbers::pi / e_max;
        const Trajectory traj(prop, ic.state);
        auto tau = [&](double t) { return wootters_tangle(partial_trace(traj.at(t), {0, 1}).matrix()); };

        double best = -1.0;
        double best_t = 0.0;
        for (int k = 0; k < steps; ++k) {
            const double t = period * k / steps;
            const double v = tau(t);
            if (v > best) {
                best = v;
                best_t = t;
            }
        }
        // golden-section polish inside the neighbouring grid cells
        double lo = best_t - period / steps;
        double hi = best_t + period / steps;
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 60; ++it) {
            const double a = hi - phi * (hi - lo);
            const double b = lo + phi * (hi - lo);
            if (tau(a) > tau(b)) hi = b;
            else lo = a;
        }
        const double polished_t = 0.5 * (lo + hi);
        const double polished = tau(polished_t);
        if (polished > best) {
            best = polished;
            best_t = polished_t;
        }
        study.points.push_back({n, best, g * best_t});
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(study.points.size());
    for (const auto& p : study.points) {
        const double x = std::log(static_cast<double>(p.n));
        const double y = std::log(p.peak_tau_AA);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    study.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    study.intercept = (sy - study.slope * sx) / m;
    return study;
}

void write_scaling_csv(std::ostream& out, const ScalingStudy& study) {
    out << "n,peak_tau_AA,peak_gt\n";
    out << std::setprecision(15);
    for (const auto& p : study.points) out << p.n << ',' << p.peak_tau_AA << ',' << p.peak_gt << '\n';
    out << "# loglog_slope=" << study.slope << '\n';
    out << "# loglog_intercept=" << study.intercept << '\n';
}

void write_sweep_summary(std::ostream& out, const SystemShape& shape, std::uint64_t seed, const SweepResult& r) {
    out << std::setprecision(17);
    out << "dims=";
    for (std::size_t i = 0; i < shape.factor_count(); ++i) out << (i ? "x" : "") << shape.dim(i);
    out << '\n';
    out << "seed=" << seed << '\n';
    out << "samples=" << r.samples << '\n';
    out << "min_value=" << r.min_value << '\n';
    out << "argmin_index=" << r.argmin_index << '\n';
    out << "mean_value=" << r.sum / static_cast<double>(r.samples) << '\n';
    out << "negative_threshold=" << kNegativeThreshold << '\n';
    out << "negative_count=" << r.negative_count << '\n';
}

SystemShape parse_dims(const std::string& spec) {
    std::vector<int> dims;
    for (const auto& p : split(spec, 'x')) dims.push_back(static_cast<int>(to_integer("dims", p)));
    try {
        return SystemShape(dims);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::vector<std::size_t> local_maxima(const std::vector<double>& series, double floor) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 1; k + 1 < series.size(); ++k)
        if (series[k] > floor && series[k] > series[k - 1] && series[k] >= series[k + 1]) idx.push_back(k);
    return idx;
}

double revival_time(const std::vector<TangleReport>& rows, double search_from, std::size_t window) {
    double best = -1.0;
    double best_t = std::numeric_limits<double>::quiet_NaN();
    const std::size_t half = window / 2;
    for (std::size_t k = half; k + half < rows.size(); ++k) {
        if (rows[k].t < search_from) continue;
        double lo = rows[k - half].inversion;
        double hi = lo;
        for (std::size_t j = k - half; j <= k + half; ++j) {
            lo = std::min(lo, rows[j].inversion);
            hi = std::max(hi, rows[j].inversion);
        }
        if (hi - lo > best) {
            best = hi - lo;
            best_t = rows[k].t;
        }
    }
    return best_t;
}

}  // namespace tcm
