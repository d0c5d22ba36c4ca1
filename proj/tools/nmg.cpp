// Command-line front end: pmf and expansion evaluation, rate-fit experiments,
// moment checks, divergence estimates, deficiency sweeps, and tail bounds.
// Emits a JSON summary (with the effective config) on stdout and, with --out,
// a fixed-schema RFC-4180 CSV. Outputs are byte-identical for a fixed config
// and seed at any --threads setting.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nmgauss/nmgauss.hpp"

using nlohmann::ordered_json;
using namespace nmgauss;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_u64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%" PRIu64, v);
    return buf;
}

template <typename T>
std::string join_semicolon(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ';';
        if constexpr (std::is_same_v<T, double>)
            out += fmt17(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out;
}

// RFC-4180 writer: CRLF line endings, quoting only where required.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) {
        if (path.empty()) return;
        stream_.open(path, std::ios::binary);
        if (!stream_)
            throw InvalidParameter("cannot open output file: " + path);
        active_ = true;
    }

    void row(const std::vector<std::string>& fields) {
        if (!active_) return;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) stream_ << ',';
            stream_ << quoted(fields[i]);
        }
        stream_ << "\r\n";
    }

private:
    static std::string quoted(const std::string& field) {
        if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
        std::string out = "\"";
        for (char c : field) {
            out += c;
            if (c == '"') out += '"';
        }
        out += '"';
        return out;
    }

    std::ofstream stream_;
    bool active_ = false;
};

std::vector<double> parse_r_grid(const std::string& text) {
    double lo = 0.0, hi = 0.0, factor = 0.0;
    char trailing = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &factor, &trailing) != 3)
        throw InvalidParameter("r-grid: expected lo:hi:factor, got '" + text + "'");
    if (!(lo > 0.0) || !(hi >= lo) || !(factor > 1.0))
        throw InvalidParameter("r-grid: need 0 < lo <= hi and factor > 1");
    std::vector<double> grid;
    for (double r = lo; r <= hi * (1.0 + 1e-12); r *= factor) grid.push_back(r);
    return grid;
}

struct GlobalOpts {
    unsigned threads = 0;
    std::string out;
};

ordered_json base_config(const std::string& command, const GlobalOpts& global) {
    ordered_json config;
    config["command"] = command;
    config["threads"] = global.threads;
    config["out"] = global.out;
    return config;
}

void emit(const ordered_json& summary) { std::cout << summary.dump(2) << "\n"; }

ModelParams make_params(int d, double r, const std::vector<double>& p) {
    ModelParams params{d, r, p};
    validate(params);
    return params;
}

// ---------------------------------------------------------------------------
// Subcommand payloads
// ---------------------------------------------------------------------------

struct PmfOpts {
    int d = 1;
    double r = 0.0;
    std::vector<double> p;
    std::vector<long long> k;
};

void run_pmf(const PmfOpts& opt, const GlobalOpts& global) {
    ModelParams params = make_params(opt.d, opt.r, opt.p);
    double lp = log_pmf(params, opt.k);

    ordered_json summary = base_config("pmf", global);
    summary["config"] = {{"d", opt.d}, {"r", opt.r}, {"p", opt.p}, {"k", opt.k}};
    summary["log_pmf"] = lp;
    summary["pmf"] = std::exp(lp);
    emit(summary);

    CsvWriter csv(global.out);
    csv.row({"d", "r", "k", "log_pmf", "pmf"});
    csv.row({std::to_string(opt.d), fmt17(opt.r), join_semicolon(opt.k), fmt17(lp),
             fmt17(std::exp(lp))});
}

struct ExpansionOpts {
    int d = 1;
    double r = 0.0;
    std::vector<double> p;
    std::vector<long long> k;
    double gamma = 1.0;
    bool force = false;
};

void run_expansion(const ExpansionOpts& opt, const GlobalOpts& global) {
    ModelParams params = make_params(opt.d, opt.r, opt.p);
    BulkSpec spec{opt.gamma};
    DerivedParams derived = derive(params);
    bool inside = in_bulk(derived, params.r, spec, opt.k);
    ExpansionEval eval = evaluate_expansion(params, spec, opt.k, opt.force);

    ordered_json summary = base_config("expansion", global);
    summary["config"] = {{"d", opt.d},         {"r", opt.r},  {"p", opt.p},
                         {"k", opt.k},         {"gamma", opt.gamma},
                         {"force", opt.force}};
    summary["in_bulk"] = inside;
    summary["log_ratio_exact"] = eval.log_ratio_exact;
    summary["f_term"] = eval.f_term;
    summary["s_term"] = eval.s_term;
    summary["residual"] = eval.residual;
    emit(summary);

    CsvWriter csv(global.out);
    csv.row({"d", "r", "gamma", "k", "log_ratio_exact", "f_term", "s_term", "residual"});
    csv.row({std::to_string(opt.d), fmt17(opt.r), fmt17(opt.gamma), join_semicolon(opt.k),
             fmt17(eval.log_ratio_exact), fmt17(eval.f_term), fmt17(eval.s_term),
             fmt17(eval.residual)});
}

struct RateFitOpts {
    std::string experiment = "residual";
    int d = 1;
    std::vector<double> p{0.5};
    double gamma = 1.0;
    std::string r_grid;
    std::uint64_t budget = 10000000;
    std::uint64_t seed = 0;
    std::string method = "quadrature";
    double b = 0.25;
    int grid_points = 3;
    std::string family = "matched";
};

FamilyKind family_from_name(const std::string& name) {
    if (name == "matched") return FamilyKind::gaussian_matched;
    if (name == "diagonal") return FamilyKind::gaussian_diagonal;
    if (name == "stabilized") return FamilyKind::gaussian_stabilized;
    throw InvalidParameter("family: expected matched, diagonal, or stabilized");
}

void run_rate_fit(const RateFitOpts& opt, const GlobalOpts& global) {
    std::vector<double> grid = parse_r_grid(opt.r_grid);
    if (grid.size() < 2)
        throw InvalidParameter("rate-fit: the r grid must contain at least two points");
    const Method method =
        opt.method == "mc" ? Method::monte_carlo : Method::cell_quadrature;

    CsvWriter csv(global.out);
    std::vector<std::pair<double, double>> points;
    ordered_json rows = ordered_json::array();

    if (opt.experiment == "residual" || opt.experiment == "residual-no-s" ||
        opt.experiment == "residual-none") {
        csv.row({"r", "max_residual", "normalized_residual"});
        for (double r : grid) {
            ModelParams params = make_params(opt.d, r, opt.p);
            ResidualScan scan = residual_scan(params, BulkSpec{opt.gamma}, global.threads);
            double value = opt.experiment == "residual" ? scan.max_norm
                           : opt.experiment == "residual-no-s" ? scan.max_norm_no_s
                                                               : scan.max_norm_none;
            points.emplace_back(r, value);
            rows.push_back({{"r", r}, {"max_residual", scan.max_abs}, {"value", value}});
            csv.row({fmt17(r), fmt17(scan.max_abs), fmt17(value)});
        }
    } else if (opt.experiment == "hellinger" || opt.experiment == "tv") {
        csv.row({"r", "value", "std_error", "n"});
        for (double r : grid) {
            ModelParams params = make_params(opt.d, r, opt.p);
            DivergenceEstimate est =
                opt.experiment == "hellinger"
                    ? hellinger_jittered_vs_gaussian(params, method, opt.budget, opt.seed,
                                                     global.threads)
                    : tv_jittered_vs_gaussian(params, opt.budget, opt.seed, global.threads);
            points.emplace_back(r, est.value);
            rows.push_back({{"r", r}, {"value", est.value}, {"std_error", est.std_error},
                            {"n", est.n}});
            csv.row({fmt17(r), fmt17(est.value), fmt17(est.std_error), fmt_u64(est.n)});
        }
    } else if (opt.experiment == "lecam-t1" || opt.experiment == "lecam-t2") {
        csv.row({"r", "value", "estimator_error", "sup_p"});
        for (double r : grid) {
            ParameterSet set = make_theta_grid(opt.d, opt.b, opt.grid_points, r);
            ExperimentFamily counts{FamilyKind::negative_multinomial, set, r};
            ExperimentFamily target{family_from_name(opt.family), set, r};
            KernelChoice kernel =
                opt.experiment == "lecam-t1" ? KernelChoice::T1 : KernelChoice::T2;
            DeficiencyEstimate est = deficiency_upper(counts, target, kernel, opt.budget,
                                                      opt.seed, global.threads);
            points.emplace_back(r, est.value);
            rows.push_back({{"r", r}, {"value", est.value},
                            {"estimator_error", est.estimator_error},
                            {"sup_p", est.sup_attained_at.p}});
            csv.row({fmt17(r), fmt17(est.value), fmt17(est.estimator_error),
                     join_semicolon(est.sup_attained_at.p)});
        }
    } else if (opt.experiment == "h-q-qtilde") {
        csv.row({"r", "value"});
        for (double r : grid) {
            ModelParams params = make_params(opt.d, r, opt.p);
            double h = hellinger_gaussians(family_spec(FamilyKind::gaussian_matched, params),
                                           family_spec(FamilyKind::gaussian_diagonal, params));
            points.emplace_back(r, h);
            rows.push_back({{"r", r}, {"value", h}});
            csv.row({fmt17(r), fmt17(h)});
        }
    } else {
        throw InvalidParameter("rate-fit: unknown experiment '" + opt.experiment + "'");
    }

    RateFitResult fit = fit_rate(points);
    // OLS slope standard error; the grid sizes here are small, so the normal
    // 95% band is reported rather than a t-quantile
    double se = 0.0;
    if (fit.points.size() > 2) {
        double mean_x = 0.0;
        for (const auto& [x, y] : fit.points) mean_x += x;
        mean_x /= static_cast<double>(fit.points.size());
        double sxx = 0.0, ss_res = 0.0;
        for (const auto& [x, y] : fit.points) {
            sxx += (x - mean_x) * (x - mean_x);
            double e = y - fit.intercept - fit.slope * x;
            ss_res += e * e;
        }
        se = std::sqrt(ss_res / static_cast<double>(fit.points.size() - 2) / sxx);
    }

    ordered_json summary = base_config("rate-fit", global);
    summary["config"] = {{"experiment", opt.experiment},
                         {"d", opt.d},
                         {"p", opt.p},
                         {"gamma", opt.gamma},
                         {"r_grid", opt.r_grid},
                         {"budget", opt.budget},
                         {"seed", opt.seed},
                         {"method", opt.method},
                         {"b", opt.b},
                         {"grid_points", opt.grid_points},
                         {"family", opt.family}};
    summary["fit"] = {{"slope", fit.slope},
                      {"intercept", fit.intercept},
                      {"r_squared", fit.r_squared},
                      {"slope_stderr", se},
                      {"slope_ci95", {fit.slope - 1.96 * se, fit.slope + 1.96 * se}},
                      {"n_points", fit.points.size()}};
    summary["points"] = rows;
    emit(summary);
}

struct MomentsOpts {
    int d = 1;
    double r = 0.0;
    std::vector<double> p;
    std::vector<int> idx;
    long long box = 0;
    double gamma = 0.0; // > 0 enables the truncated bound check
};

void run_moments(const MomentsOpts& opt, const GlobalOpts& global) {
    ModelParams params = make_params(opt.d, opt.r, opt.p);
    DerivedParams derived = derive(params);
    MomentIndex idx{opt.idx};
    validate(idx, params.d);
    long long box = opt.box > 0 ? opt.box : default_moment_box(params);

    double formula = central_moment_formula(derived, params.r, idx);
    double brute = brute_force_moment(params, idx, box);

    ordered_json summary = base_config("moments", global);
    summary["config"] = {{"d", opt.d}, {"r", opt.r}, {"p", opt.p},
                         {"indices", opt.idx}, {"box", box}, {"gamma", opt.gamma}};
    summary["formula"] = formula;
    summary["brute_force"] = brute;
    summary["abs_gap"] = std::abs(brute - formula);

    std::string lhs_s, rhs_s, holds_s;
    if (opt.gamma > 0.0) {
        MomentBoundCheck check =
            truncated_moment_bound_check(params, idx, BulkSpec{opt.gamma}, box);
        summary["bound"] = {{"lhs", check.lhs}, {"rhs", check.rhs}, {"holds", check.holds}};
        lhs_s = fmt17(check.lhs);
        rhs_s = fmt17(check.rhs);
        holds_s = check.holds ? "1" : "0";
    }
    emit(summary);

    CsvWriter csv(global.out);
    csv.row({"d", "r", "indices", "formula", "brute_force", "abs_gap", "bound_lhs",
             "bound_rhs", "bound_holds"});
    csv.row({std::to_string(opt.d), fmt17(opt.r), join_semicolon(opt.idx), fmt17(formula),
             fmt17(brute), fmt17(std::abs(brute - formula)), lhs_s, rhs_s, holds_s});
}

struct DivergenceOpts {
    int d = 1;
    double r = 0.0;
    std::vector<double> p;
    std::string method = "quadrature";
    std::uint64_t budget = 10000000;
    std::uint64_t seed = 0;
};

void run_hellinger(const DivergenceOpts& opt, const GlobalOpts& global) {
    ModelParams params = make_params(opt.d, opt.r, opt.p);
    Method method = opt.method == "mc" ? Method::monte_carlo : Method::cell_quadrature;
    DivergenceEstimate est =
        hellinger_jittered_vs_gaussian(params, method, opt.budget, opt.seed, global.threads);

    ordered_json summary = base_config("hellinger", global);
    summary["config"] = {{"d", opt.d}, {"r", opt.r}, {"p", opt.p},
                         {"method", opt.method}, {"budget", opt.budget}, {"seed", opt.seed}};
    summary["value"] = est.value;
    summary["method"] = method_name(est.method);
    summary["n"] = est.n;
    summary["std_error"] = est.std_error;
    summary["n_clipped"] = est.n_clipped;
    emit(summary);

    CsvWriter csv(global.out);
    csv.row({"d", "r", "method", "value", "std_error", "n", "seed"});
    csv.row({std::to_string(opt.d), fmt17(opt.r), method_name(est.method), fmt17(est.value),
             fmt17(est.std_error), fmt_u64(est.n), fmt_u64(opt.seed)});
}

void run_tv(const DivergenceOpts& opt, const GlobalOpts& global) {
    ModelParams params = make_params(opt.d, opt.r, opt.p);
    DivergenceEstimate est =
        tv_jittered_vs_gaussian(params, opt.budget, opt.seed, global.threads);

    ordered_json summary = base_config("tv", global);
    summary["config"] = {{"d", opt.d}, {"r", opt.r}, {"p", opt.p},
                         {"budget", opt.budget}, {"seed", opt.seed}};
    summary["value"] = est.value;
    summary["n"] = est.n;
    summary["std_error"] = est.std_error;
    emit(summary);

    CsvWriter csv(global.out);
    csv.row({"d", "r", "value", "std_error", "n", "seed"});
    csv.row({std::to_string(opt.d), fmt17(opt.r), fmt17(est.value), fmt17(est.std_error),
             fmt_u64(est.n), fmt_u64(opt.seed)});
}

struct LecamOpts {
    int d = 1;
    double r = 0.0;
    double b = 0.25;
    int grid_points = 3;
    std::string kernel = "t1";
    std::string family = "matched";
    std::uint64_t budget = 10000000;
    std::uint64_t seed = 0;
};

void run_lecam(const LecamOpts& opt, const GlobalOpts& global) {
    if (opt.kernel != "t1" && opt.kernel != "t2")
        throw InvalidParameter("lecam: kernel must be t1 or t2");
    ParameterSet set = make_theta_grid(opt.d, opt.b, opt.grid_points, opt.r);
    ExperimentFamily counts{FamilyKind::negative_multinomial, set, opt.r};
    ExperimentFamily target{family_from_name(opt.family), set, opt.r};
    KernelChoice kernel = opt.kernel == "t1" ? KernelChoice::T1 : KernelChoice::T2;
    DeficiencyEstimate est =
        deficiency_upper(counts, target, kernel, opt.budget, opt.seed, global.threads);

    ordered_json summary = base_config("lecam", global);
    summary["config"] = {{"d", opt.d},       {"r", opt.r},
                         {"b", opt.b},       {"grid_points", opt.grid_points},
                         {"kernel", opt.kernel}, {"family", opt.family},
                         {"budget", opt.budget}, {"seed", opt.seed}};
    summary["value"] = est.value;
    summary["direction"] = est.direction == Direction::P_to_Q ? "P->Q" : "Q->P";
    summary["sup_attained_at_p"] = est.sup_attained_at.p;
    summary["estimator_error"] = est.estimator_error;
    emit(summary);

    CsvWriter csv(global.out);
    csv.row({"d", "r", "b", "kernel", "family", "value", "estimator_error", "sup_p"});
    csv.row({std::to_string(opt.d), fmt17(opt.r), fmt17(opt.b), opt.kernel, opt.family,
             fmt17(est.value), fmt17(est.estimator_error),
             join_semicolon(est.sup_attained_at.p)});
}

struct TailBoundOpts {
    int d = 1;
    double r = 0.0;
    std::vector<double> p;
    std::string r_grid;
};

void run_tail_bound(const TailBoundOpts& opt, const GlobalOpts& global) {
    ModelParams params{opt.d, 1.0, opt.p};
    validate(params);
    std::vector<double> grid;
    if (!opt.r_grid.empty())
        grid = parse_r_grid(opt.r_grid);
    else if (opt.r > 0.0)
        grid.push_back(opt.r);
    else
        throw InvalidParameter("tail-bound: provide --r or --r-grid");

    CsvWriter csv(global.out);
    csv.row({"d", "r", "bound"});
    ordered_json rows = ordered_json::array();
    for (double r : grid) {
        double bound = tail_bound_eq8(params, r);
        rows.push_back({{"r", r}, {"bound", bound}});
        csv.row({std::to_string(opt.d), fmt17(r), fmt17(bound)});
    }

    ordered_json summary = base_config("tail-bound", global);
    summary["config"] = {{"d", opt.d}, {"p", opt.p}, {"r", opt.r}, {"r_grid", opt.r_grid}};
    summary["values"] = rows;
    emit(summary);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"negative multinomial vs gaussian: expansions, distances, deficiencies"};
    app.require_subcommand(1);
    app.set_config("--config")->description("read defaults from an INI/TOML file");

    GlobalOpts global;
    app.add_option("--threads", global.threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    app.add_option("--out", global.out, "CSV output path")->capture_default_str();

    PmfOpts pmf_opt;
    auto* pmf_cmd = app.add_subcommand("pmf", "evaluate the count pmf at a lattice point");
    pmf_cmd->add_option("--d", pmf_opt.d, "dimension")->capture_default_str();
    pmf_cmd->add_option("--r", pmf_opt.r, "stopping weight")->required();
    pmf_cmd->add_option("--p", pmf_opt.p, "success probabilities")->delimiter(',')->required();
    pmf_cmd->add_option("--k", pmf_opt.k, "lattice point")->delimiter(',')->required();

    ExpansionOpts exp_opt;
    auto* exp_cmd =
        app.add_subcommand("expansion", "exact log ratio, corrections, and residual");
    exp_cmd->add_option("--d", exp_opt.d, "dimension")->capture_default_str();
    exp_cmd->add_option("--r", exp_opt.r, "stopping weight")->required();
    exp_cmd->add_option("--p", exp_opt.p, "success probabilities")->delimiter(',')->required();
    exp_cmd->add_option("--k", exp_opt.k, "lattice point")->delimiter(',')->required();
    exp_cmd->add_option("--gamma", exp_opt.gamma, "central region width")
        ->capture_default_str();
    exp_cmd->add_flag("--force", exp_opt.force, "evaluate outside the central region");

    RateFitOpts rate_opt;
    auto* rate_cmd = app.add_subcommand("rate-fit", "decay-rate experiment over an r grid");
    rate_cmd->add_option("--experiment", rate_opt.experiment,
                         "residual | residual-no-s | residual-none | hellinger | tv | "
                         "lecam-t1 | lecam-t2 | h-q-qtilde")
        ->capture_default_str();
    rate_cmd->add_option("--d", rate_opt.d, "dimension")->capture_default_str();
    rate_cmd->add_option("--p", rate_opt.p, "success probabilities")->delimiter(',')
        ->capture_default_str();
    rate_cmd->add_option("--gamma", rate_opt.gamma, "central region width")
        ->capture_default_str();
    rate_cmd->add_option("--r-grid", rate_opt.r_grid, "geometric grid lo:hi:factor")
        ->required();
    rate_cmd->add_option("--budget", rate_opt.budget, "cells or samples per point")
        ->capture_default_str();
    rate_cmd->add_option("--seed", rate_opt.seed, "root seed")->capture_default_str();
    rate_cmd->add_option("--method", rate_opt.method, "quadrature | mc")
        ->capture_default_str();
    rate_cmd->add_option("--b", rate_opt.b, "parameter-set floor (lecam experiments)")
        ->capture_default_str();
    rate_cmd->add_option("--grid-points", rate_opt.grid_points,
                         "parameter grid size (lecam experiments)")
        ->capture_default_str();
    rate_cmd->add_option("--family", rate_opt.family,
                         "matched | diagonal | stabilized (lecam experiments)")
        ->capture_default_str();

    MomentsOpts mom_opt;
    auto* mom_cmd =
        app.add_subcommand("moments", "closed-form vs brute-force central moments");
    mom_cmd->add_option("--d", mom_opt.d, "dimension")->capture_default_str();
    mom_cmd->add_option("--r", mom_opt.r, "stopping weight")->required();
    mom_cmd->add_option("--p", mom_opt.p, "success probabilities")->delimiter(',')->required();
    mom_cmd->add_option("--idx", mom_opt.idx, "1-based moment indices")->delimiter(',')
        ->required();
    mom_cmd->add_option("--box", mom_opt.box, "summation box (0 = default policy)")
        ->capture_default_str();
    mom_cmd->add_option("--gamma", mom_opt.gamma,
                        "when > 0, also run the truncated bound check")
        ->capture_default_str();

    DivergenceOpts hel_opt;
    auto* hel_cmd =
        app.add_subcommand("hellinger", "hellinger distance to the matched gaussian");
    hel_cmd->add_option("--d", hel_opt.d, "dimension")->capture_default_str();
    hel_cmd->add_option("--r", hel_opt.r, "stopping weight")->required();
    hel_cmd->add_option("--p", hel_opt.p, "success probabilities")->delimiter(',')->required();
    hel_cmd->add_option("--method", hel_opt.method, "quadrature | mc")->capture_default_str();
    hel_cmd->add_option("--budget", hel_opt.budget, "cells or samples")->capture_default_str();
    hel_cmd->add_option("--seed", hel_opt.seed, "root seed")->capture_default_str();

    DivergenceOpts tv_opt;
    auto* tv_cmd =
        app.add_subcommand("tv", "total variation distance to the matched gaussian");
    tv_cmd->add_option("--d", tv_opt.d, "dimension")->capture_default_str();
    tv_cmd->add_option("--r", tv_opt.r, "stopping weight")->required();
    tv_cmd->add_option("--p", tv_opt.p, "success probabilities")->delimiter(',')->required();
    tv_cmd->add_option("--budget", tv_opt.budget, "quadrature cell budget")
        ->capture_default_str();
    tv_cmd->add_option("--seed", tv_opt.seed, "root seed")->capture_default_str();

    LecamOpts lecam_opt;
    auto* lecam_cmd =
        app.add_subcommand("lecam", "kernel-transport deficiency over a parameter grid");
    lecam_cmd->add_option("--d", lecam_opt.d, "dimension (1 or 2)")->capture_default_str();
    lecam_cmd->add_option("--r", lecam_opt.r, "stopping weight")->required();
    lecam_cmd->add_option("--b", lecam_opt.b, "parameter-set floor")->capture_default_str();
    lecam_cmd->add_option("--grid-points", lecam_opt.grid_points, "parameter grid size")
        ->capture_default_str();
    lecam_cmd->add_option("--kernel", lecam_opt.kernel, "t1 | t2")->capture_default_str();
    lecam_cmd->add_option("--family", lecam_opt.family, "matched | diagonal | stabilized")
        ->capture_default_str();
    lecam_cmd->add_option("--budget", lecam_opt.budget, "quadrature cell budget")
        ->capture_default_str();
    lecam_cmd->add_option("--seed", lecam_opt.seed, "root seed")->capture_default_str();

    TailBoundOpts tail_opt;
    auto* tail_cmd =
        app.add_subcommand("tail-bound", "exponential off-center mass bound");
    tail_cmd->add_option("--d", tail_opt.d, "dimension")->capture_default_str();
    tail_cmd->add_option("--p", tail_opt.p, "success probabilities")->delimiter(',')
        ->required();
    tail_cmd->add_option("--r", tail_opt.r, "stopping weight");
    tail_cmd->add_option("--r-grid", tail_opt.r_grid, "geometric grid lo:hi:factor");

    try {
        app.parse(argc, argv);
        if (pmf_cmd->parsed()) run_pmf(pmf_opt, global);
        if (exp_cmd->parsed()) run_expansion(exp_opt, global);
        if (rate_cmd->parsed()) run_rate_fit(rate_opt, global);
        if (mom_cmd->parsed()) run_moments(mom_opt, global);
        if (hel_cmd->parsed()) run_hellinger(hel_opt, global);
        if (tv_cmd->parsed()) run_tv(tv_opt, global);
        if (lecam_cmd->parsed()) run_lecam(lecam_opt, global);
        if (tail_cmd->parsed()) run_tail_bound(tail_opt, global);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const OutOfBulk& e) {
        std::cerr << "config error: " << e.what() << " (use --force to evaluate anyway)\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 4;
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
