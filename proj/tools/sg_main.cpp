#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sg/brtdp.hpp"
#include "sg/errors.hpp"
#include "sg/format.hpp"
#include "sg/oracle.hpp"
#include "sg/solve.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// A model reference is a file path first, a builtin spec second.
sg::StochasticGame load_model(const std::string& ref) {
    std::ifstream in(ref, std::ios::binary);
    if (in) {
        std::ostringstream text;
        text << in.rdbuf();
        return sg::parse_model(text.str());
    }
    try {
        auto [name, params] = sg::parse_builtin_spec(ref);
        return sg::builtin_game(name, params);
    } catch (const sg::UnknownBuiltin&) {
        throw std::runtime_error("cannot open '" + ref + "' and it names no builtin");
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

struct SolveConfig {
    std::string model;
    std::string method = "bvi";
    double epsilon = 1e-6;
    std::uint32_t deflate_every = 1;
    std::uint64_t max_iters = 10'000'000;
    std::uint64_t max_trials = 1'000'000;
    std::uint64_t seed = 1;
    std::string trace_path;
    bool oracle_check = false;
};

sg::SolveReport run_method(const sg::StochasticGame& game, const SolveConfig& cfg,
                           std::uint64_t seed, bool record_trace) {
    if (cfg.method == "vi") {
        sg::ViOptions options;
        options.delta = cfg.epsilon;
        options.max_iters = cfg.max_iters;
        options.record_trace = record_trace;
        return sg::solve_vi_classic(game, options);
    }
    if (cfg.method == "bvi" || cfg.method == "bvi-naive") {
        sg::BviOptions options;
        options.epsilon = cfg.epsilon;
        options.max_iters = cfg.max_iters;
        options.deflate_every = cfg.deflate_every;
        options.record_trace = record_trace;
        return cfg.method == "bvi" ? sg::solve_bvi(game, options)
                                   : sg::solve_naive_bvi(game, options);
    }
    sg::BrtdpOptions options;
    options.epsilon = cfg.epsilon;
    options.max_trials = cfg.max_trials;
    options.seed = seed;
    options.record_trace = record_trace;
    return sg::solve_brtdp(game, options);
}

// A run counts as a success exit for vi when the small-change stop fired, even though
// that stop certifies nothing; the report keeps converged=false either way.
bool success_exit(const sg::SolveReport& r) {
    return r.method == "vi" ? !r.iteration_limit_hit : r.converged;
}

std::string trace_csv(const sg::SolveReport& r) {
    std::string csv;
    if (r.method == "brtdp") {
        csv = "trial,visited,L_init,U_init\n";
        for (const sg::TraceRow& row : r.trace)
            csv += std::to_string(row.iteration) + "," + std::to_string(row.visited) + "," +
                   fmt(row.lower_initial) + "," + fmt(row.upper_initial) + "\n";
    } else {
        csv = "iter,L_init,U_init,gap,deflate_calls\n";
        for (const sg::TraceRow& row : r.trace)
            csv += std::to_string(row.iteration) + "," + fmt(row.lower_initial) + "," +
                   fmt(row.upper_initial) + "," +
                   fmt(row.upper_initial - row.lower_initial) + "," +
                   std::to_string(row.deflate_calls) + "\n";
    }
    return csv;
}

int cmd_validate(const std::string& model) {
    try {
        sg::StochasticGame game = load_model(model);
        std::cout << "ok states=" << game.state_count()
                  << " actions=" << game.total_action_count() << "\n";
        return 0;
    } catch (const sg::ParseError& e) {
        std::cerr << "parse error";
        if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
        std::cerr << ": " << e.what() << "\n";
        return 1;
    } catch (const sg::ValidationError& e) {
        std::cerr << "invalid model: " << e.what() << "\n";
        return 1;
    }
}

int cmd_solve(const SolveConfig& cfg) {
    sg::StochasticGame game =
        sg::preprocess_merge_unreachable(load_model(cfg.model));
    sg::SolveReport r = run_method(game, cfg, cfg.seed, !cfg.trace_path.empty());
    if (!cfg.trace_path.empty()) write_text(cfg.trace_path, trace_csv(r));

    bool ok = success_exit(r);
    double gap = r.upper_initial - r.lower_initial;
    std::cout << cfg.method << " on '" << cfg.model << "' ("
              << game.state_count() << " states): "
              << (ok ? "converged after " : "hit the budget at ")
              << r.iterations << " iterations, value in [" << fmt(r.lower_initial)
              << ", " << fmt(r.upper_initial) << "]\n";

    int exit_code = ok ? 0 : 2;
    if (cfg.oracle_check) {
        sg::ExactVector values;
        try {
            values = sg::solve_exact(game);
        } catch (const sg::BudgetExceeded& e) {
            std::cerr << "oracle-check refused: " << e.what() << "\n";
            return 1;
        }
        auto violations = sg::check_bounds(game, r.bounds, values, 1e-9);
        if (violations.empty()) {
            std::cout << "oracle=ok V_init="
                      << sg::rational_to_string(values[game.initial()]) << "\n";
        } else {
            const auto& v = violations.front();
            std::cout << "oracle=FAIL state=" << game.name(v.state) << " side="
                      << (v.lower_side ? "lower" : "upper") << " bound=" << fmt(v.bound)
                      << " value=" << sg::rational_to_string(values[v.state]) << "\n";
            exit_code = 1;
        }
    }

    std::cout << "time_ms=" << fmt(r.wall_ms) << "\n";
    std::cout << "method=" << cfg.method << " iterations=" << r.iterations
              << " L=" << fmt(r.lower_initial) << " U=" << fmt(r.upper_initial)
              << " gap=" << fmt(gap) << " explored=" << r.explored_states
              << " msecs=" << r.msec_count_last << " deflates=" << r.deflate_calls
              << " status=" << (ok ? "converged" : "limit") << "\n";
    return exit_code;
}

int cmd_bench(const std::vector<std::string>& models, const std::string& methods_csv,
              std::uint32_t reps, SolveConfig base) {
    std::vector<std::string> methods;
    std::stringstream in(methods_csv);
    std::string m;
    while (std::getline(in, m, ','))
        if (!m.empty()) methods.push_back(m);
    if (methods.empty()) throw std::runtime_error("bench: no methods given");

    std::cout << "model,method,status,median_ms,iterations,explored,msecs\n";
    for (const std::string& model : models) {
        for (const std::string& method : methods) {
            base.model = model;
            base.method = method;
            std::string status = "converged";
            std::vector<double> times;
            std::vector<std::uint64_t> iters, explored, msecs;
            try {
                sg::StochasticGame game =
                    sg::preprocess_merge_unreachable(load_model(model));
                for (std::uint32_t rep = 0; rep < reps; ++rep) {
                    sg::SolveReport r = run_method(game, base, base.seed + rep, false);
                    if (!success_exit(r)) status = "limit";
                    times.push_back(r.wall_ms);
                    iters.push_back(r.iterations);
                    explored.push_back(r.explored_states);
                    msecs.push_back(r.msec_count_last);
                }
            } catch (const std::exception& e) {
                std::string what = e.what();
                std::replace(what.begin(), what.end(), ',', ';');
                std::replace(what.begin(), what.end(), '\n', ' ');
                std::cout << model << "," << method << ",error: " << what << ",0,0,0,0\n";
                continue;
            }
            auto median_u64 = [](std::vector<std::uint64_t> v) {
                std::sort(v.begin(), v.end());
                return v[(v.size() - 1) / 2];
            };
            std::sort(times.begin(), times.end());
            double median_ms = times.size() % 2 == 1
                                   ? times[times.size() / 2]
                                   : (times[times.size() / 2 - 1] + times[times.size() / 2]) / 2;
            std::cout << model << "," << method << "," << status << "," << fmt(median_ms)
                      << "," << median_u64(iters) << "," << median_u64(explored) << ","
                      << median_u64(msecs) << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"guaranteed-precision reachability solver for simple stochastic games"};
    app.require_subcommand(1);

    auto* validate = app.add_subcommand("validate", "parse and validate a model");
    std::string validate_model;
    validate->add_option("model", validate_model, "model file or builtin name")->required();

    SolveConfig cfg;
    auto* solve = app.add_subcommand("solve", "solve a model");
    solve->add_option("model", cfg.model, "model file or builtin name")->required();
    solve->add_option("--method", cfg.method, "vi | bvi-naive | bvi | brtdp")
        ->check(CLI::IsMember({"vi", "bvi-naive", "bvi", "brtdp"}));
    solve->add_option("--epsilon", cfg.epsilon, "precision target")
        ->check(CLI::PositiveNumber);
    solve->add_option("--deflate-every", cfg.deflate_every,
                      "deflate on every n-th iteration (bvi)");
    solve->add_option("--max-iters", cfg.max_iters, "iteration budget (vi, bvi)");
    solve->add_option("--max-trials", cfg.max_trials, "trial budget (brtdp)");
    solve->add_option("--seed", cfg.seed, "simulation seed (brtdp)");
    solve->add_option("--trace", cfg.trace_path, "write per-iteration CSV here");
    solve->add_flag("--oracle-check", cfg.oracle_check,
                    "cross-check the bounds against exact enumeration");

    sg::GeneratorParams gen_params;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a random model");
    gen->add_option("--states", gen_params.state_count, "state count, sinks included")
        ->check(CLI::Range(3u, 1000000u));
    gen->add_option("--seed", gen_params.seed, "generator seed");
    gen->add_option("--max-actions", gen_params.max_actions, "actions per state cap");
    gen->add_option("--max-branching", gen_params.max_branching, "branches per action cap");
    gen->add_option("--minimizer-fraction", gen_params.minimizer_fraction,
                    "expected share of Minimizer states")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("-o,--output", gen_out, "output path (default stdout)");

    std::string builtin_spec, builtin_out;
    auto* builtin = app.add_subcommand("builtin", "emit a named example model");
    builtin->add_option("name", builtin_spec,
                        "fig1 | fig2-mdp | fig2-collapsed | fig3(a,b) | fig6 | "
                        "skewed(n) | vi-trap(n)")
        ->required();
    builtin->add_option("-o,--output", builtin_out, "output path (default stdout)");

    std::vector<std::string> bench_models;
    std::string bench_methods = "bvi";
    std::uint32_t bench_reps = 20;
    auto* bench = app.add_subcommand("bench", "time methods over models, CSV to stdout");
    bench->add_option("models", bench_models, "model files or builtin names")->required();
    bench->add_option("--methods", bench_methods, "comma-separated method list");
    bench->add_option("--reps", bench_reps, "repetitions per cell")
        ->check(CLI::PositiveNumber);
    bench->add_option("--epsilon", cfg.epsilon, "precision target")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", cfg.seed, "base seed; rep r uses seed + r");
    bench->add_option("--max-iters", cfg.max_iters, "iteration budget (vi, bvi)");
    bench->add_option("--max-trials", cfg.max_trials, "trial budget (brtdp)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(validate_model);
        if (app.got_subcommand(solve)) return cmd_solve(cfg);
        if (app.got_subcommand(gen)) {
            write_text(gen_out, sg::serialize_model(sg::random_game(gen_params)));
            return 0;
        }
        if (app.got_subcommand(builtin)) {
            auto [name, params] = sg::parse_builtin_spec(builtin_spec);
            write_text(builtin_out, sg::serialize_model(sg::builtin_game(name, params)));
            return 0;
        }
        if (app.got_subcommand(bench))
            return cmd_bench(bench_models, bench_methods, bench_reps, cfg);
    } catch (const sg::ParseError& e) {
        std::cerr << "parse error";
        if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
        std::cerr << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
