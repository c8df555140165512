#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "scca/combinatorics.hpp"
#include "scca/errors.hpp"
#include "scca/io.hpp"
#include "scca/lowrank.hpp"

namespace scca::cli {

namespace {

std::string fmt(double v, const char* spec = "%.10g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string fmt_vector(const Vector& v)
{
    std::string s = "[";
    for (Index i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

// Enumeration size above which `auto` stops trying branch-and-cut.
constexpr double kAutoExactCap = 1e7;

struct SolveArgs {
    std::string instance;
    std::string method{"auto"};
    double eps{1e-6};
    double gap_tol{1e-6};
    double time_limit{0};
    std::size_t node_limit{0};
    std::uint64_t seed{0};
    std::string cert;
    bool rank1_approx{false};
    unsigned threads{1};
    bool deterministic{false};
};

struct GenerateArgs {
    GeneratorConfig cfg;
    std::string output;
    bool sum_covariance{false};
    bool no_population{false};
};

BranchAndCutOptions bnc_options(double eps, double gap_tol, double time_limit, std::size_t node_limit)
{
    BranchAndCutOptions o;
    o.cut.eps = eps;
    o.abs_gap_tol = gap_tol;
    o.time_limit = time_limit;
    o.node_limit = node_limit;
    o.keep_cuts = false;
    return o;
}

Certificate heuristic_certificate(const HeuristicResult& h, const char* method)
{
    Certificate c;
    c.method = method;
    c.incumbent = h.solution;
    c.value = h.solution.value;
    c.upper_bound = 1.0;
    c.gap = 1.0 - c.value;
    c.status = c.gap <= 0 ? Status::Optimal : Status::GapLimit;
    c.evaluations = h.evaluations;
    return c;
}

template <typename F>
Certificate timed(F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    Certificate c = f();
    c.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

double enumeration_size(const CovarianceInstance& inst)
{
    return binomial(inst.n(), inst.s1) * binomial(inst.m(), inst.s2);
}

Certificate solve_auto(const CovarianceInstance& inst, const SolveArgs& a,
                       const std::optional<RankOneFactors>& given, std::ostream& err)
{
    const auto profile = rank_profile(inst);
    if (profile.reduction == ReductionCase::BothRedundant) {
        auto cert = solve_reduced(inst, profile);
        if (cert.incumbent.within_budget)
            return cert;
        err << "warning: reduced solution exceeds the budgets, falling back to search\n";
    }
    const bool one_side =
        profile.reduction == ReductionCase::XOnly || profile.reduction == ReductionCase::YOnly;
    const CovarianceInstance work = one_side ? drop_redundant_budgets(inst, profile) : inst;

    Certificate cert;
    const auto factors = given ? given : rank_one_factors(work.A);
    if (factors) {
        RankOneOptions ro;
        ro.concurrent = a.threads > 1 && !a.deterministic;
        ro.limits = {a.node_limit, a.time_limit};
        cert = solve_rank_one(work, *factors, ro);
    } else if (enumeration_size(work) <= kAutoExactCap) {
        cert = branch_and_cut(work, bnc_options(a.eps, a.gap_tol, a.time_limit, a.node_limit));
    } else {
        err << "warning: instance too large for exact search, using greedy + local search\n";
        cert = timed([&] { return heuristic_certificate(greedy_local_search(work), "local"); });
    }
    if (one_side) {
        sparsify_to_budgets(inst, cert.incumbent);
        cert.value = cert.incumbent.value;
        cert.gap = std::max(0.0, cert.upper_bound - cert.value);
        cert.reduction = to_string(profile.reduction);
    }
    cert.method = "auto/" + cert.method;
    return cert;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err)
{
    CovarianceInstance inst = load_instance(a.instance);
    const auto report = validate(inst);
    if (!report.accepted) {
        err << "invalid instance:\n";
        for (const auto& f : report.failures)
            err << "  " << f << '\n';
        return kInvalidInstance;
    }

    std::optional<RankOneFactors> factors;
    if (a.rank1_approx) {
        RankOneFactors f;
        inst = rank_one_approximation(inst, &f);
        factors = f;
        out << "rank-one approximation: residual " << fmt(f.residual) << " (relative "
            << fmt(f.residual / std::max(1e-300, (f.a * f.b.transpose()).norm() + f.residual)) << ")\n";
    }

    const unsigned threads = a.deterministic ? 1u : std::max(1u, a.threads);
    Certificate cert;
    if (a.method == "greedy") {
        cert = timed([&] { return heuristic_certificate(greedy(inst), "greedy"); });
    } else if (a.method == "local") {
        cert = timed([&] { return heuristic_certificate(greedy_local_search(inst), "local"); });
    } else if (a.method == "brute") {
        BruteForceOptions bo;
        bo.threads = threads;
        try {
            cert = brute_force(inst, bo);
        } catch (const EnumerationTooLarge& e) {
            err << "error: " << e.what() << '\n';
            return kLimit;
        }
    } else if (a.method == "bnc") {
        cert = branch_and_cut(inst, bnc_options(a.eps, a.gap_tol, a.time_limit, a.node_limit));
    } else if (a.method == "rank1") {
        if (!factors)
            factors = rank_one_factors(inst.A);
        if (!factors) {
            err << "error: A is not rank-one within 1e-9 (residual " << fmt(leading_rank_one(inst.A).residual)
                << "); use --rank1-approx\n";
            return kUsage;
        }
        RankOneOptions ro;
        ro.concurrent = threads > 1;
        ro.limits = {a.node_limit, a.time_limit};
        cert = solve_rank_one(inst, *factors, ro);
    } else {
        cert = solve_auto(inst, a, factors, err);
    }
    if (factors && !cert.rank1_residual)
        cert.rank1_residual = factors->residual;

    const auto& sol = cert.incumbent;
    out << "method: " << cert.method << '\n'
        << "status: " << to_string(cert.status) << '\n'
        << "reduction: " << cert.reduction << '\n'
        << "value: " << fmt(cert.value, "%.12g") << '\n'
        << "upper_bound: " << fmt(cert.upper_bound, "%.12g") << '\n'
        << "gap: " << fmt(cert.gap, "%.3g") << '\n'
        << "S1: " << format_support(sol.supports.S1) << '\n'
        << "S2: " << format_support(sol.supports.S2) << '\n'
        << "x: " << fmt_vector(sol.x) << '\n'
        << "y: " << fmt_vector(sol.y) << '\n'
        << "residuals: xBx-1 = " << fmt(sol.xBx - 1, "%.3g") << ", yCy-1 = " << fmt(sol.yCy - 1, "%.3g")
        << ", within_budget = " << (sol.within_budget ? "yes" : "no") << '\n'
        << "nodes: " << cert.nodes_explored << ", evaluations: " << cert.evaluations
        << ", cuts: " << cert.cut_count << '\n';
    if (!a.deterministic)
        out << "time_s: " << fmt(cert.wall_seconds, "%.3f") << '\n';
    if (!a.cert.empty())
        save_certificate(cert, a.cert);

    const bool heuristic = a.method == "greedy" || a.method == "local";
    return heuristic || cert.status == Status::Optimal ? kOk : kLimit;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out)
{
    a.cfg.check();
    const auto scaling = a.sum_covariance ? CovarianceScaling::Sum : CovarianceScaling::Mean;
    const auto inst = generate_instance(a.cfg, scaling, !a.no_population);
    const auto report = validate(inst);
    if (a.output.empty())
        out << instance_to_json(inst) << '\n';
    else
        save_instance(inst, a.output);
    std::ostream& log = a.output.empty() ? std::cerr : out;
    log << "generated " << inst.label << '\n'
        << "validate: " << (report.accepted ? "accepted" : "rejected") << ", psd margin "
        << fmt(report.joint.margin, "%.3g") << '\n';
    for (const auto& f : report.failures)
        log << "  " << f << '\n';
    return report.accepted ? kOk : kInvalidInstance;
}

// Bench ------------------------------------------------------------------

BenchRow bench_one(const CovarianceInstance& inst, const std::string& method, const BenchConfig& cfg)
{
    BenchRow row;
    row.method = method;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (method == "greedy" || method == "local") {
            const auto h = method == "greedy" ? greedy(inst) : greedy_local_search(inst);
            row.lb = h.solution.value;
            row.status = "heuristic";
        } else if (method == "brute") {
            const auto c = brute_force(inst, {});
            row.lb = row.v_star = row.ub = c.value;
            row.status = to_string(c.status);
        } else if (method == "bnc") {
            const auto c = branch_and_cut(inst, bnc_options(cfg.eps, cfg.gap_tol, cfg.time_limit, cfg.node_limit));
            row.lb = c.value;
            row.ub = c.upper_bound;
            if (c.status == Status::Optimal)
                row.v_star = c.value;
            row.status = to_string(c.status);
        } else if (method == "rank1") {
            RankOneOptions ro;
            ro.limits = {cfg.node_limit, cfg.time_limit};
            if (const auto f = rank_one_factors(inst.A)) {
                const auto c = solve_rank_one(inst, *f, ro);
                row.ub = c.upper_bound;
                row.lb = c.value;
                if (c.status == Status::Optimal)
                    row.v_star = c.value;
                row.status = to_string(c.status);
            } else {
                // Supports from the approximated instance, valued on the original.
                RankOneFactors lead;
                const auto approx = rank_one_approximation(inst, &lead);
                const auto c = solve_rank_one(approx, lead, ro);
                row.lb = subset_value(inst, c.incumbent.supports).value;
                row.status = "rank1-approx";
            }
        } else {
            row.status = "unknown-method";
        }
    } catch (const EnumerationTooLarge&) {
        row.status = "too_large";
    } catch (const Error&) {
        row.status = "error";
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::vector<BenchRow> bench_instance(const BenchConfig::Size& size, std::uint64_t seed, const BenchConfig& cfg)
{
    GeneratorConfig g;
    g.n = size.n;
    g.m = size.m;
    g.s1 = size.s1;
    g.s2 = size.s2;
    g.seed = seed;
    g.samples = cfg.samples;
    const auto inst = generate_instance(g, CovarianceScaling::Mean, false);

    std::vector<BenchRow> rows;
    for (const auto& method : cfg.methods) {
        auto row = bench_one(inst, method, cfg);
        row.n = size.n;
        row.m = size.m;
        row.s1 = size.s1;
        row.s2 = size.s2;
        row.seed = seed;
        rows.push_back(std::move(row));
    }
    double best_lb = -1;
    for (const auto& r : rows)
        if (r.lb)
            best_lb = std::max(best_lb, *r.lb);
    for (auto& r : rows)
        if (r.ub && best_lb >= 0)
            r.gap_pct = 100.0 * (*r.ub - best_lb) / std::max(best_lb, 1e-12);
    return rows;
}

std::string cell(const std::optional<double>& v)
{
    return v ? fmt(*v, "%.6f") : "-";
}

std::vector<std::string> cells(const BenchRow& r, bool deterministic)
{
    return {std::to_string(r.n),
            std::to_string(r.m),
            std::to_string(r.s1),
            std::to_string(r.s2),
            r.method,
            cell(r.lb),
            cell(r.v_star),
            cell(r.ub),
            r.gap_pct ? fmt(*r.gap_pct, "%.2f") : "-",
            deterministic ? "-" : fmt(r.wall_seconds, "%.3f"),
            r.status,
            std::to_string(r.seed)};
}

const std::vector<std::string> kBenchHeader = {"n",  "m",      "s1",     "s2",     "method", "lb",
                                               "v_star", "ub", "gap_pct", "time_s", "status", "seed"};

struct BenchArgs {
    std::vector<std::string> sizes;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> methods;
    std::string output;
    bool markdown{false};
};

BenchConfig::Size parse_size(const std::string& text)
{
    BenchConfig::Size s{};
    char tail = 0;
    long long v[4];
    if (std::sscanf(text.c_str(), "%lld,%lld,%lld,%lld%c", &v[0], &v[1], &v[2], &v[3], &tail) != 4)
        throw InvalidConfig("bad --size \"" + text + "\", expected n,m,s1,s2");
    s = {Index(v[0]), Index(v[1]), Index(v[2]), Index(v[3])};
    GeneratorConfig{s.n, s.m, s.s1, s.s2, 0, 1}.check();
    return s;
}

int cmd_bench(BenchConfig cfg, const BenchArgs& a, std::ostream& out, std::ostream& err)
{
    for (const auto& s : a.sizes)
        cfg.sizes.push_back(parse_size(s));
    if (cfg.sizes.empty())
        cfg.sizes.push_back({10, 10, 5, 5});
    cfg.seeds = a.seeds.empty() ? std::vector<std::uint64_t>{1} : a.seeds;
    cfg.methods = a.methods.empty() ? std::vector<std::string>{"greedy", "local", "brute", "bnc"} : a.methods;
    for (const auto& m : cfg.methods)
        if (m != "greedy" && m != "local" && m != "brute" && m != "bnc" && m != "rank1")
            throw InvalidConfig("unknown bench method \"" + m + "\"");
    if (cfg.samples < 1)
        throw InvalidConfig("--samples must be positive");

    const auto rows = run_bench(cfg);
    const std::string csv = bench_csv(rows, cfg.deterministic);
    if (!a.output.empty()) {
        std::ofstream f(a.output);
        if (!f)
            throw Error("cannot write " + a.output);
        f << csv;
    }
    if (a.markdown)
        out << bench_markdown(rows, cfg.deterministic);
    else if (a.output.empty())
        out << csv;

    const auto problems = check_rows(rows);
    for (const auto& p : problems)
        err << "bench invariant violated: " << p << '\n';
    return problems.empty() ? kOk : kLimit;
}

} // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg)
{
    struct Job {
        BenchConfig::Size size;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& s : cfg.sizes)
        for (auto seed : cfg.seeds)
            jobs.push_back({s, seed});

    std::vector<std::vector<BenchRow>> results(jobs.size());
    const unsigned threads = cfg.deterministic ? 1u : std::max(1u, std::min<unsigned>(cfg.threads, unsigned(jobs.size())));
    if (threads <= 1) {
        for (std::size_t k = 0; k < jobs.size(); ++k)
            results[k] = bench_instance(jobs[k].size, jobs[k].seed, cfg);
    } else {
        std::size_t next = 0;
        std::mutex mu;
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                while (true) {
                    std::size_t k;
                    {
                        std::lock_guard lock(mu);
                        if (next >= jobs.size())
                            return;
                        k = next++;
                    }
                    results[k] = bench_instance(jobs[k].size, jobs[k].seed, cfg);
                }
            });
        for (auto& th : pool)
            th.join();
    }

    std::vector<BenchRow> rows;
    for (auto& r : results)
        for (auto& row : r)
            rows.push_back(std::move(row));
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows, bool deterministic)
{
    std::string s;
    auto line = [&](const std::vector<std::string>& c) {
        for (std::size_t i = 0; i < c.size(); ++i)
            s += (i ? "," : "") + c[i];
        s += '\n';
    };
    line(kBenchHeader);
    for (const auto& r : rows)
        line(cells(r, deterministic));
    return s;
}

std::string bench_markdown(const std::vector<BenchRow>& rows, bool deterministic)
{
    std::string s;
    auto line = [&](const std::vector<std::string>& c) {
        s += "|";
        for (const auto& x : c)
            s += " " + x + " |";
        s += '\n';
    };
    line(kBenchHeader);
    s += "|";
    for (std::size_t i = 0; i < kBenchHeader.size(); ++i)
        s += "---|";
    s += '\n';
    for (const auto& r : rows)
        line(cells(r, deterministic));
    return s;
}

std::vector<std::string> check_rows(const std::vector<BenchRow>& rows)
{
    constexpr double tol = 1e-8;
    std::vector<std::string> out;
    auto where = [](const BenchRow& r) {
        return "(" + std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.s1) + "," +
               std::to_string(r.s2) + ") seed " + std::to_string(r.seed) + " " + r.method;
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.lb && r.v_star && *r.lb > *r.v_star + tol)
            out.push_back(where(r) + ": lb > v*");
        if (r.v_star && r.ub && *r.v_star > *r.ub + tol)
            out.push_back(where(r) + ": v* > ub");
        if (r.lb && r.ub && *r.lb > *r.ub + tol)
            out.push_back(where(r) + ": lb > ub");
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const auto& q = rows[j];
            if (i == j || q.n != r.n || q.m != r.m || q.s1 != r.s1 || q.s2 != r.s2 || q.seed != r.seed)
                continue;
            if (r.lb && q.v_star && *r.lb > *q.v_star + tol)
                out.push_back(where(r) + ": lb exceeds v* of " + q.method);
            if (r.lb && q.ub && *r.lb > *q.ub + tol)
                out.push_back(where(r) + ": lb exceeds ub of " + q.method);
        }
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    argv.push_back("scca");
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(int(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Sparse canonical correlation analysis: instance generation, solvers and benchmarks", "scca"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Sample a planted synthetic instance");
    g->add_option("--n", gen.cfg.n, "Rows of x")->required()->check(CLI::PositiveNumber);
    g->add_option("--m", gen.cfg.m, "Rows of y")->required()->check(CLI::PositiveNumber);
    g->add_option("--s1", gen.cfg.s1, "Budget on x")->required()->check(CLI::PositiveNumber);
    g->add_option("--s2", gen.cfg.s2, "Budget on y")->required()->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.cfg.seed, "Random seed");
    g->add_option("--samples", gen.cfg.samples, "Number of samples N")->check(CLI::PositiveNumber);
    g->add_option("-o,--output", gen.output, "Instance file (stdout if omitted)");
    g->add_flag("--sum-covariance", gen.sum_covariance, "Raw sums instead of sample means");
    g->add_flag("--no-population", gen.no_population, "Do not embed the planted population");

    SolveArgs sol;
    auto* s = app.add_subcommand("solve", "Solve an instance file");
    s->add_option("--instance", sol.instance, "Instance JSON")->required();
    s->add_option("--method", sol.method, "Solver")
        ->check(CLI::IsMember({"greedy", "local", "brute", "bnc", "rank1", "auto"}));
    s->add_option("--eps", sol.eps, "Cut regularization")->check(CLI::PositiveNumber);
    s->add_option("--gap-tol", sol.gap_tol, "Absolute optimality gap")->check(CLI::NonNegativeNumber);
    s->add_option("--time-limit", sol.time_limit, "Seconds, 0 for none")->check(CLI::NonNegativeNumber);
    s->add_option("--node-limit", sol.node_limit, "Nodes, 0 for none");
    s->add_option("--seed", sol.seed, "Recorded only; all solvers are deterministic");
    s->add_option("--cert", sol.cert, "Write the certificate JSON here");
    s->add_flag("--rank1-approx", sol.rank1_approx, "Replace A by its leading rank-one part");
    s->add_option("--threads", sol.threads, "Worker threads")->check(CLI::PositiveNumber);
    s->add_flag("--deterministic", sol.deterministic, "Single thread, no timings in the output");

    BenchConfig bcfg;
    BenchArgs bargs;
    auto* b = app.add_subcommand("bench", "Benchmark methods on a grid of planted instances");
    b->add_option("--size", bargs.sizes, "Grid point n,m,s1,s2 (repeatable)");
    b->add_option("--seed,--seeds", bargs.seeds, "Seeds (comma separated)")->delimiter(',');
    b->add_option("--methods", bargs.methods, "greedy,local,brute,bnc,rank1")->delimiter(',');
    b->add_option("--samples", bcfg.samples, "Number of samples N")->check(CLI::PositiveNumber);
    b->add_option("--eps", bcfg.eps, "Cut regularization")->check(CLI::PositiveNumber);
    b->add_option("--gap-tol", bcfg.gap_tol, "Absolute optimality gap")->check(CLI::NonNegativeNumber);
    b->add_option("--time-limit", bcfg.time_limit, "Seconds per bnc or rank1 run")->check(CLI::NonNegativeNumber);
    b->add_option("--node-limit", bcfg.node_limit, "Nodes per bnc or rank1 run");
    b->add_option("--threads", bcfg.threads, "Instances run in parallel")->check(CLI::PositiveNumber);
    b->add_flag("--deterministic", bcfg.deterministic, "Single thread, time_s printed as -");
    b->add_flag("--markdown", bargs.markdown, "Print a markdown table");
    b->add_option("-o,--output", bargs.output, "CSV file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (g->parsed())
            return cmd_generate(gen, out);
        if (s->parsed())
            return cmd_solve(sol, out, err);
        return cmd_bench(bcfg, bargs, out, err);
    } catch (const InvalidConfig& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        err << "invalid instance: " << e.what() << '\n';
        return kInvalidInstance;
    } catch (const InvalidMatrix& e) {
        err << "invalid instance: " << e.what() << '\n';
        return kInvalidInstance;
    } catch (const NotACovariance& e) {
        err << "invalid instance: " << e.what() << '\n';
        return kInvalidInstance;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kLimit;
    }
}

} // namespace scca::cli
