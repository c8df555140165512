#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scca/exact.hpp"

namespace scca::cli {

enum ExitCode : int {
    kOk = 0,
    kLimit = 1,
    kUsage = 2,
    kInvalidInstance = 3,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchRow {
    Index n{0}, m{0}, s1{0}, s2{0};
    std::string method;
    std::optional<double> lb, v_star, ub, gap_pct;
    double wall_seconds{0};
    std::string status;
    std::uint64_t seed{0};
};

struct BenchConfig {
    struct Size {
        Index n, m, s1, s2;
    };
    std::vector<Size> sizes;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> methods;
    Index samples{5000};
    double time_limit{0};
    std::size_t node_limit{0};
    double eps{1e-6};
    double gap_tol{1e-6};
    unsigned threads{1};
    bool deterministic{false};
};

/// Rows in grid order: sizes, then seeds, then methods.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

std::string bench_csv(const std::vector<BenchRow>& rows, bool deterministic);
std::string bench_markdown(const std::vector<BenchRow>& rows, bool deterministic);

/// Violations of lb <= v* <= ub within a row and of lb <= v* across the rows
/// of one instance.
std::vector<std::string> check_rows(const std::vector<BenchRow>& rows);

} // namespace scca::cli
