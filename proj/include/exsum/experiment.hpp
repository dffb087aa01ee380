#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exsum/datagen.hpp"
#include "exsum/kernels.hpp"
#include "exsum/strategies.hpp"

namespace exsum {

enum class Kernel { sum, simpson, lu, jacobi, power, matmul };

constexpr std::string_view kernel_name(Kernel k) {
    switch (k) {
        case Kernel::sum: return "sum";
        case Kernel::simpson: return "simpson";
        case Kernel::lu: return "lu";
        case Kernel::jacobi: return "jacobi";
        case Kernel::power: return "power";
        case Kernel::matmul: return "matmul";
    }
    return "?";
}

// One row of experiment output.  `param` is the swept quantity -- n for
// sum/lu/matmul, b for simpson, eps for jacobi, d for power.  Fields that a
// kernel does not produce stay absent and serialize as empty CSV cells.
struct ExperimentRecord {
    std::string kernel;
    std::string strategy;
    std::string fmt;
    int P = 1;
    double param = 0.0;
    std::uint64_t seed = 0;
    double abs_error = 0.0;
    std::optional<long> iterations;
    std::optional<double> repro_pct;
    long long wall_ns = 0;
    std::string error_flag;  // empty on success
};

struct SweepConfig {
    Kernel kernel = Kernel::sum;
    std::string fmt = "b32";
    std::vector<Strategy> strategies;
    std::vector<int> procs{1};
    std::vector<std::uint64_t> seeds{1};
    std::vector<double> params;

    // kernel-specific knobs
    long m = 1'000'000;                    // simpson: subintervals
    double capital_c = 1e6;                // simpson: integrand scale C
    Integrand integrand = Integrand::cosine;
    long n = 100;                          // jacobi/power: system dimension
    double eps = 1e-6;                     // power: stopping tolerance
    long max_iter = 50'000;                // jacobi/power
    double delta = 1e-3;                   // jacobi: closeness to instability
    bool diag_boost = true;                // lu: pivot-safety boost
    MagnitudeProfile profile{};            // sum/lu/matmul data profile

    std::string csv_path;                  // empty: records only, no file
};

// Runs the full cartesian product strategies x procs x params x seeds.
// Kernel failures are recorded per row in error_flag and do not abort the
// sweep.  Jacobi and power sweeps that include naive plus at least one other
// strategy additionally emit derived "<kernel>_gap" rows carrying the
// iteration gap of each accurate strategy against naive.
std::vector<ExperimentRecord> run_experiment(const SweepConfig& config);

// Fixed column set, one header row; abs_error is also serialized as a C99
// hex float in the trailing column so parsing is bit-exact.  The write is
// atomic: a temp file in the same directory, renamed into place.
void write_csv(const std::string& path, const std::vector<ExperimentRecord>& records);

std::vector<ExperimentRecord> read_csv(const std::string& path);

// The serialization used by write_csv, exposed so other sinks (stdout
// previews, logs) emit the identical format.
std::string csv_header_line();
std::string csv_line(const ExperimentRecord& record);

}  // namespace exsum
