#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "exsum/experiment.hpp"

namespace {

struct CommonArgs {
    std::vector<std::string> strategies{"naive", "bucketed"};
    std::vector<int> procs{1};
    std::string fmt = "b32";
    std::vector<std::uint64_t> seeds{1};
    std::string csv;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--strategy", args.strategies,
                    "summation strategy: naive|bucketed|sorted|compensated|exact (repeatable)")
        ->capture_default_str();
    sub->add_option("--procs", args.procs, "rank count P (repeatable)")->capture_default_str();
    sub->add_option("--fmt", args.fmt, "working precision: b32|b64")->capture_default_str();
    sub->add_option("--seed", args.seeds, "dataset seed (repeatable)")->capture_default_str();
    sub->add_option("--csv", args.csv, "write records to this CSV path (atomic)");
}

exsum::SweepConfig to_config(const CommonArgs& args) {
    exsum::SweepConfig config;
    config.strategies.clear();
    for (const auto& name : args.strategies)
        config.strategies.push_back(exsum::parse_strategy(name));
    config.procs = args.procs;
    config.fmt = args.fmt;
    config.seeds = args.seeds;
    config.csv_path = args.csv;
    return config;
}

void print_records(const std::vector<exsum::ExperimentRecord>& records,
                   const std::string& csv_path) {
    if (!csv_path.empty()) {
        std::printf("wrote %zu records to %s\n", records.size(), csv_path.c_str());
        return;
    }
    std::printf("%s\n", exsum::csv_header_line().c_str());
    for (const auto& r : records) std::printf("%s\n", exsum::csv_line(r).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"accurate-summation experiment harness"};
    app.require_subcommand(1);

    CommonArgs common;
    exsum::SweepConfig config;

    // sum
    auto* sum = app.add_subcommand("sum", "parallel summation accuracy/timing");
    std::vector<long> sum_n{100000};
    double sum_frac = 0.3;
    add_common(sum, common);
    sum->add_option("--n", sum_n, "vector length (repeatable)")->capture_default_str();
    sum->add_option("--frac-large", sum_frac, "share of large-magnitude entries")
        ->capture_default_str();

    // simpson
    auto* simpson = app.add_subcommand("simpson", "composite Simpson quadrature accuracy");
    std::vector<double> simpson_b{2.0, 3.0, 4.0, 5.0};
    long simpson_m = 1'000'000;
    double simpson_c = 1e6;
    std::string simpson_fn = "cos";
    add_common(simpson, common);
    simpson->add_option("--b", simpson_b, "upper integration bound (repeatable)")
        ->capture_default_str();
    simpson->add_option("--m", simpson_m, "subinterval count (even)")->capture_default_str();
    simpson->add_option("--capital-c", simpson_c, "integrand scale C")->capture_default_str();
    simpson->add_option("--fn", simpson_fn, "integrand: cos|invquad|tanh")->capture_default_str();

    // lu
    auto* lu = app.add_subcommand("lu", "LU factorization accuracy");
    std::vector<long> lu_n{200};
    bool lu_boost = true;
    double lu_frac = 0.3;
    add_common(lu, common);
    lu->add_option("--n", lu_n, "matrix dimension (repeatable)")->capture_default_str();
    lu->add_option("--diag-boost", lu_boost, "add max row-magnitude sum to diagonals")
        ->capture_default_str();
    lu->add_option("--frac-large", lu_frac, "share of large-magnitude entries")
        ->capture_default_str();

    // jacobi
    auto* jacobi = app.add_subcommand("jacobi", "Jacobi iteration convergence");
    std::vector<double> jacobi_eps{1e-2, 1e-3, 1e-4, 1e-5};
    long jacobi_n = 100;
    long jacobi_max_iter = 50'000;
    double jacobi_delta = 1e-3;
    add_common(jacobi, common);
    jacobi->add_option("--eps", jacobi_eps, "stopping tolerance (repeatable)")
        ->capture_default_str();
    jacobi->add_option("--n", jacobi_n, "system dimension")->capture_default_str();
    jacobi->add_option("--max-iter", jacobi_max_iter, "iteration cap")->capture_default_str();
    jacobi->add_option("--delta", jacobi_delta, "closeness to instability")
        ->capture_default_str();

    // power
    auto* power = app.add_subcommand("power", "power-method convergence");
    double d_from = 300.0, d_to = 500.0, d_step = 20.0;
    long power_n = 100;
    double power_eps = 1e-6;
    long power_max_iter = 50'000;
    add_common(power, common);
    power->add_option("--d-from", d_from, "diagonal sweep start")->capture_default_str();
    power->add_option("--d-to", d_to, "diagonal sweep end (inclusive)")->capture_default_str();
    power->add_option("--d-step", d_step, "diagonal sweep step")->capture_default_str();
    power->add_option("--n", power_n, "matrix dimension")->capture_default_str();
    power->add_option("--eps", power_eps, "stopping tolerance")->capture_default_str();
    power->add_option("--max-iter", power_max_iter, "iteration cap")->capture_default_str();

    // matmul
    auto* matmul = app.add_subcommand("matmul", "matrix-product reproducibility");
    std::vector<long> matmul_n{200};
    bool matmul_boost = false;
    double matmul_frac = 0.5;
    add_common(matmul, common);
    matmul->add_option("--n", matmul_n, "matrix dimension (repeatable)")->capture_default_str();
    matmul->add_option("--diag-boost", matmul_boost, "add max row-magnitude sum to diagonals")
        ->capture_default_str();
    matmul->add_option("--frac-large", matmul_frac, "share of large-magnitude entries")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // parse failure means invalid configuration
    }

    try {
        config = to_config(common);
        if (sum->parsed()) {
            config.kernel = exsum::Kernel::sum;
            config.profile.frac_large = sum_frac;
            for (long n : sum_n) config.params.push_back(static_cast<double>(n));
        } else if (simpson->parsed()) {
            config.kernel = exsum::Kernel::simpson;
            config.params = simpson_b;
            config.m = simpson_m;
            config.capital_c = simpson_c;
            config.integrand = exsum::parse_integrand(simpson_fn);
        } else if (lu->parsed()) {
            config.kernel = exsum::Kernel::lu;
            config.profile.frac_large = lu_frac;
            config.diag_boost = lu_boost;
            for (long n : lu_n) config.params.push_back(static_cast<double>(n));
        } else if (jacobi->parsed()) {
            config.kernel = exsum::Kernel::jacobi;
            config.params = jacobi_eps;
            config.n = jacobi_n;
            config.max_iter = jacobi_max_iter;
            config.delta = jacobi_delta;
        } else if (power->parsed()) {
            config.kernel = exsum::Kernel::power;
            if (d_step <= 0) throw exsum::InvalidConfig("--d-step must be positive");
            for (double d = d_from; d <= d_to + 1e-9; d += d_step) config.params.push_back(d);
            config.n = power_n;
            config.eps = power_eps;
            config.max_iter = power_max_iter;
        } else if (matmul->parsed()) {
            config.kernel = exsum::Kernel::matmul;
            config.profile.frac_large = matmul_frac;
            config.diag_boost = matmul_boost;
            for (long n : matmul_n) config.params.push_back(static_cast<double>(n));
        }

        const auto records = exsum::run_experiment(config);
        print_records(records, config.csv_path);
        return 0;
    } catch (const exsum::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
