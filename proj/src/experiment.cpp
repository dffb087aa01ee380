#include "exsum/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "exsum/metrics.hpp"
#include "exsum/parallel.hpp"

namespace exsum {

namespace {

// Median wall time of 5 identical runs (kernels are deterministic, so
// re-running only costs time, never changes the recorded value).
template <class F>
long long median_wall(F&& run) {
    std::array<long long, 5> walls{};
    for (auto& ns : walls) {
        const auto t0 = std::chrono::steady_clock::now();
        run();
        ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                 std::chrono::steady_clock::now() - t0)
                 .count();
    }
    std::sort(walls.begin(), walls.end());
    return walls[2];
}

std::string flag_for(const std::exception& e) {
    if (dynamic_cast<const NonFiniteInput*>(&e)) return "NonFiniteInput";
    if (dynamic_cast<const ShapeMismatch*>(&e)) return "ShapeMismatch";
    if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
    if (dynamic_cast<const NotDiagonallyDominant*>(&e)) return "NotDiagonallyDominant";
    if (dynamic_cast<const ZeroPivot*>(&e)) return "ZeroPivot";
    if (dynamic_cast<const ZeroNormalizer*>(&e)) return "ZeroNormalizer";
    if (dynamic_cast<const NotConverged*>(&e)) return "NotConverged";
    if (dynamic_cast<const OddSubintervalCount*>(&e)) return "OddSubintervalCount";
    if (dynamic_cast<const IoError*>(&e)) return "IoError";
    if (dynamic_cast<const InvalidConfig*>(&e)) return "InvalidConfig";
    std::string what = e.what();
    std::replace(what.begin(), what.end(), ',', ';');
    return what;
}

ExperimentRecord base_record(const SweepConfig& c, std::string kernel, Strategy s,
                             int P, double param, std::uint64_t seed) {
    ExperimentRecord rec;
    rec.kernel = std::move(kernel);
    rec.strategy = std::string(strategy_name(s));
    rec.fmt = c.fmt;
    rec.P = P;
    rec.param = param;
    rec.seed = seed;
    return rec;
}

template <IeeeFloat T>
double exact_reference(std::span<const T> xs) {
    ExactAccumulator<T> acc;
    acc.add(xs);
    return acc.template round_to<double>();
}

// Oracle right-hand side: each b_i is the exact dot product of row i with
// x, rounded once to working precision.
template <IeeeFloat T>
Vec<T> oracle_rhs(const Mat<T>& A, const Vec<T>& x) {
    Vec<T> b(A.rows());
    ExactAccumulator<double> acc;
    for (long i = 0; i < A.rows(); ++i) {
        acc.clear();
        for (long j = 0; j < A.cols(); ++j)
            acc.add(static_cast<double>(A(i, j)) * static_cast<double>(x(j)));
        b(i) = acc.template round_to<T>();
    }
    return b;
}

// Per-element exact products, rounded once to binary64 each: the accuracy
// reference for matmul runs.
template <IeeeFloat T>
Mat<double> oracle_product(const Mat<T>& A, const Mat<T>& B) {
    Mat<double> C(A.rows(), B.cols());
    ExactAccumulator<double> acc;
    for (long i = 0; i < A.rows(); ++i)
        for (long j = 0; j < B.cols(); ++j) {
            acc.clear();
            for (long k = 0; k < A.cols(); ++k)
                acc.add(static_cast<double>(A(i, k)) * static_cast<double>(B(k, j)));
            C(i, j) = acc.template round_to<double>();
        }
    return C;
}

template <IeeeFloat T>
void run_sum(const SweepConfig& c, std::vector<ExperimentRecord>& out) {
    for (double param : c.params) {
        const long n = static_cast<long>(param);
        for (std::uint64_t seed : c.seeds) {
            const Vec<T> data = gen_vector<T>(n, c.profile, seed);
            const auto xs = as_span(data);
            const double ref = exact_reference(xs);
            for (Strategy s : c.strategies)
                for (int P : c.procs) {
                    auto rec = base_record(c, "sum", s, P, param, seed);
                    try {
                        T value{};
                        rec.wall_ns = median_wall([&] { value = parallel_sum(xs, P, s); });
                        rec.abs_error = abs_error(static_cast<double>(value), ref);
                    } catch (const std::exception& e) {
                        rec.error_flag = flag_for(e);
                    }
                    out.push_back(std::move(rec));
                }
        }
    }
}

template <IeeeFloat T>
void run_simpson(const SweepConfig& c, std::vector<ExperimentRecord>& out) {
    const std::string kernel = "simpson_" + std::string(integrand_name(c.integrand));
    for (double b : c.params) {
        const double ref = integrand_reference(c.integrand, b, c.capital_c);
        for (std::uint64_t seed : c.seeds)  // samples are seed-independent; part of the sweep contract
            for (Strategy s : c.strategies)
                for (int P : c.procs) {
                    auto rec = base_record(c, kernel, s, P, b, seed);
                    try {
                        T value{};
                        rec.wall_ns = median_wall([&] {
                            value = simpson_integrate<T>(c.integrand, b, c.m, c.capital_c, s, P);
                        });
                        rec.abs_error = abs_error(static_cast<double>(value), ref);
                    } catch (const std::exception& e) {
                        rec.error_flag = flag_for(e);
                    }
                    out.push_back(std::move(rec));
                }
    }
}

template <IeeeFloat T>
void run_lu(const SweepConfig& c, std::vector<ExperimentRecord>& out) {
    for (double param : c.params) {
        const long n = static_cast<long>(param);
        for (std::uint64_t seed : c.seeds) {
            const Mat<T> A = gen_matrix<T>(n, c.profile, seed, c.diag_boost);
            const Vec<T> x_true = gen_vector<T>(n, c.profile, seed + 7777);
            const Vec<T> b = oracle_rhs(A, x_true);
            const Vec<double> b64 = b.template cast<double>();
            for (Strategy s : c.strategies)
                for (int P : c.procs) {
                    auto rec = base_record(c, "lu", s, P, param, seed);
                    try {
                        double resid = 0.0;
                        rec.wall_ns = median_wall([&] {
                            auto [L, U] = lu_factorize(A, s, P);
                            const Vec<T> x = lu_solve(L, U, b, s);
                            const Vec<double> lux =
                                L.template cast<double>() *
                                (U.template cast<double>() * x.template cast<double>());
                            resid = (lux - b64).cwiseAbs().maxCoeff();
                        });
                        rec.abs_error = resid;
                    } catch (const std::exception& e) {
                        rec.error_flag = flag_for(e);
                    }
                    out.push_back(std::move(rec));
                }
        }
    }
}

// Shared by jacobi and power sweeps: emit one derived gap row per accurate
// strategy once the naive outcome for the same cell is known.
template <IeeeFloat T>
void emit_gap_rows(const SweepConfig& c, const std::string& kernel, int P, double param,
                   std::uint64_t seed,
                   const std::vector<std::pair<Strategy, IterationOutcome<T>>>& outcomes,
                   std::vector<ExperimentRecord>& out) {
    const auto naive_it =
        std::find_if(outcomes.begin(), outcomes.end(),
                     [](const auto& p) { return p.first == Strategy::naive; });
    if (naive_it == outcomes.end()) return;
    for (const auto& [s, outcome] : outcomes) {
        if (s == Strategy::naive) continue;
        auto rec = base_record(c, kernel + "_gap", s, P, param, seed);
        try {
            rec.iterations = iteration_gap(naive_it->second, outcome);
        } catch (const std::exception& e) {
            rec.error_flag = flag_for(e);
        }
        out.push_back(std::move(rec));
    }
}

template <IeeeFloat T>
void run_jacobi(const SweepConfig& c, std::vector<ExperimentRecord>& out) {
    for (double eps : c.params)
        for (std::uint64_t seed : c.seeds) {
            const JacobiSystem<T> sys = gen_jacobi_system<T>(c.n, c.delta, seed);
            for (int P : c.procs) {
                std::vector<std::pair<Strategy, IterationOutcome<T>>> outcomes;
                for (Strategy s : c.strategies) {
                    auto rec = base_record(c, "jacobi", s, P, eps, seed);
                    try {
                        IterationOutcome<T> outcome;
                        rec.wall_ns = median_wall([&] {
                            outcome = jacobi_solve(sys.A, sys.b, eps, c.max_iter, s, P);
                        });
                        rec.iterations = outcome.iterations;
                        rec.abs_error = outcome.final_residual;
                        if (!outcome.converged) rec.error_flag = "MaxIterationsReached";
                        outcomes.emplace_back(s, std::move(outcome));
                    } catch (const std::exception& e) {
                        rec.error_flag = flag_for(e);
                    }
                    out.push_back(std::move(rec));
                }
                emit_gap_rows(c, "jacobi", P, eps, seed, outcomes, out);
            }
        }
}

template <IeeeFloat T>
void run_power(const SweepConfig& c, std::vector<ExperimentRecord>& out) {
    for (double d : c.params) {
        const Mat<T> A = gen_power_matrix<T>(c.n, d);
        const double analytic = d - 0.01 + 0.01 * static_cast<double>(c.n);
        for (std::uint64_t seed : c.seeds)
            for (int P : c.procs) {
                std::vector<std::pair<Strategy, IterationOutcome<T>>> outcomes;
                for (Strategy s : c.strategies) {
                    auto rec = base_record(c, "power", s, P, d, seed);
                    try {
                        PowerOutcome<T> result;
                        rec.wall_ns = median_wall(
                            [&] { result = power_method(A, c.eps, c.max_iter, s, P); });
                        rec.iterations = result.outcome.iterations;
                        rec.abs_error =
                            abs_error(static_cast<double>(result.eigenvalue), analytic);
                        if (!result.outcome.converged) rec.error_flag = "MaxIterationsReached";
                        outcomes.emplace_back(s, std::move(result.outcome));
                    } catch (const std::exception& e) {
                        rec.error_flag = flag_for(e);
                    }
                    out.push_back(std::move(rec));
                }
                emit_gap_rows(c, "power", P, d, seed, outcomes, out);
            }
    }
}

template <IeeeFloat T>
void run_matmul(const SweepConfig& c, std::vector<ExperimentRecord>& out) {
    for (double param : c.params) {
        const long n = static_cast<long>(param);
        for (std::uint64_t seed : c.seeds) {
            const Mat<T> A = gen_matrix<T>(n, c.profile, seed, c.diag_boost);
            const Mat<T> B = gen_matrix<T>(n, c.profile, seed + 1000003, c.diag_boost);
            const Mat<double> ref = oracle_product(A, B);
            for (Strategy s : c.strategies) {
                Mat<T> base;
                bool have_base = false;
                for (int P : c.procs) {
                    auto rec = base_record(c, "matmul", s, P, param, seed);
                    try {
                        if (!have_base) {  // single-rank run anchors repro_pct
                            base = matmul(A, B, s, 1);
                            have_base = true;
                        }
                        Mat<T> C;
                        rec.wall_ns = median_wall([&] { C = matmul(A, B, s, P); });
                        rec.repro_pct = repro_pct(C, base);
                        double worst = 0.0;
                        for (long i = 0; i < C.rows(); ++i)
                            for (long j = 0; j < C.cols(); ++j)
                                worst = std::max(
                                    worst, std::abs(static_cast<double>(C(i, j)) - ref(i, j)));
                        rec.abs_error = worst;
                    } catch (const std::exception& e) {
                        rec.error_flag = flag_for(e);
                    }
                    out.push_back(std::move(rec));
                }
            }
        }
    }
}

template <IeeeFloat T>
std::vector<ExperimentRecord> run_typed(const SweepConfig& c) {
    std::vector<ExperimentRecord> out;
    switch (c.kernel) {
        case Kernel::sum: run_sum<T>(c, out); break;
        case Kernel::simpson: run_simpson<T>(c, out); break;
        case Kernel::lu: run_lu<T>(c, out); break;
        case Kernel::jacobi: run_jacobi<T>(c, out); break;
        case Kernel::power: run_power<T>(c, out); break;
        case Kernel::matmul: run_matmul<T>(c, out); break;
    }
    return out;
}

constexpr const char* csv_header =
    "kernel,strategy,fmt,P,param,seed,abs_error,iterations,repro_pct,wall_ns,"
    "error_flag,abs_error_hex";

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

std::string to_line(const ExperimentRecord& r) {
    std::string line;
    line += r.kernel;
    line += ',';
    line += r.strategy;
    line += ',';
    line += r.fmt;
    line += ',';
    line += std::to_string(r.P);
    line += ',';
    line += fmt_g17(r.param);
    line += ',';
    line += std::to_string(r.seed);
    line += ',';
    line += fmt_g17(r.abs_error);
    line += ',';
    if (r.iterations) line += std::to_string(*r.iterations);
    line += ',';
    if (r.repro_pct) line += fmt_g17(*r.repro_pct);
    line += ',';
    line += std::to_string(r.wall_ns);
    line += ',';
    line += r.error_flag;
    line += ',';
    line += fmt_hex(r.abs_error);
    return line;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const SweepConfig& config) {
    if (config.strategies.empty()) throw InvalidConfig("no strategies requested");
    if (config.procs.empty()) throw InvalidConfig("no rank counts requested");
    if (config.params.empty()) throw InvalidConfig("no parameter values requested");
    if (config.seeds.empty()) throw InvalidConfig("no seeds requested");
    for (int P : config.procs)
        if (P < 1) throw InvalidConfig("rank count must be >= 1");
    if (config.fmt != "b32" && config.fmt != "b64")
        throw InvalidConfig("fmt must be b32 or b64");
    if (config.n < 1 &&
        (config.kernel == Kernel::jacobi || config.kernel == Kernel::power))
        throw InvalidConfig("system dimension must be >= 1");

    auto records = config.fmt == "b32" ? run_typed<float>(config) : run_typed<double>(config);
    if (!config.csv_path.empty()) write_csv(config.csv_path, records);
    return records;
}

std::string csv_header_line() { return csv_header; }

std::string csv_line(const ExperimentRecord& record) { return to_line(record); }

void write_csv(const std::string& path, const std::vector<ExperimentRecord>& records) {
    if (path.empty()) throw IoError("empty CSV path");
    const std::filesystem::path target(path);
    std::filesystem::path tmp(target);
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << csv_header << '\n';
        for (const auto& rec : records) out << to_line(rec) << '\n';
        out.flush();
        if (!out) throw IoError("short write: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::vector<ExperimentRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != csv_header)
        throw IoError("unrecognized CSV header in " + path);

    std::vector<ExperimentRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != 12) throw IoError("malformed CSV row in " + path);
        ExperimentRecord r;
        r.kernel = cells[0];
        r.strategy = cells[1];
        r.fmt = cells[2];
        r.P = std::stoi(cells[3]);
        r.param = std::strtod(cells[4].c_str(), nullptr);
        r.seed = std::stoull(cells[5]);
        // the hex column is authoritative for abs_error: it parses bit-exactly
        r.abs_error = std::strtod(cells[11].c_str(), nullptr);
        if (!cells[7].empty()) r.iterations = std::stol(cells[7]);
        if (!cells[8].empty()) r.repro_pct = std::strtod(cells[8].c_str(), nullptr);
        r.wall_ns = std::stoll(cells[9]);
        r.error_flag = cells[10];
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace exsum
