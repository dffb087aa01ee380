#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "exsum/experiment.hpp"
#include "exsum/metrics.hpp"

using namespace exsum;

namespace {
struct SingleThreadGuard {
    SingleThreadGuard() { setenv("EXSUM_THREADS", "1", 1); }
    ~SingleThreadGuard() { unsetenv("EXSUM_THREADS"); }
};
}  // namespace

TEST_CASE("absolute error metric") {
    CHECK(abs_error(1.5, 1.0) == 0.5);
    CHECK(abs_error(1.0, 1.5) == 0.5);
    CHECK(abs_error(-3.0, -3.0) == 0.0);

    Vec<float> a(3), b(3);
    a << 1.0f, 2.0f, 3.0f;
    b << 1.0f, 2.5f, 2.0f;
    CHECK(abs_error(a, b) == 1.0);
    Vec<float> short_vec(2);
    CHECK_THROWS_AS(abs_error(a, short_vec), ShapeMismatch);

    Vec<double> bd(3);
    bd << 1.0, 2.0, 3.0;
    CHECK(abs_error(a, bd) == 0.0);  // mixed precision compares in binary64
}

TEST_CASE("reproducibility percentage is a bitwise match count") {
    std::vector<float> a{1.0f, 2.0f, 3.0f, 4.0f};
    std::vector<float> b = a;
    CHECK(repro_pct(std::span<const float>(a), std::span<const float>(b)) == 100.0);
    b[1] = std::nextafterf(b[1], 10.0f);  // one last-bit difference
    CHECK(repro_pct(std::span<const float>(a), std::span<const float>(b)) == 75.0);
    std::vector<float> empty_a, empty_b;
    CHECK(repro_pct(std::span<const float>(empty_a), std::span<const float>(empty_b)) ==
          100.0);
    // signed zeros are distinct runs
    std::vector<float> za{0.0f}, zb{-0.0f};
    CHECK(repro_pct(std::span<const float>(za), std::span<const float>(zb)) == 0.0);
}

TEST_CASE("iteration gap") {
    IterationOutcome<float> orig{Vec<float>(), 100, true, 0.0};
    IterationOutcome<float> acc{Vec<float>(), 40, true, 0.0};
    CHECK(iteration_gap(orig, acc) == 60);
    CHECK(iteration_gap(orig, orig) == 0);
    IterationOutcome<float> bad{Vec<float>(), 500, false, 0.0};
    CHECK_THROWS_AS(iteration_gap(bad, acc), NotConverged);
    CHECK_THROWS_AS(iteration_gap(orig, bad), NotConverged);
}

TEST_CASE("a sweep emits one record per cartesian point") {
    SingleThreadGuard guard;
    SweepConfig config;
    config.kernel = Kernel::simpson;
    config.strategies = {Strategy::naive, Strategy::bucketed, Strategy::sorted};
    config.procs = {2, 4, 8};
    config.params = {2.0, 3.0, 4.0, 5.0};
    config.seeds = {1};
    config.m = 2000;  // keep the unit test quick
    const auto records = run_experiment(config);
    REQUIRE(records.size() == 36);
    for (const auto& r : records) {
        CHECK(r.kernel == "simpson_cos");
        CHECK(r.fmt == "b32");
        CHECK(r.error_flag.empty());
        CHECK(r.wall_ns > 0);
        CHECK_FALSE(r.iterations.has_value());
        CHECK(r.abs_error >= 0.0);
    }
    // spot-check the sweep order: params outermost, then seeds, strategies, procs
    CHECK(records[0].strategy == "naive");
    CHECK(records[0].P == 2);
    CHECK(records[0].param == 2.0);
    CHECK(records[12].param == 3.0);
    CHECK(records[12].strategy == "bucketed");
    CHECK(records[12].P == 2);
}

TEST_CASE("sum sweep reports error against the exact reference") {
    SingleThreadGuard guard;
    SweepConfig config;
    config.kernel = Kernel::sum;
    config.fmt = "b64";  // reference is the exact sum rounded once to binary64
    config.strategies = {Strategy::exact};
    config.procs = {1};
    config.params = {1000.0};
    config.seeds = {3};
    const auto records = run_experiment(config);
    REQUIRE(records.size() == 1);
    CHECK(records[0].kernel == "sum");
    CHECK(records[0].abs_error == 0.0);  // exact strategy matches its own oracle
}

TEST_CASE("jacobi sweeps add derived gap rows per accurate strategy") {
    SingleThreadGuard guard;
    SweepConfig config;
    config.kernel = Kernel::jacobi;
    config.strategies = {Strategy::naive, Strategy::bucketed};
    config.procs = {1};
    config.params = {1e-2, 1e-3, 1e-4, 1e-5};
    config.seeds = {1};
    config.n = 40;
    const auto records = run_experiment(config);
    long product_rows = 0, gap_rows = 0;
    for (const auto& r : records) {
        if (r.kernel == "jacobi") {
            ++product_rows;
            CHECK(r.iterations.has_value());
            CHECK(r.error_flag.empty());
        } else {
            CHECK(r.kernel == "jacobi_gap");
            ++gap_rows;
            CHECK(r.strategy == "bucketed");  // gap rows name the accurate side
            CHECK(r.iterations.has_value());
            CHECK(*r.iterations >= 0);
        }
    }
    CHECK(product_rows == 8);
    CHECK(gap_rows == 4);  // one per eps, single accurate strategy, one seed
}

TEST_CASE("config validation") {
    SweepConfig config;
    config.strategies = {};
    config.params = {100.0};
    CHECK_THROWS_AS(run_experiment(config), InvalidConfig);

    config.strategies = {Strategy::naive};
    config.params = {};
    CHECK_THROWS_AS(run_experiment(config), InvalidConfig);

    config.params = {100.0};
    config.procs = {0};
    CHECK_THROWS_AS(run_experiment(config), InvalidConfig);

    config.procs = {1};
    config.fmt = "b128";
    CHECK_THROWS_AS(run_experiment(config), InvalidConfig);

    config.fmt = "b64";
    config.seeds = {};
    CHECK_THROWS_AS(run_experiment(config), InvalidConfig);
}

TEST_CASE("failures are recorded per row, not thrown") {
    SingleThreadGuard guard;
    SweepConfig config;
    config.kernel = Kernel::jacobi;
    config.strategies = {Strategy::naive};
    config.procs = {1};
    config.params = {1e-9};  // unreachable tolerance in binary32
    config.seeds = {1};
    config.n = 30;
    config.max_iter = 5;
    const auto records = run_experiment(config);
    REQUIRE(records.size() == 1);
    CHECK(records[0].error_flag == "MaxIterationsReached");
    CHECK(records[0].iterations.has_value());
    CHECK(*records[0].iterations == 5);
}

TEST_CASE("csv round-trips records bitwise") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "exsum_csv_test.csv";

    std::vector<ExperimentRecord> records;
    ExperimentRecord r;
    r.kernel = "sum";
    r.strategy = "bucketed";
    r.fmt = "b32";
    r.P = 8;
    r.param = 100000.0;
    r.seed = 17;
    r.abs_error = 0x1.fffffep-3;  // needs exact round-trip
    r.wall_ns = 123456789;
    records.push_back(r);

    ExperimentRecord gap;
    gap.kernel = "jacobi_gap";
    gap.strategy = "bucketed";
    gap.fmt = "b32";
    gap.param = 1e-5;
    gap.seed = 3;
    gap.iterations = 42;
    records.push_back(gap);

    ExperimentRecord failed;
    failed.kernel = "jacobi";
    failed.strategy = "naive";
    failed.fmt = "b64";
    failed.param = 1e-12;
    failed.seed = 9;
    failed.iterations = 50000;
    failed.repro_pct = 87.5;
    failed.error_flag = "MaxIterationsReached";
    records.push_back(failed);

    write_csv(path.string(), records);
    const auto back = read_csv(path.string());
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].kernel == records[i].kernel);
        CHECK(back[i].strategy == records[i].strategy);
        CHECK(back[i].fmt == records[i].fmt);
        CHECK(back[i].P == records[i].P);
        CHECK(back[i].param == records[i].param);
        CHECK(back[i].seed == records[i].seed);
        CHECK(bitwise_equal(back[i].abs_error, records[i].abs_error));
        CHECK(back[i].iterations == records[i].iterations);
        CHECK(back[i].repro_pct == records[i].repro_pct);
        CHECK(back[i].wall_ns == records[i].wall_ns);
        CHECK(back[i].error_flag == records[i].error_flag);
    }
    fs::remove(path);
}

TEST_CASE("csv writes are atomic and headers fixed") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "exsum_csv_header.csv";
    write_csv(path.string(), {});
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "kernel,strategy,fmt,P,param,seed,abs_error,iterations,repro_pct,"
          "wall_ns,error_flag,abs_error_hex");
    // no temp litter left next to the output
    for (const auto& entry : fs::directory_iterator(path.parent_path())) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("exsum_csv_header", 0) == 0) CHECK(name == "exsum_csv_header.csv");
    }
    in.close();
    fs::remove(path);
    CHECK_THROWS_AS(read_csv(path.string()), IoError);
    CHECK_THROWS_AS(write_csv("/nonexistent-dir/x/y.csv", {}), IoError);
}

TEST_CASE("sweep output is reproducible apart from wall time") {
    SingleThreadGuard guard;
    SweepConfig config;
    config.kernel = Kernel::sum;
    config.strategies = {Strategy::naive, Strategy::bucketed};
    config.procs = {1, 4};
    config.params = {2000.0};
    config.seeds = {5, 6};
    const auto a = run_experiment(config);
    const auto b = run_experiment(config);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].kernel == b[i].kernel);
        CHECK(a[i].strategy == b[i].strategy);
        CHECK(a[i].P == b[i].P);
        CHECK(a[i].seed == b[i].seed);
        CHECK(bitwise_equal(a[i].abs_error, b[i].abs_error));
        CHECK(a[i].repro_pct == b[i].repro_pct);
    }
}

TEST_CASE("run_experiment writes the csv when a path is configured") {
    SingleThreadGuard guard;
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "exsum_sweep_out.csv";
    SweepConfig config;
    config.kernel = Kernel::sum;
    config.strategies = {Strategy::naive};
    config.procs = {1};
    config.params = {100.0};
    config.seeds = {1};
    config.csv_path = path.string();
    const auto records = run_experiment(config);
    const auto back = read_csv(path.string());
    REQUIRE(back.size() == records.size());
    CHECK(back[0].kernel == records[0].kernel);
    CHECK(bitwise_equal(back[0].abs_error, records[0].abs_error));
    CHECK(back[0].wall_ns == records[0].wall_ns);
    fs::remove(path);
}
