// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/errors.hpp"
#include "cfnembed/json_io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace cfn;
using namespace cfn::test;

namespace {

Scenario small_scenario()
{
    Scenario s;
    s.topology = small_cfn(3, 2, 1);
    s.sweep = {1, 3, 1};
    s.strategies = {"CFN", "CDC", "AF", "MF", "HEURISTIC"};
    s.workload.vms_per_vsr = 2;
    return s;
}

} // namespace

TEST_CASE("CSV header is fixed")
{
    ResultTable t;
    t.rows.push_back({});
    t.rows.back().strategy = "CFN";
    const std::string csv = to_csv(t);
    CHECK(csv.substr(0, csv.find('\n')) == std::string(kCsvHeader));
    CHECK(std::string(kCsvHeader)
          == "vsr_count,strategy,status,total_w,net_prop_w,net_idle_w,pr_prop_w,pr_idle_w,lan_w,omega_iot,"
             "omega_af,omega_mf,omega_cdc,wall_time_s");
    CHECK_THROWS_AS(to_csv(ResultTable{}), InputError);
}

TEST_CASE("small sweep rows are consistent")
{
    const Scenario sc = small_scenario();
    const ResultTable t = run_sweep(sc);
    REQUIRE(t.rows.size() == 15);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const ResultRow& r = t.rows[i];
        CHECK(r.vsr_count == static_cast<int>(1 + i / 5));
        CHECK(r.strategy == sc.strategies[i % 5]);
        CHECK(r.wall_time_s == 0.0);
        if (!r.solved())
            continue;
        CHECK(r.total_w == doctest::Approx(r.net_prop_w + r.net_idle_w + r.pr_prop_w + r.pr_idle_w + r.lan_w));
        const Demand d = total_demand(sweep_batch(sc, r.vsr_count));
        CHECK(r.omega_iot + r.omega_af + r.omega_mf + r.omega_cdc == doctest::Approx(d.gflops));
    }
    for (int n = 1; n <= 3; ++n) {
        const ResultRow* cfn = t.find(n, "CFN");
        REQUIRE(cfn != nullptr);
        for (const char* other : {"CDC", "AF", "MF", "HEURISTIC"}) {
            const ResultRow* o = t.find(n, other);
            REQUIRE(o != nullptr);
            if (o->solved())
                CHECK(cfn->total_w <= o->total_w + 1e-9);
        }
    }
    CHECK(t.find(4, "CFN") == nullptr);
    const ResultRow* cdc = t.find(2, "CDC");
    CHECK(cdc->omega_cdc > 0.0);
    CHECK(cdc->omega_af == 0.0);
}

TEST_CASE("sweeps are reproducible and thread-independent")
{
    Scenario sc = small_scenario();
    const std::string a = to_csv(run_sweep(sc));
    CHECK(a == to_csv(run_sweep(sc)));
    sc.threads = 2;
    CHECK(a == to_csv(run_sweep(sc)));
    CHECK(sweep_batch(sc, 3) == sweep_batch(sc, 3));
    CHECK(sweep_batch(sc, 3) != sweep_batch(sc, 2));
}

TEST_CASE("CSV round-trips")
{
    const ResultTable t = run_sweep(small_scenario());
    const std::string csv = to_csv(t);
    const ResultTable back = read_csv(csv);
    REQUIRE(back.rows.size() == t.rows.size());
    CHECK(to_csv(back) == csv);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(back.rows[i].status == t.rows[i].status);
        CHECK(back.rows[i].total_w == doctest::Approx(t.rows[i].total_w).epsilon(1e-5));
    }
    CHECK_THROWS_AS(read_csv("nope\n"), ParseError);
    CHECK_THROWS_AS(read_csv(std::string(kCsvHeader) + "\n1,CFN,optimal,abc,0,0,0,0,0,0,0,0,0,0\n"), ParseError);
}

TEST_CASE("infeasible rows leave numeric fields empty")
{
    const Substrate s(small_cfn());
    const std::vector<Vsr> v{chain(0, {0.5, 1e6}, {1.0})};
    const Solution sol = solve_fixed_layer(s, v, {Layer::AF});
    REQUIRE(sol.status == SolveStatus::Infeasible);
    ResultTable t;
    t.rows.push_back(make_row(s, 1, "AF", sol, false));
    const std::string csv = to_csv(t);
    const std::string row = csv.substr(csv.find('\n') + 1);
    CHECK(row == "1,AF,infeasible,,,,,,,,,,,\n");
    const ResultTable back = read_csv(csv);
    CHECK_FALSE(back.rows[0].solved());
}

TEST_CASE("savings summary")
{
    ResultTable t;
    auto add = [&](int n, const char* strategy, double w) {
        ResultRow r;
        r.vsr_count = n;
        r.strategy = strategy;
        r.status = SolveStatus::Optimal;
        r.total_w = w;
        t.rows.push_back(r);
    };
    add(1, "CFN", 50.0);
    add(1, "CDC", 100.0);
    add(2, "CFN", 90.0);
    add(2, "CDC", 100.0);
    add(3, "CFN", 10.0);
    const SavingsSummary s = savings_summary(t, "CDC", "CFN");
    CHECK(s.points == 2);
    CHECK(s.avg == doctest::Approx(30.0));
    CHECK(s.min == doctest::Approx(10.0));
    CHECK(s.max == doctest::Approx(50.0));
    CHECK(format_summary(s, "CDC", "CFN") == "CFN vs CDC savings: avg=30.0% min=10.0% max=50.0%");

    const SavingsSummary same = savings_summary(t, "CDC", "CDC");
    CHECK(same.avg == 0.0);
    CHECK(same.min == 0.0);
    CHECK(same.max == 0.0);
    CHECK_THROWS_AS(savings_summary(t, "CDC", "MF"), InputError);
}

TEST_CASE("scenario checks")
{
    Scenario s = small_scenario();
    CHECK_NOTHROW(check_scenario(s));
    s.sweep = {3, 1, 1};
    CHECK_THROWS_AS(check_scenario(s), ConfigError);
    s = small_scenario();
    s.strategies = {"XYZ"};
    CHECK_THROWS_AS(check_scenario(s), ConfigError);
    s = small_scenario();
    s.threads = -1;
    CHECK_THROWS_AS(check_scenario(s), ConfigError);
}

TEST_CASE("CSV file output")
{
    const ResultTable t = run_sweep(small_scenario());
    const auto path = std::filesystem::temp_directory_path() / "cfnembed_test_results.csv";
    write_csv(t, path.string());
    CHECK(read_text_file(path.string()) == to_csv(t));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(write_csv(t, "/nonexistent-dir/r.csv"), IoError);
}
