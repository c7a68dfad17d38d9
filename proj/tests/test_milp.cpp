// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/errors.hpp"
#include "cfnembed/milp.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <regex>
#include <sstream>

using namespace cfn;
using namespace cfn::test;

TEST_CASE("model construction is deterministic")
{
    const CfnTopology t = small_cfn();
    const Substrate s(t);
    const auto v = random_batch(t, 2, 5);
    const MilpModel a = formulate(s, v);
    const MilpModel b = formulate(s, v);
    CHECK(same_model(a, b));
    CHECK(to_lp(a) == to_lp(b));
    CHECK_FALSE(a.variables.empty());
    CHECK_FALSE(a.constraints.empty());
    for (std::size_t i = 1; i < a.constraints.size(); ++i)
        CHECK(a.constraints[i].name != a.constraints[i - 1].name);
}

TEST_CASE("optimal placements satisfy the model with matching objective")
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        CAPTURE(seed);
        const CfnTopology t = small_cfn(3, 2, seed);
        const Substrate s(t);
        const auto v = random_batch(t, 1 + static_cast<int>(seed % 2), seed);
        for (TrafficCounting c : {TrafficCounting::PaperLiteral, TrafficCounting::CountOnce}) {
            SolveOptions o;
            o.power.counting = c;
            const Solution best = solve_exact_enumeration(s, v, {}, o);
            REQUIRE(best.status == SolveStatus::Optimal);
            const SolutionCheckReport r = check_placement_model(s, v, best.placement, o.power);
            CHECK(r.feasible);
            CHECK(r.violated.empty());
            CHECK(r.bound_violations.empty());
            CHECK(r.integrality_violations.empty());
            CHECK(std::abs(r.objective - best.objective) <= 1e-6);
        }
    }
}

TEST_CASE("every placement of a tiny instance is consistent with the evaluator")
{
    const CfnTopology t = small_cfn(2, 1, 3);
    const Substrate s(t);
    const std::vector<Vsr> v{chain(0, {0.5, 3.0, 4.0}, {12.0, 30.0})};
    const auto& procs = s.processing_nodes();
    const NodeIndex src = s.index_of("iot_01");
    for (NodeIndex a : procs)
        for (NodeIndex b : procs) {
            Placement p;
            p.assign = {{src, a, b}};
            PowerBreakdown eval;
            try {
                eval = evaluate_placement(s, v, p);
            } catch (const CapacityExceeded&) {
                continue;
            }
            const SolutionCheckReport r = check_placement_model(s, v, p);
            CHECK(r.feasible);
            CHECK(std::abs(r.objective - eval.total) <= 1e-6);
        }
}

TEST_CASE("perturbed solutions are detected")
{
    const CfnTopology t = small_cfn();
    const Substrate s(t);
    const std::vector<Vsr> v{chain(0, {0.5, 3.0, 4.0}, {12.0, 30.0})};
    const MilpModel m = formulate(s, v);
    Placement p;
    p.assign = {{s.index_of("iot_01"), s.index_of("cdc"), s.index_of("cdc")}};
    complete_routes(s, v, p);
    VariableValues values = complete_values(m, s, v, p);
    REQUIRE(check_solution(m, values).feasible);

    SUBCASE("input moved off its source")
    {
        const int d = m.index.assign.at({0, 0, s.index_of("iot_01")});
        values[m.variables[static_cast<std::size_t>(d)].name] = 0.0;
        const auto r = check_solution(m, values);
        CHECK_FALSE(r.feasible);
        CHECK_FALSE(r.violated.empty());
    }
    SUBCASE("fractional assignment")
    {
        const int d = m.index.assign.at({0, 1, s.index_of("cdc")});
        values[m.variables[static_cast<std::size_t>(d)].name] = 0.5;
        const auto r = check_solution(m, values);
        CHECK_FALSE(r.feasible);
        CHECK_FALSE(r.integrality_violations.empty());
    }
    SUBCASE("missing value")
    {
        values.erase(values.begin());
        CHECK_THROWS_AS(check_solution(m, values), InputError);
    }
}

TEST_CASE("LP text round-trips")
{
    const CfnTopology t = small_cfn();
    const Substrate s(t);
    const auto v = random_batch(t, 2, 9);
    const MilpModel m = formulate(s, v);
    const std::string text = to_lp(m);
    const MilpModel back = parse_lp(text);
    CHECK(same_model(m, back));
    CHECK(to_lp(back) == text);

    const std::regex name("^[A-Za-z_][A-Za-z0-9_]*$");
    for (const Variable& var : m.variables)
        CHECK(std::regex_match(var.name, name));
    CHECK(text.find("Minimize") == 0);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("Binaries") != std::string::npos);
    CHECK(text.rfind("End") != std::string::npos);
}

TEST_CASE("LP export writes a file")
{
    const CfnTopology t = small_cfn();
    const Substrate s(t);
    const MilpModel m = formulate(s, random_batch(t, 1, 2));
    const auto path = std::filesystem::temp_directory_path() / "cfnembed_test_model.lp";
    export_lp(m, path.string());
    CHECK(std::filesystem::file_size(path) == to_lp(m).size());
    std::filesystem::remove(path);
    CHECK_THROWS_AS(export_lp(m, "/nonexistent-dir/x.lp"), IoError);
}

TEST_CASE("hand-written LP is parsed")
{
    const MilpModel m = parse_lp("\\ comment\n"
                                 "minimize\n obj: 2 x + 3 y - z + 4\n"
                                 "subject to\n c1: x + y >= 1\n c2: x - z\n   <= 0\n"
                                 "bounds\n 0 <= z <= 5\n y free\n"
                                 "generals\n z\nbinaries\n x\nend\n");
    REQUIRE(m.variables.size() == 3);
    CHECK(m.objective_constant == doctest::Approx(4.0));
    CHECK(m.constraints.size() == 2);
    CHECK(m.constraints[1].sense == Sense::LessEqual);
    const int y = m.find("y");
    REQUIRE(y >= 0);
    CHECK(std::isinf(m.variables[static_cast<std::size_t>(y)].lower));
    CHECK(m.variables[static_cast<std::size_t>(m.find("x"))].kind == VarKind::Binary);
    CHECK(m.variables[static_cast<std::size_t>(m.find("z"))].kind == VarKind::Integer);
    CHECK_THROWS_AS(parse_lp("minimize\n obj: x +\nsubject to\n c: x >= \nend\n"), ParseError);
    CHECK_THROWS_AS(parse_lp("subject to\n c: x >= 1\n"), ParseError);
}

TEST_CASE("lower bound never exceeds the optimum")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        CAPTURE(seed);
        const CfnTopology t = small_cfn(3, 2, seed);
        const Substrate s(t);
        const auto v = random_batch(t, 1 + static_cast<int>(seed % 3), 100 + seed);
        const Solution best = solve_exact_enumeration(s, v);
        if (best.status == SolveStatus::Infeasible)
            continue;
        CHECK(root_lower_bound(s, v) <= best.objective + 1e-9);
    }
}
