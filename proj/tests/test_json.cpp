// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/errors.hpp"
#include "cfnembed/json_io.hpp"
#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace cfn;
using namespace cfn::test;

TEST_CASE("topology JSON round-trips")
{
    const CfnTopology t = build_default_cfn();
    const std::string text = topology_to_json(t);
    const CfnTopology back = topology_from_json(text);
    CHECK(back == t);
    CHECK(topology_to_json(back) == text);
}

TEST_CASE("the shipped default topology matches the builder")
{
    const CfnTopology file = topology_from_json(read_text_file(CFN_SOURCE_DIR "/data/default_topology.json"));
    CHECK(file == build_default_cfn());
}

TEST_CASE("VSR JSON round-trips")
{
    const auto v = random_batch(build_default_cfn(), 5, 3, VlinkPattern::RandomConnected);
    const std::string text = vsrs_to_json(v);
    CHECK(vsrs_from_json(text) == v);
    CHECK(vsrs_to_json(vsrs_from_json(text)) == text);
}

TEST_CASE("malformed documents are parse errors")
{
    CHECK_THROWS_AS(topology_from_json("{"), ParseError);
    CHECK_THROWS_AS(topology_from_json(R"({"nodes":[],"links":[],"colour":1})"), ParseError);
    CHECK_THROWS_AS(vsrs_from_json(R"({"vsrs":3})"), ParseError);
    CHECK_THROWS_AS(scenario_from_json(R"({"sweep":{"from":1,"upto":2}})"), ParseError);
    CHECK_THROWS_AS(strategy_from_json(R"({"kind":"simplex"})"), ParseError);
    CHECK_THROWS_AS(strategy_from_json(R"({"kind":"bnb","bound":"tight"})"), ParseError);
}

TEST_CASE("strategies parse from names and objects")
{
    CHECK(std::holds_alternative<BranchAndBoundParams>(strategy_from_json(R"("bnb")")));
    CHECK(std::holds_alternative<HeuristicParams>(strategy_from_json(R"("heuristic")")));
    const Strategy b = strategy_from_json(R"({"kind":"bnb","node_limit":77,"bound":"none","warm_start":false})");
    const auto& p = std::get<BranchAndBoundParams>(b);
    CHECK(p.node_limit == 77);
    CHECK(p.bound == BoundMode::None);
    CHECK_FALSE(p.warm_start);
    const Strategy f = strategy_from_json(R"({"kind":"fixed","layer":"mf"})");
    CHECK(std::get<FixedLayerParams>(f).layer == Layer::MF);
}

TEST_CASE("scenarios load with defaults and overrides")
{
    const Scenario d = load_scenario(CFN_SOURCE_DIR "/data/default_scenario.json");
    CHECK(d.sweep.from == 1);
    CHECK(d.sweep.to == 20);
    CHECK(d.strategies == std::vector<std::string>{"CFN", "CDC", "AF", "MF"});
    CHECK(d.topology.nodes.size() == 33);
    CHECK(d.power.counting == TrafficCounting::PaperLiteral);
    CHECK(d.bnb.node_limit == 2000000);

    const Scenario s = scenario_from_json(
        R"({"topology":{"file":"default_topology.json"},"traffic_counting":"count-once","threads":2})",
        CFN_SOURCE_DIR "/data");
    CHECK(s.topology == build_default_cfn());
    CHECK(s.power.counting == TrafficCounting::CountOnce);
    CHECK(s.threads == 2);
    CHECK_THROWS_AS(scenario_from_json(R"({"topology":{"file":"missing.json"}})", "."), IoError);
}

TEST_CASE("documents are classified and validated")
{
    DocumentKind kind{};
    CHECK(validate_document(topology_to_json(build_default_cfn()), ".", &kind).empty());
    CHECK(kind == DocumentKind::Topology);
    CHECK(validate_document(vsrs_to_json(random_batch(build_default_cfn(), 2, 1)), ".", &kind).empty());
    CHECK(kind == DocumentKind::VsrBatch);
    CHECK(validate_document(R"({"sweep":{"from":1,"to":2}})", ".", &kind).empty());
    CHECK(kind == DocumentKind::Scenario);
    CHECK_FALSE(validate_document(R"({"sweep":{"from":5,"to":2}})", ".", &kind).empty());

    CfnTopology bad = build_default_cfn();
    bad.links.push_back({"olt", "olt"});
    CHECK_FALSE(validate_document(topology_to_json(bad), ".").empty());
    CHECK_THROWS_AS(validate_document(R"({"colour":1})", "."), ParseError);
}

TEST_CASE("solution JSON lists the assignment and breakdown")
{
    const CfnTopology t = small_cfn();
    const Substrate s(t);
    const std::vector<Vsr> v{chain(4, {0.5, 3.0}, {10.0})};
    const Solution sol = solve_exact_enumeration(s, v);
    const auto j = nlohmann::json::parse(solution_to_json(s, v, sol));
    CHECK(j.at("status") == "optimal");
    CHECK(j.at("objective_w").get<double>() == doctest::Approx(sol.objective));
    REQUIRE(j.at("assignment").size() == 2);
    CHECK(j.at("assignment")[0].at("vsr") == 4);
    CHECK(j.at("assignment")[0].at("node") == "iot_01");
    CHECK(j.at("breakdown").at("total_w").get<double>() == doctest::Approx(sol.objective));
    CHECK(j.at("breakdown").at("per_node").contains("iot_01"));

    Solution none;
    const auto k = nlohmann::json::parse(solution_to_json(s, v, none));
    CHECK(k.at("status") == "infeasible");
    CHECK(k.at("objective_w").is_null());
    CHECK(k.at("assignment").empty());
}
