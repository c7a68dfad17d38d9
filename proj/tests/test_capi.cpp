// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cfnembed/cfnembed.h"

#include <cstdio>
#include <string>

namespace {

std::string take(char* text)
{
    std::string s = text ? text : "";
    cfn_string_free(text);
    return s;
}

} // namespace

TEST_CASE("default topology, generation and solve")
{
    cfn_topology* topo = nullptr;
    REQUIRE(cfn_topology_default(20, 4, 7, &topo) == CFN_OK);
    CHECK(cfn_topology_node_count(topo) == 33);
    size_t violations = 99;
    CHECK(cfn_topology_validate(topo, &violations, nullptr) == CFN_OK);
    CHECK(violations == 0);

    char* path = nullptr;
    REQUIRE(cfn_topology_path(topo, "iot_01", "cdc", &path) == CFN_OK);
    const std::string p = take(path);
    CHECK(p.front() == '[');
    CHECK(p.find("\"cdc\"") != std::string::npos);

    cfn_vsr_batch* vsrs = nullptr;
    REQUIRE(cfn_vsrs_generate(topo, 2, 3, 5, "iot_01", &vsrs) == CFN_OK);
    CHECK(cfn_vsrs_count(vsrs) == 2);

    cfn_solution* sol = nullptr;
    REQUIRE(cfn_solve(topo, vsrs, "bnb", nullptr, &sol) == CFN_OK);
    CHECK(cfn_solution_status_of(sol) == CFN_SOLUTION_OPTIMAL);
    const double objective = cfn_solution_objective(sol);
    CHECK(objective > 0.0);
    CHECK(std::string(cfn_solution_node_of(sol, 0, 0)) == "iot_01");
    CHECK(cfn_solution_node_of(sol, 5, 0) == nullptr);
    int feasible = 0;
    double model_objective = 0.0;
    CHECK(cfn_solution_check(sol, &feasible, &model_objective) == CFN_OK);
    CHECK(feasible == 1);
    CHECK(model_objective == doctest::Approx(objective));
    char* json = nullptr;
    CHECK(cfn_solution_to_json(sol, &json) == CFN_OK);
    CHECK(take(json).find("\"optimal\"") != std::string::npos);

    cfn_solution* cdc = nullptr;
    REQUIRE(cfn_solve(topo, vsrs, "cdc", "count-once", &cdc) == CFN_OK);
    CHECK(cfn_solution_status_of(cdc) == CFN_SOLUTION_FEASIBLE);
    cfn_solution* cdc_lit = nullptr;
    REQUIRE(cfn_solve(topo, vsrs, "{\"kind\":\"fixed\",\"layer\":\"cdc\"}", nullptr, &cdc_lit) == CFN_OK);
    CHECK(cfn_solution_objective(cdc_lit) >= objective);
    CHECK(cfn_solution_objective(cdc_lit) > cfn_solution_objective(cdc));

    double total = 0.0;
    const char* assignment = "{\"assignment\":[{\"vsr\":0,\"vm\":0,\"node\":\"iot_01\"},"
                             "{\"vsr\":0,\"vm\":1,\"node\":\"cdc\"},{\"vsr\":0,\"vm\":2,\"node\":\"cdc\"},"
                             "{\"vsr\":1,\"vm\":0,\"node\":\"iot_01\"},{\"vsr\":1,\"vm\":1,\"node\":\"cdc\"},"
                             "{\"vsr\":1,\"vm\":2,\"node\":\"cdc\"}]}";
    CHECK(cfn_evaluate(topo, vsrs, assignment, nullptr, &total) == CFN_OK);
    CHECK(total == doctest::Approx(cfn_solution_objective(cdc_lit)));

    char* lp = nullptr;
    REQUIRE(cfn_model_lp(topo, vsrs, nullptr, &lp) == CFN_OK);
    CHECK(take(lp).rfind("Minimize", 0) == 0);
    const std::string file = std::string(P_tmpdir) + "/cfnembed_capi.lp";
    CHECK(cfn_export_lp(topo, vsrs, "paper-literal", file.c_str()) == CFN_OK);
    std::remove(file.c_str());

    cfn_solution_free(sol);
    cfn_solution_free(cdc);
    cfn_solution_free(cdc_lit);
    cfn_vsrs_free(vsrs);
    cfn_topology_free(topo);
}

TEST_CASE("infeasible baseline still returns a solution handle")
{
    cfn_topology* topo = nullptr;
    REQUIRE(cfn_topology_default(20, 4, 7, &topo) == CFN_OK);
    cfn_vsr_batch* vsrs = nullptr;
    REQUIRE(cfn_vsrs_from_json("{\"vsrs\":[{\"id\":0,\"source_iot\":\"iot_01\",\"vms\":["
                               "{\"id\":0,\"flops\":0.5,\"is_input\":true},{\"id\":1,\"flops\":1000000,\"is_input\":false}],"
                               "\"vlinks\":[{\"src\":0,\"dst\":1,\"mbps\":5}]}]}",
                               &vsrs)
            == CFN_OK);
    cfn_solution* sol = nullptr;
    CHECK(cfn_solve(topo, vsrs, "af", nullptr, &sol) == CFN_INFEASIBLE);
    REQUIRE(sol != nullptr);
    CHECK(cfn_solution_status_of(sol) == CFN_SOLUTION_INFEASIBLE);
    CHECK(std::string(cfn_solution_message(sol)).find("af") != std::string::npos);
    cfn_solution_free(sol);
    cfn_vsrs_free(vsrs);
    cfn_topology_free(topo);
}

TEST_CASE("bad arguments are reported")
{
    cfn_topology* topo = nullptr;
    CHECK(cfn_topology_default(20, 4, 7, nullptr) == CFN_INVALID_ARGUMENT);
    CHECK(std::string(cfn_last_error()).size() > 0);
    CHECK(cfn_topology_from_json("{", &topo) == CFN_PARSE);
    CHECK(topo == nullptr);
    CHECK(cfn_topology_load("/nonexistent/t.json", &topo) == CFN_IO);
    CHECK(cfn_topology_default(0, 4, 7, &topo) == CFN_CONFIG);
    CHECK(std::string(cfn_status_name(CFN_INFEASIBLE)).size() > 0);
    CHECK(std::string(cfn_version()) == "0.1.0");
    cfn_solution* sol = nullptr;
    CHECK(cfn_solve(nullptr, nullptr, "bnb", nullptr, &sol) == CFN_INVALID_ARGUMENT);
    cfn_topology_free(nullptr);
    cfn_string_free(nullptr);
}

TEST_CASE("scenario sweep through the C interface")
{
    cfn_scenario* sc = nullptr;
    REQUIRE(cfn_scenario_from_json("{\"topology\":{\"builder\":{\"iot_count\":3,\"zone_count\":2}},"
                                   "\"sweep\":{\"from\":1,\"to\":2},\"output\":\"x.csv\"}",
                                   ".", &sc)
            == CFN_OK);
    CHECK(std::string(cfn_scenario_output(sc)) == "x.csv");
    cfn_result_table* table = nullptr;
    REQUIRE(cfn_sweep_run(sc, &table) == CFN_OK);
    CHECK(cfn_result_rows(table) == 8);
    char* csv = nullptr;
    REQUIRE(cfn_result_csv(table, &csv) == CFN_OK);
    CHECK(take(csv).rfind("vsr_count,strategy,status", 0) == 0);
    double avg = -1, lo = -1, hi = -1;
    char* line = nullptr;
    REQUIRE(cfn_result_savings(table, "CDC", "CFN", &avg, &lo, &hi, &line) == CFN_OK);
    CHECK(lo <= avg);
    CHECK(avg <= hi);
    CHECK(lo >= 0.0);
    CHECK(take(line).rfind("CFN vs CDC savings: avg=", 0) == 0);
    cfn_result_free(table);
    cfn_scenario_free(sc);

    const char* kind = nullptr;
    size_t violations = 1;
    CHECK(cfn_validate_file(CFN_SOURCE_DIR "/data/default_topology.json", &kind, &violations, nullptr) == CFN_OK);
    CHECK(std::string(kind) == "topology");
    CHECK(violations == 0);
}
