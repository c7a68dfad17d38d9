// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/cfnembed.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

namespace {

template <typename T, void (*Free)(T*)>
struct Deleter
{
    void operator()(T* p) const { Free(p); }
};

using Topology = std::unique_ptr<cfn_topology, Deleter<cfn_topology, cfn_topology_free>>;
using Batch = std::unique_ptr<cfn_vsr_batch, Deleter<cfn_vsr_batch, cfn_vsrs_free>>;
using SolutionPtr = std::unique_ptr<cfn_solution, Deleter<cfn_solution, cfn_solution_free>>;
using ScenarioPtr = std::unique_ptr<cfn_scenario, Deleter<cfn_scenario, cfn_scenario_free>>;
using Table = std::unique_ptr<cfn_result_table, Deleter<cfn_result_table, cfn_result_free>>;

struct Failure
{
    int code;
};

void check(cfn_status status)
{
    if (status != CFN_OK) {
        std::cerr << "error: " << cfn_last_error() << "\n";
        throw Failure{1};
    }
}

std::string take(char* text)
{
    std::string s = text ? text : "";
    cfn_string_free(text);
    return s;
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        throw Failure{1};
    }
}

// "default" stands for the reference hierarchy.
Topology open_topology(const std::string& path)
{
    cfn_topology* t = nullptr;
    if (path == "default")
        check(cfn_topology_default(20, 4, 7, &t));
    else
        check(cfn_topology_load(path.c_str(), &t));
    return Topology(t);
}

Batch open_vsrs(const std::string& path)
{
    cfn_vsr_batch* v = nullptr;
    check(cfn_vsrs_load(path.c_str(), &v));
    return Batch(v);
}

const char* counting_arg(const std::string& counting)
{
    return counting.empty() ? nullptr : counting.c_str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Energy-aware embedding of virtual service requests in cloud-fog networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cfn_version()));

    std::string counting;

    auto* sweep = app.add_subcommand("sweep", "Run a scenario sweep, write the CSV and print the savings summary");
    std::string scenario_path, sweep_output;
    sweep->add_option("scenario", scenario_path, "Scenario file")->required();
    sweep->add_option("-o,--output", sweep_output, "CSV destination (overrides the scenario)");

    auto* solve = app.add_subcommand("solve", "Solve one instance and print the solution as JSON");
    std::string topo_path, vsrs_path, strategy = "cfn";
    solve->add_option("topology", topo_path, "Topology file or 'default'")->required();
    solve->add_option("vsrs", vsrs_path, "VSR batch file")->required();
    solve->add_option("-s,--strategy", strategy,
                      "enumeration | bnb | heuristic | cfn | cdc | af | mf, or a JSON strategy object")
        ->capture_default_str();
    solve->add_option("--counting", counting, "paper-literal | count-once");

    auto* export_lp = app.add_subcommand("export-lp", "Write the full model in LP format");
    std::string lp_out;
    export_lp->add_option("topology", topo_path, "Topology file or 'default'")->required();
    export_lp->add_option("vsrs", vsrs_path, "VSR batch file")->required();
    export_lp->add_option("out", lp_out, "Destination LP file")->required();
    export_lp->add_option("--counting", counting, "paper-literal | count-once");

    auto* validate = app.add_subcommand("validate", "Validate a topology, VSR batch or scenario file");
    std::string validate_path;
    validate->add_option("file", validate_path, "File to validate")->required();

    auto* topology = app.add_subcommand("default-topology", "Print the reference topology as JSON");
    int iot_count = 20, zone_count = 4;
    std::uint64_t topo_seed = 7;
    std::string topo_out;
    topology->add_option("--iot", iot_count, "Number of IoT devices")->capture_default_str();
    topology->add_option("--zones", zone_count, "Number of zones")->capture_default_str();
    topology->add_option("--seed", topo_seed, "Zone assignment seed")->capture_default_str();
    topology->add_option("-o,--output", topo_out, "Destination file");

    auto* generate = app.add_subcommand("generate-vsrs", "Draw a VSR batch as JSON");
    int count = 1, vms = 3;
    std::uint64_t seed = 1;
    std::string source = "iot_01", gen_out;
    generate->add_option("topology", topo_path, "Topology file or 'default'")->required();
    generate->add_option("-n,--count", count, "Number of VSRs")->capture_default_str();
    generate->add_option("--vms", vms, "VMs per VSR")->capture_default_str();
    generate->add_option("--seed", seed, "Seed")->capture_default_str();
    generate->add_option("--source", source, "Source IoT device")->capture_default_str();
    generate->add_option("-o,--output", gen_out, "Destination file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            cfn_scenario* s = nullptr;
            check(cfn_scenario_load(scenario_path.c_str(), &s));
            ScenarioPtr scenario(s);
            cfn_result_table* t = nullptr;
            check(cfn_sweep_run(scenario.get(), &t));
            Table table(t);
            const std::string dest = sweep_output.empty() ? cfn_scenario_output(scenario.get()) : sweep_output;
            check(cfn_result_write_csv(table.get(), dest.c_str()));
            std::cout << "wrote " << cfn_result_rows(table.get()) << " rows to " << dest << "\n";
            char* line = nullptr;
            if (cfn_result_savings(table.get(), "CDC", "CFN", nullptr, nullptr, nullptr, &line) == CFN_OK)
                std::cout << take(line) << "\n";
            return 0;
        }
        if (*solve) {
            Topology t = open_topology(topo_path);
            Batch v = open_vsrs(vsrs_path);
            cfn_solution* s = nullptr;
            const cfn_status status = cfn_solve(t.get(), v.get(), strategy.c_str(), counting_arg(counting), &s);
            if (status != CFN_OK && status != CFN_INFEASIBLE)
                check(status);
            SolutionPtr solution(s);
            char* json = nullptr;
            check(cfn_solution_to_json(solution.get(), &json));
            std::cout << take(json);
            if (status == CFN_INFEASIBLE) {
                std::cerr << "infeasible: " << cfn_solution_message(solution.get()) << "\n";
                return 2;
            }
            return 0;
        }
        if (*export_lp) {
            Topology t = open_topology(topo_path);
            Batch v = open_vsrs(vsrs_path);
            check(cfn_export_lp(t.get(), v.get(), counting_arg(counting), lp_out.c_str()));
            return 0;
        }
        if (*validate) {
            const char* kind = nullptr;
            size_t violations = 0;
            char* report = nullptr;
            check(cfn_validate_file(validate_path.c_str(), &kind, &violations, &report));
            const std::string text = take(report);
            if (violations == 0) {
                std::cout << validate_path << ": valid " << kind << "\n";
                return 0;
            }
            std::cerr << validate_path << ": " << violations << " problem(s) in " << kind << "\n" << text;
            return 1;
        }
        if (*topology) {
            cfn_topology* t = nullptr;
            check(cfn_topology_default(iot_count, zone_count, topo_seed, &t));
            Topology owned(t);
            char* json = nullptr;
            check(cfn_topology_to_json(owned.get(), &json));
            emit(take(json), topo_out);
            return 0;
        }
        if (*generate) {
            Topology t = open_topology(topo_path);
            cfn_vsr_batch* v = nullptr;
            check(cfn_vsrs_generate(t.get(), count, vms, seed, source.c_str(), &v));
            Batch owned(v);
            char* json = nullptr;
            check(cfn_vsrs_to_json(owned.get(), &json));
            emit(take(json), gen_out);
            return 0;
        }
    } catch (const Failure& f) {
        return f.code;
    }
    return 0;
}
