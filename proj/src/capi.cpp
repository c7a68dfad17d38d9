// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/cfnembed.h"

#include "cfnembed/errors.hpp"
#include "cfnembed/harness.hpp"
#include "cfnembed/json_io.hpp"
#include "cfnembed/milp.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>

using namespace cfn;

struct cfn_topology
{
    CfnTopology topology;
    std::shared_ptr<const Substrate> substrate; // null while the topology is invalid
};

struct cfn_vsr_batch
{
    std::vector<Vsr> vsrs;
};

struct cfn_solution
{
    std::shared_ptr<const Substrate> substrate;
    std::vector<Vsr> vsrs;
    PowerOptions power;
    Solution solution;
};

struct cfn_scenario
{
    Scenario scenario;
};

struct cfn_result_table
{
    ResultTable table;
};

namespace {

thread_local std::string g_last_error;

cfn_status fail(cfn_status status, const std::string& message)
{
    g_last_error = message;
    return status;
}

template <typename F>
cfn_status guard(F&& body)
{
    try {
        g_last_error.clear();
        return body();
    } catch (const CapacityExceeded& e) {
        return fail(CFN_CAPACITY, e.what());
    } catch (const NoPathError& e) {
        return fail(CFN_NO_PATH, e.what());
    } catch (const SearchSpaceTooLarge& e) {
        return fail(CFN_SEARCH_LIMIT, e.what());
    } catch (const ConfigError& e) {
        return fail(CFN_CONFIG, e.what());
    } catch (const ParseError& e) {
        return fail(CFN_PARSE, e.what());
    } catch (const IoError& e) {
        return fail(CFN_IO, e.what());
    } catch (const InputError& e) {
        return fail(CFN_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CFN_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CFN_INTERNAL, e.what());
    } catch (...) {
        return fail(CFN_INTERNAL, "unknown error");
    }
}

char* dup(const std::string& s)
{
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

std::string report_text(const ValidationReport& report)
{
    std::string out;
    for (const Violation& v : report)
        out += v.code + ": " + v.message + "\n";
    return out;
}

cfn_topology* wrap(CfnTopology t)
{
    auto h = std::make_unique<cfn_topology>();
    h->topology = std::move(t);
    if (validate_topology(h->topology).empty())
        h->substrate = std::make_shared<const Substrate>(h->topology);
    return h.release();
}

const Substrate& substrate_of(const cfn_topology* t)
{
    if (!t->substrate)
        throw ConfigError("topology is invalid:\n" + report_text(validate_topology(t->topology)));
    return *t->substrate;
}

PowerOptions power_options(const char* counting)
{
    PowerOptions p;
    if (counting && *counting)
        p.counting = traffic_counting_from_string(counting);
    return p;
}

#define CFN_REQUIRE(cond)                                                                                              \
    do {                                                                                                               \
        if (!(cond))                                                                                                   \
            return fail(CFN_INVALID_ARGUMENT, "invalid argument: " #cond);                                             \
    } while (0)

} // namespace

extern "C" {

const char* cfn_version(void)
{
    return CFN_VERSION;
}

const char* cfn_last_error(void)
{
    return g_last_error.c_str();
}

const char* cfn_status_name(cfn_status status)
{
    switch (status) {
    case CFN_OK:
        return "ok";
    case CFN_INVALID_ARGUMENT:
        return "invalid argument";
    case CFN_CONFIG:
        return "configuration error";
    case CFN_PARSE:
        return "parse error";
    case CFN_IO:
        return "I/O error";
    case CFN_CAPACITY:
        return "capacity exceeded";
    case CFN_NO_PATH:
        return "no path";
    case CFN_INFEASIBLE:
        return "infeasible";
    case CFN_SEARCH_LIMIT:
        return "search space too large";
    case CFN_INTERNAL:
        return "internal error";
    }
    return "unknown";
}

void cfn_string_free(char* text)
{
    std::free(text);
}

cfn_status cfn_topology_default(int iot_count, int zone_count, uint64_t seed, cfn_topology** out)
{
    CFN_REQUIRE(out);
    return guard([&] {
        DefaultTopologyConfig c;
        c.iot_count = iot_count;
        c.zone_count = zone_count;
        c.seed = seed;
        *out = wrap(build_default_cfn(c));
        return CFN_OK;
    });
}

cfn_status cfn_topology_from_json(const char* json, cfn_topology** out)
{
    CFN_REQUIRE(json && out);
    return guard([&] {
        *out = wrap(topology_from_json(json));
        return CFN_OK;
    });
}

cfn_status cfn_topology_load(const char* path, cfn_topology** out)
{
    CFN_REQUIRE(path && out);
    return guard([&] {
        *out = wrap(topology_from_json(read_text_file(path)));
        return CFN_OK;
    });
}

cfn_status cfn_topology_to_json(const cfn_topology* topology, char** out)
{
    CFN_REQUIRE(topology && out);
    return guard([&] {
        *out = dup(topology_to_json(topology->topology));
        return CFN_OK;
    });
}

size_t cfn_topology_node_count(const cfn_topology* topology)
{
    return topology ? topology->topology.nodes.size() : 0;
}

cfn_status cfn_topology_validate(const cfn_topology* topology, size_t* violations, char** report)
{
    CFN_REQUIRE(topology && violations);
    return guard([&] {
        const ValidationReport r = validate_topology(topology->topology);
        *violations = r.size();
        if (report)
            *report = dup(report_text(r));
        return CFN_OK;
    });
}

cfn_status cfn_topology_path(const cfn_topology* topology, const char* from, const char* to, char** out)
{
    CFN_REQUIRE(topology && from && to && out);
    return guard([&] {
        nlohmann::json arr = min_power_path(substrate_of(topology), from, to);
        *out = dup(arr.dump());
        return CFN_OK;
    });
}

void cfn_topology_free(cfn_topology* topology)
{
    delete topology;
}

cfn_status cfn_vsrs_generate(const cfn_topology* topology, int vsr_count, int vms_per_vsr, uint64_t seed,
                             const char* source_iot, cfn_vsr_batch** out)
{
    CFN_REQUIRE(topology && out);
    return guard([&] {
        WorkloadSpec spec;
        spec.vsr_count = vsr_count;
        spec.vms_per_vsr = vms_per_vsr;
        spec.seed = seed;
        if (source_iot)
            spec.source_iot = source_iot;
        auto h = std::make_unique<cfn_vsr_batch>();
        h->vsrs = generate_vsrs(spec, topology->topology);
        *out = h.release();
        return CFN_OK;
    });
}

cfn_status cfn_vsrs_from_json(const char* json, cfn_vsr_batch** out)
{
    CFN_REQUIRE(json && out);
    return guard([&] {
        auto h = std::make_unique<cfn_vsr_batch>();
        h->vsrs = vsrs_from_json(json);
        *out = h.release();
        return CFN_OK;
    });
}

cfn_status cfn_vsrs_load(const char* path, cfn_vsr_batch** out)
{
    CFN_REQUIRE(path && out);
    return guard([&] {
        auto h = std::make_unique<cfn_vsr_batch>();
        h->vsrs = vsrs_from_json(read_text_file(path));
        *out = h.release();
        return CFN_OK;
    });
}

cfn_status cfn_vsrs_to_json(const cfn_vsr_batch* vsrs, char** out)
{
    CFN_REQUIRE(vsrs && out);
    return guard([&] {
        *out = dup(vsrs_to_json(vsrs->vsrs));
        return CFN_OK;
    });
}

size_t cfn_vsrs_count(const cfn_vsr_batch* vsrs)
{
    return vsrs ? vsrs->vsrs.size() : 0;
}

cfn_status cfn_vsrs_validate(const cfn_vsr_batch* vsrs, const cfn_topology* topology, size_t* violations,
                             char** report)
{
    CFN_REQUIRE(vsrs && violations);
    return guard([&] {
        ValidationReport all;
        for (const Vsr& v : vsrs->vsrs)
            for (Violation& x : topology ? validate_vsr(v, topology->topology) : validate_vsr(v))
                all.push_back(std::move(x));
        *violations = all.size();
        if (report)
            *report = dup(report_text(all));
        return CFN_OK;
    });
}

void cfn_vsrs_free(cfn_vsr_batch* vsrs)
{
    delete vsrs;
}

cfn_status cfn_solve(const cfn_topology* topology, const cfn_vsr_batch* vsrs, const char* strategy_json,
                     const char* traffic_counting, cfn_solution** out)
{
    CFN_REQUIRE(topology && vsrs && strategy_json && out);
    return guard([&] {
        auto h = std::make_unique<cfn_solution>();
        const Substrate& sub = substrate_of(topology);
        h->substrate = topology->substrate;
        h->vsrs = vsrs->vsrs;
        h->power = power_options(traffic_counting);
        const std::string text = strategy_json;
        if (text == "cfn" || text == "CFN") {
            Scenario scenario;
            scenario.power = h->power;
            h->solution = run_strategy(sub, h->vsrs, "CFN", scenario);
        } else {
            const bool object = text.find('{') != std::string::npos;
            const Strategy strategy = strategy_from_json(object ? text : nlohmann::json(text).dump());
            h->solution = solve(sub, h->vsrs, strategy, SolveOptions{h->power, {}});
        }
        const bool infeasible = h->solution.status == SolveStatus::Infeasible;
        if (infeasible)
            g_last_error = h->solution.message.empty() ? "infeasible" : h->solution.message;
        *out = h.release();
        return infeasible ? CFN_INFEASIBLE : CFN_OK;
    });
}

cfn_solution_status cfn_solution_status_of(const cfn_solution* solution)
{
    if (!solution)
        return CFN_SOLUTION_INFEASIBLE;
    switch (solution->solution.status) {
    case SolveStatus::Optimal:
        return CFN_SOLUTION_OPTIMAL;
    case SolveStatus::Feasible:
        return CFN_SOLUTION_FEASIBLE;
    case SolveStatus::Infeasible:
        break;
    }
    return CFN_SOLUTION_INFEASIBLE;
}

double cfn_solution_objective(const cfn_solution* solution)
{
    return solution ? solution->solution.objective : 0.0;
}

double cfn_solution_gap(const cfn_solution* solution)
{
    return solution ? solution->solution.gap : 0.0;
}

int64_t cfn_solution_nodes_explored(const cfn_solution* solution)
{
    return solution ? solution->solution.nodes_explored : 0;
}

const char* cfn_solution_message(const cfn_solution* solution)
{
    return solution ? solution->solution.message.c_str() : "";
}

const char* cfn_solution_node_of(const cfn_solution* solution, size_t vsr, size_t vm)
{
    if (!solution || solution->solution.status == SolveStatus::Infeasible)
        return nullptr;
    const auto& assign = solution->solution.placement.assign;
    if (vsr >= assign.size() || vm >= assign[vsr].size())
        return nullptr;
    return solution->substrate->node(assign[vsr][vm]).id.c_str();
}

cfn_status cfn_solution_to_json(const cfn_solution* solution, char** out)
{
    CFN_REQUIRE(solution && out);
    return guard([&] {
        *out = dup(solution_to_json(*solution->substrate, solution->vsrs, solution->solution));
        return CFN_OK;
    });
}

cfn_status cfn_solution_check(const cfn_solution* solution, int* feasible, double* objective)
{
    CFN_REQUIRE(solution && feasible && objective);
    return guard([&] {
        if (solution->solution.status == SolveStatus::Infeasible)
            return fail(CFN_INFEASIBLE, "solution is infeasible");
        const SolutionCheckReport r = check_placement_model(*solution->substrate, solution->vsrs,
                                                            solution->solution.placement, solution->power);
        *feasible = r.feasible ? 1 : 0;
        *objective = r.objective;
        return CFN_OK;
    });
}

void cfn_solution_free(cfn_solution* solution)
{
    delete solution;
}

cfn_status cfn_evaluate(const cfn_topology* topology, const cfn_vsr_batch* vsrs, const char* assignment_json,
                        const char* traffic_counting, double* total)
{
    CFN_REQUIRE(topology && vsrs && assignment_json && total);
    return guard([&] {
        const Substrate& sub = substrate_of(topology);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(assignment_json);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed assignment: ") + e.what());
        }
        std::map<std::pair<int, int>, std::string> a;
        try {
            for (const auto& e : j.at("assignment"))
                a[{e.at("vsr").get<int>(), e.at("vm").get<int>()}] = e.at("node").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed assignment: ") + e.what());
        }
        const Placement p = make_placement(sub, vsrs->vsrs, a);
        *total = evaluate_placement(sub, vsrs->vsrs, p, power_options(traffic_counting)).total;
        return CFN_OK;
    });
}

cfn_status cfn_export_lp(const cfn_topology* topology, const cfn_vsr_batch* vsrs, const char* traffic_counting,
                         const char* path)
{
    CFN_REQUIRE(topology && vsrs && path);
    return guard([&] {
        export_lp(formulate(substrate_of(topology), vsrs->vsrs, power_options(traffic_counting)), path);
        return CFN_OK;
    });
}

cfn_status cfn_model_lp(const cfn_topology* topology, const cfn_vsr_batch* vsrs, const char* traffic_counting,
                        char** out)
{
    CFN_REQUIRE(topology && vsrs && out);
    return guard([&] {
        *out = dup(to_lp(formulate(substrate_of(topology), vsrs->vsrs, power_options(traffic_counting))));
        return CFN_OK;
    });
}

cfn_status cfn_scenario_load(const char* path, cfn_scenario** out)
{
    CFN_REQUIRE(path && out);
    return guard([&] {
        auto h = std::make_unique<cfn_scenario>();
        h->scenario = load_scenario(path);
        check_scenario(h->scenario);
        *out = h.release();
        return CFN_OK;
    });
}

cfn_status cfn_scenario_from_json(const char* json, const char* base_dir, cfn_scenario** out)
{
    CFN_REQUIRE(json && out);
    return guard([&] {
        auto h = std::make_unique<cfn_scenario>();
        h->scenario = scenario_from_json(json, base_dir ? base_dir : ".");
        check_scenario(h->scenario);
        *out = h.release();
        return CFN_OK;
    });
}

const char* cfn_scenario_output(const cfn_scenario* scenario)
{
    return scenario ? scenario->scenario.output.c_str() : "";
}

void cfn_scenario_free(cfn_scenario* scenario)
{
    delete scenario;
}

cfn_status cfn_sweep_run(const cfn_scenario* scenario, cfn_result_table** out)
{
    CFN_REQUIRE(scenario && out);
    return guard([&] {
        auto h = std::make_unique<cfn_result_table>();
        h->table = run_sweep(scenario->scenario);
        *out = h.release();
        return CFN_OK;
    });
}

size_t cfn_result_rows(const cfn_result_table* table)
{
    return table ? table->table.rows.size() : 0;
}

cfn_status cfn_result_csv(const cfn_result_table* table, char** out)
{
    CFN_REQUIRE(table && out);
    return guard([&] {
        *out = dup(to_csv(table->table));
        return CFN_OK;
    });
}

cfn_status cfn_result_write_csv(const cfn_result_table* table, const char* path)
{
    CFN_REQUIRE(table && path);
    return guard([&] {
        write_csv(table->table, std::string(path));
        return CFN_OK;
    });
}

cfn_status cfn_result_savings(const cfn_result_table* table, const char* baseline, const char* subject, double* avg,
                              double* min, double* max, char** line)
{
    CFN_REQUIRE(table && baseline && subject);
    return guard([&] {
        const SavingsSummary s = savings_summary(table->table, baseline, subject);
        if (avg)
            *avg = s.avg;
        if (min)
            *min = s.min;
        if (max)
            *max = s.max;
        if (line)
            *line = dup(format_summary(s, baseline, subject));
        return CFN_OK;
    });
}

void cfn_result_free(cfn_result_table* table)
{
    delete table;
}

cfn_status cfn_validate_file(const char* path, const char** kind, size_t* violations, char** report)
{
    CFN_REQUIRE(path && violations);
    return guard([&] {
        const std::filesystem::path p(path);
        DocumentKind k = DocumentKind::Topology;
        const ValidationReport r =
            validate_document(read_text_file(path), p.has_parent_path() ? p.parent_path().string() : ".", &k);
        if (kind)
            *kind = k == DocumentKind::Topology ? "topology" : k == DocumentKind::VsrBatch ? "vsrs" : "scenario";
        *violations = r.size();
        if (report)
            *report = dup(report_text(r));
        return CFN_OK;
    });
}

} // extern "C"
