/* Copyright 2026 The cfnembed Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the cfnembed library. Objects are opaque handles released
 * with the matching *_free function. Every fallible call returns a
 * cfn_status; on failure cfn_last_error() describes the problem (per thread).
 * Strings returned through char** out-parameters are owned by the caller and
 * released with cfn_string_free.
 */
#ifndef CFNEMBED_H
#define CFNEMBED_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CFN_BUILDING_LIBRARY)
#    define CFN_API __declspec(dllexport)
#  else
#    define CFN_API __declspec(dllimport)
#  endif
#else
#  define CFN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cfn_status {
    CFN_OK = 0,
    CFN_INVALID_ARGUMENT = 1,
    CFN_CONFIG = 2,
    CFN_PARSE = 3,
    CFN_IO = 4,
    CFN_CAPACITY = 5,
    CFN_NO_PATH = 6,
    CFN_INFEASIBLE = 7,
    CFN_SEARCH_LIMIT = 8,
    CFN_INTERNAL = 9
} cfn_status;

typedef enum cfn_solution_status {
    CFN_SOLUTION_OPTIMAL = 0,
    CFN_SOLUTION_FEASIBLE = 1,
    CFN_SOLUTION_INFEASIBLE = 2
} cfn_solution_status;

typedef struct cfn_topology cfn_topology;
typedef struct cfn_vsr_batch cfn_vsr_batch;
typedef struct cfn_solution cfn_solution;
typedef struct cfn_scenario cfn_scenario;
typedef struct cfn_result_table cfn_result_table;

CFN_API const char* cfn_version(void);
CFN_API const char* cfn_last_error(void);
CFN_API const char* cfn_status_name(cfn_status status);
CFN_API void cfn_string_free(char* text);

/* Topologies. */
CFN_API cfn_status cfn_topology_default(int iot_count, int zone_count, uint64_t seed, cfn_topology** out);
CFN_API cfn_status cfn_topology_from_json(const char* json, cfn_topology** out);
CFN_API cfn_status cfn_topology_load(const char* path, cfn_topology** out);
CFN_API cfn_status cfn_topology_to_json(const cfn_topology* topology, char** out);
CFN_API size_t cfn_topology_node_count(const cfn_topology* topology);
/* Number of violations; 0 means valid. The report text goes to *report when non-null. */
CFN_API cfn_status cfn_topology_validate(const cfn_topology* topology, size_t* violations, char** report);
/* Minimum-power path as a JSON array of node ids. */
CFN_API cfn_status cfn_topology_path(const cfn_topology* topology, const char* from, const char* to, char** out);
CFN_API void cfn_topology_free(cfn_topology* topology);

/* VSR batches. */
CFN_API cfn_status cfn_vsrs_generate(const cfn_topology* topology, int vsr_count, int vms_per_vsr, uint64_t seed,
                                     const char* source_iot, cfn_vsr_batch** out);
CFN_API cfn_status cfn_vsrs_from_json(const char* json, cfn_vsr_batch** out);
CFN_API cfn_status cfn_vsrs_load(const char* path, cfn_vsr_batch** out);
CFN_API cfn_status cfn_vsrs_to_json(const cfn_vsr_batch* vsrs, char** out);
CFN_API size_t cfn_vsrs_count(const cfn_vsr_batch* vsrs);
CFN_API cfn_status cfn_vsrs_validate(const cfn_vsr_batch* vsrs, const cfn_topology* topology, size_t* violations,
                                     char** report);
CFN_API void cfn_vsrs_free(cfn_vsr_batch* vsrs);

/* Solving. `strategy_json` is a strategy name ("bnb", "enumeration",
 * "heuristic", "cfn", "cdc", "af", "mf") or an object such as
 * {"kind":"bnb","node_limit":100000}. `traffic_counting` is
 * "paper-literal", "count-once" or NULL for the default.
 * An infeasible instance still yields a solution handle; the return value is
 * then CFN_INFEASIBLE. */
CFN_API cfn_status cfn_solve(const cfn_topology* topology, const cfn_vsr_batch* vsrs, const char* strategy_json,
                             const char* traffic_counting, cfn_solution** out);
CFN_API cfn_solution_status cfn_solution_status_of(const cfn_solution* solution);
CFN_API double cfn_solution_objective(const cfn_solution* solution);
CFN_API double cfn_solution_gap(const cfn_solution* solution);
CFN_API int64_t cfn_solution_nodes_explored(const cfn_solution* solution);
CFN_API const char* cfn_solution_message(const cfn_solution* solution);
/* Node id hosting VM `vm` of the VSR at position `vsr`; NULL when out of range. */
CFN_API const char* cfn_solution_node_of(const cfn_solution* solution, size_t vsr, size_t vm);
CFN_API cfn_status cfn_solution_to_json(const cfn_solution* solution, char** out);
/* Builds the MILP for the solution's instance and checks the placement.
 * *feasible receives 1/0, *objective the model objective. */
CFN_API cfn_status cfn_solution_check(const cfn_solution* solution, int* feasible, double* objective);
CFN_API void cfn_solution_free(cfn_solution* solution);

/* Power of an explicit placement given as
 * {"assignment":[{"vsr":0,"vm":1,"node":"cdc"}, ...]} (VSR position, VM id). */
CFN_API cfn_status cfn_evaluate(const cfn_topology* topology, const cfn_vsr_batch* vsrs, const char* assignment_json,
                                const char* traffic_counting, double* total);

/* LP export of the full model. */
CFN_API cfn_status cfn_export_lp(const cfn_topology* topology, const cfn_vsr_batch* vsrs, const char* traffic_counting,
                                 const char* path);
CFN_API cfn_status cfn_model_lp(const cfn_topology* topology, const cfn_vsr_batch* vsrs, const char* traffic_counting,
                                char** out);

/* Scenarios and sweeps. */
CFN_API cfn_status cfn_scenario_load(const char* path, cfn_scenario** out);
CFN_API cfn_status cfn_scenario_from_json(const char* json, const char* base_dir, cfn_scenario** out);
CFN_API const char* cfn_scenario_output(const cfn_scenario* scenario);
CFN_API void cfn_scenario_free(cfn_scenario* scenario);

CFN_API cfn_status cfn_sweep_run(const cfn_scenario* scenario, cfn_result_table** out);
CFN_API size_t cfn_result_rows(const cfn_result_table* table);
CFN_API cfn_status cfn_result_csv(const cfn_result_table* table, char** out);
CFN_API cfn_status cfn_result_write_csv(const cfn_result_table* table, const char* path);
/* Summary line such as "CFN vs CDC savings: avg=...% min=...% max=...%". */
CFN_API cfn_status cfn_result_savings(const cfn_result_table* table, const char* baseline, const char* subject,
                                      double* avg, double* min, double* max, char** line);
CFN_API void cfn_result_free(cfn_result_table* table);

/* Detects whether a JSON file is a topology, VSR batch or scenario and
 * validates it. *kind receives "topology", "vsrs" or "scenario" (static). */
CFN_API cfn_status cfn_validate_file(const char* path, const char** kind, size_t* violations, char** report);

#ifdef __cplusplus
}
#endif

#endif
