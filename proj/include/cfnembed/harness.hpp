// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_HARNESS_HPP
#define CFNEMBED_HARNESS_HPP

#include "cfnembed/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cfn {

struct SweepRange
{
    int from = 1;
    int to = 20;
    int step = 1;
};

/// Strategy labels accepted by a scenario:
///   CFN        exact (branch-and-bound, enumeration fallback)
///   CDC/AF/MF  fixed-layer baselines
///   HEURISTIC  greedy + local search
struct Scenario
{
    CfnTopology topology = build_default_cfn();
    WorkloadSpec workload; // vsr_count and seed are set per sweep point
    std::vector<std::string> strategies{"CFN", "CDC", "AF", "MF"};
    SweepRange sweep;
    std::uint64_t base_seed = 1;
    std::string output = "results.csv";
    PowerOptions power;
    bool record_timing = false;
    int threads = 1;
    BranchAndBoundParams bnb;
    HeuristicParams heuristic;
    EnumerationParams enumeration;
};

/// Throws ConfigError listing what is wrong.
void check_scenario(const Scenario& scenario);

/// The VSR batch of one sweep point, drawn with seed base_seed + vsr_count.
std::vector<Vsr> sweep_batch(const Scenario& scenario, int vsr_count);

/// Solves one batch with a labelled strategy.
Solution run_strategy(const Substrate& substrate, std::span<const Vsr> vsrs, const std::string& strategy,
                      const Scenario& scenario);

struct ResultRow
{
    int vsr_count = 0;
    std::string strategy;
    SolveStatus status = SolveStatus::Infeasible;
    double total_w = 0.0;
    double net_prop_w = 0.0;
    double net_idle_w = 0.0;
    double pr_prop_w = 0.0;
    double pr_idle_w = 0.0;
    double lan_w = 0.0;
    double omega_iot = 0.0;
    double omega_af = 0.0;
    double omega_mf = 0.0;
    double omega_cdc = 0.0;
    double wall_time_s = 0.0;
    Solution solution; // not serialized

    bool solved() const { return status != SolveStatus::Infeasible; }
};

struct ResultTable
{
    std::vector<ResultRow> rows;

    /// Row for (vsr_count, strategy) or nullptr.
    const ResultRow* find(int vsr_count, const std::string& strategy) const;
};

ResultRow make_row(const Substrate& substrate, int vsr_count, const std::string& strategy, const Solution& solution,
                   bool record_timing);

/// Runs every strategy at every sweep point. Rows are ordered by
/// (vsr_count, position of the strategy in the scenario).
ResultTable run_sweep(const Scenario& scenario);

struct SavingsSummary
{
    double avg = 0.0;
    double min = 0.0;
    double max = 0.0;
    int points = 0;
};

/// Per-point saving 100 * (1 - subject / baseline) over the points where both
/// strategies are solved. Throws InputError when there is none.
SavingsSummary savings_summary(const ResultTable& table, const std::string& baseline, const std::string& subject);

std::string format_summary(const SavingsSummary& summary, const std::string& baseline, const std::string& subject);

inline constexpr const char* kCsvHeader = "vsr_count,strategy,status,total_w,net_prop_w,net_idle_w,pr_prop_w,"
                                          "pr_idle_w,lan_w,omega_iot,omega_af,omega_mf,omega_cdc,wall_time_s";

/// Throws InputError on an empty table.
void write_csv(const ResultTable& table, std::ostream& out);
/// Throws IoError when the destination cannot be written.
void write_csv(const ResultTable& table, const std::string& path);
std::string to_csv(const ResultTable& table);

/// Parses CSV written by write_csv. Throws ParseError.
ResultTable read_csv(std::string_view text);

} // namespace cfn

#endif
