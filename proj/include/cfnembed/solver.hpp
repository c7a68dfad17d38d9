// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_SOLVER_HPP
#define CFNEMBED_SOLVER_HPP

#include "cfnembed/power.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cfn {

enum class SolveStatus
{
    Optimal,
    Feasible,
    Infeasible,
};

std::string_view to_string(SolveStatus status);

struct Solution
{
    Placement placement;
    PowerBreakdown breakdown;
    double objective = 0.0; // == breakdown.total; 0 when infeasible
    SolveStatus status = SolveStatus::Infeasible;
    double gap = 0.0;       // relative, against the best known lower bound
    std::int64_t nodes_explored = 0;
    double wall_time = 0.0; // seconds
    std::string message;    // diagnostic, e.g. the overloaded node
};

struct EnumerationParams
{
    std::uint64_t max_configurations = 10'000'000;
};

enum class BoundMode
{
    Full,      // committed cost plus a relaxation of the remaining demand
    Committed, // committed cost only
    None,      // no pruning at all
};

struct BranchAndBoundParams
{
    double epsilon = 0.0; // relative optimality tolerance
    std::int64_t node_limit = 20'000'000;
    BoundMode bound = BoundMode::Full;
    bool warm_start = true; // seed the incumbent with the heuristic
};

enum class Neighborhood
{
    Relocate,
    RelocateSwap,
};

struct HeuristicParams
{
    std::uint64_t seed = 1;
    int restarts = 0;
    Neighborhood neighborhood = Neighborhood::Relocate;
    std::int64_t move_budget = 1'000'000;
};

enum class Layer
{
    CDC,
    AF,
    MF,
};

std::string_view to_string(Layer layer);
NodeKind layer_kind(Layer layer);

struct FixedLayerParams
{
    Layer layer = Layer::CDC;
};

using Strategy = std::variant<EnumerationParams, BranchAndBoundParams, HeuristicParams, FixedLayerParams>;

struct SolveOptions
{
    PowerOptions power;
    /// Nodes a non-input VM may use; empty means every processing node.
    std::vector<NodeIndex> candidates;
};

/// Exhaustive search over all assignments of non-input VMs to the candidate
/// nodes. Ties go to the lexicographically smallest (vsr, vm, node id)
/// assignment vector. Throws SearchSpaceTooLarge above the limit.
Solution solve_exact_enumeration(const Substrate& substrate, std::span<const Vsr> vsrs,
                                 const EnumerationParams& params = {}, const SolveOptions& options = {});

/// Depth-first branch-and-bound over VM assignments.
Solution solve_branch_and_bound(const Substrate& substrate, std::span<const Vsr> vsrs,
                                const BranchAndBoundParams& params = {}, const SolveOptions& options = {});

/// Greedy construction followed by relocation/swap local search.
Solution solve_heuristic(const Substrate& substrate, std::span<const Vsr> vsrs, const HeuristicParams& params = {},
                         const SolveOptions& options = {});

/// Baseline: every non-input VM at the processing node(s) of one layer.
Solution solve_fixed_layer(const Substrate& substrate, std::span<const Vsr> vsrs, const FixedLayerParams& params,
                           const SolveOptions& options = {});

Solution solve(const Substrate& substrate, std::span<const Vsr> vsrs, const Strategy& strategy,
               const SolveOptions& options = {});

/// Relaxation lower bound on the optimum, the same one branch-and-bound uses
/// at its root. +infinity when the demand cannot fit at all.
double root_lower_bound(const Substrate& substrate, std::span<const Vsr> vsrs, const SolveOptions& options = {});

/// Number of assignments exhaustive search would visit.
double enumeration_size(const Substrate& substrate, std::span<const Vsr> vsrs, const SolveOptions& options = {});

} // namespace cfn

#endif
