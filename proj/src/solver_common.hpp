// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_SRC_SOLVER_COMMON_HPP
#define CFNEMBED_SRC_SOLVER_COMMON_HPP

#include "cfnembed/solver.hpp"
#include "search_state.hpp"

#include <chrono>
#include <limits>

namespace cfn::detail {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class Stopwatch
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Candidate nodes for free VMs, sorted by id. Throws InputError on
/// non-processing entries.
std::vector<NodeIndex> resolve_candidates(const Substrate& substrate, const SolveOptions& options);

/// Checks every VSR and pins the input VMs; throws InputError on bad batches.
/// Returns false if an input VM does not fit on its source.
bool pin_inputs(SearchState& state, std::string* failure);

/// Flat indices of the non-input VMs in (vsr, vm) order.
std::vector<int> free_vms(const SearchState& state);

/// Evaluates the placement exactly and fills the solution fields.
void finish(const Substrate& substrate, std::span<const Vsr> vsrs, Placement placement, const PowerOptions& options,
            Solution& out);

/// Diagnostic naming the node that rejects a placement.
std::string capacity_failure(const Substrate& substrate, std::span<const Vsr> vsrs, const Placement& placement,
                             const PowerOptions& options);

bool strictly_better(double candidate, double incumbent);

/// Local search from the current complete assignment of `state`.
void polish(SearchState& state, const std::vector<NodeIndex>& cands, Neighborhood neighborhood,
            std::int64_t budget);

} // namespace cfn::detail

#endif
