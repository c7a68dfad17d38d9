// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/errors.hpp"
#include "cfnembed/solver.hpp"
#include "rng.hpp"
#include "solver_common.hpp"

#include <algorithm>
#include <cmath>

namespace cfn {

namespace {

bool improves(double candidate, double current)
{
    return candidate < current - 1e-9 * std::max(1.0, std::abs(current));
}

// Places each VM of `order` where the running total grows least.
bool greedy(detail::SearchState& state, const std::vector<int>& order, const std::vector<NodeIndex>& cands)
{
    for (int v : order) {
        NodeIndex best_node = -1;
        double best = detail::kInfinity;
        for (NodeIndex c : cands) {
            const std::size_t m = state.mark();
            if (state.assign(v, c) && state.total() < best) {
                best = state.total();
                best_node = c;
            }
            state.rollback(m);
        }
        if (best_node < 0 || !state.assign(v, best_node))
            return false;
        state.commit();
    }
    return true;
}

void local_search(detail::SearchState& state, const std::vector<int>& order, const std::vector<NodeIndex>& cands,
                  Neighborhood neighborhood, std::int64_t& budget)
{
    bool improved = true;
    while (improved && budget > 0) {
        improved = false;
        for (int v : order) {
            for (NodeIndex c : cands) {
                if (budget <= 0)
                    return;
                const NodeIndex from = state.where(v);
                if (c == from)
                    continue;
                --budget;
                const double before = state.total();
                const std::size_t m = state.mark();
                state.unassign(v);
                if (state.assign(v, c) && improves(state.total(), before)) {
                    state.commit();
                    improved = true;
                } else {
                    state.rollback(m);
                }
            }
        }
        if (neighborhood != Neighborhood::RelocateSwap)
            continue;
        for (std::size_t i = 0; i < order.size(); ++i)
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                if (budget <= 0)
                    return;
                const int a = order[i];
                const int b = order[j];
                const NodeIndex pa = state.where(a);
                const NodeIndex pb = state.where(b);
                if (pa == pb)
                    continue;
                --budget;
                const double before = state.total();
                const std::size_t m = state.mark();
                state.unassign(a);
                state.unassign(b);
                if (state.assign(a, pb) && state.assign(b, pa) && improves(state.total(), before)) {
                    state.commit();
                    improved = true;
                } else {
                    state.rollback(m);
                }
            }
    }
}

} // namespace

void detail::polish(detail::SearchState& state, const std::vector<NodeIndex>& cands, Neighborhood neighborhood,
                    std::int64_t budget)
{
    local_search(state, detail::free_vms(state), cands, neighborhood, budget);
}

Solution solve_heuristic(const Substrate& sub, std::span<const Vsr> vsrs, const HeuristicParams& params,
                         const SolveOptions& options)
{
    detail::Stopwatch clock;
    if (params.restarts < 0 || params.move_budget < 0)
        throw ConfigError("heuristic restarts and move_budget must be >= 0");
    for (const Vsr& v : vsrs)
        if (!validate_vsr(v, sub.topology()).empty())
            throw InputError("invalid VSR " + std::to_string(v.id));

    Solution out;
    const auto cands = detail::resolve_candidates(sub, options);
    detail::SearchState base(sub, vsrs, options.power);
    std::string failure;
    if (!detail::pin_inputs(base, &failure)) {
        out.message = failure;
        out.wall_time = clock.seconds();
        return out;
    }
    const std::vector<int> initial = detail::free_vms(base);
    detail::Rng rng(params.seed);
    std::int64_t budget = params.move_budget;

    double best = detail::kInfinity;
    Placement best_placement;
    for (int attempt = 0; attempt <= params.restarts; ++attempt) {
        std::vector<int> order = initial;
        if (attempt > 0)
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng.below(i)]);
        detail::SearchState state = base;
        if (!greedy(state, order, cands))
            continue;
        local_search(state, order, cands, params.neighborhood, budget);
        Placement p = state.placement();
        PowerBreakdown b;
        if (detail::evaluate_unchecked(sub, vsrs, p, options.power, b, nullptr) && b.total < best) {
            best = b.total;
            best_placement = std::move(p);
        }
    }
    out.nodes_explored = params.move_budget - budget;
    if (best == detail::kInfinity) {
        out.message = "infeasible: greedy construction found no feasible completion";
    } else {
        detail::finish(sub, vsrs, std::move(best_placement), options.power, out);
        out.status = SolveStatus::Feasible;
        const double lb = root_lower_bound(sub, vsrs, options);
        out.gap = out.objective > 0.0 ? std::max(0.0, (out.objective - lb) / out.objective) : 0.0;
    }
    out.wall_time = clock.seconds();
    return out;
}

} // namespace cfn
