// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/solver.hpp"

#include "cfnembed/errors.hpp"
#include "solver_common.hpp"

#include <algorithm>
#include <cmath>

namespace cfn {

namespace detail {

std::vector<NodeIndex> resolve_candidates(const Substrate& sub, const SolveOptions& options)
{
    std::vector<NodeIndex> out = options.candidates.empty() ? sub.processing_nodes() : options.candidates;
    for (NodeIndex c : out)
        if (c < 0 || static_cast<std::size_t>(c) >= sub.size() || !sub.node(c).is_processing())
            throw InputError("candidate index " + std::to_string(c) + " is not a processing node");
    std::sort(out.begin(), out.end(), [&](NodeIndex a, NodeIndex b) { return sub.node(a).id < sub.node(b).id; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool pin_inputs(SearchState& state, std::string* failure)
{
    const auto& vms = state.vms();
    for (std::size_t i = 0; i < vms.size(); ++i) {
        if (!vms[i].input)
            continue;
        if (!state.assign(static_cast<int>(i), vms[i].source)) {
            if (failure)
                *failure = "input VM of VSR position " + std::to_string(vms[i].vsr) + " does not fit on '"
                         + state.substrate().node(vms[i].source).id + "'";
            return false;
        }
    }
    state.commit();
    return true;
}

std::vector<int> free_vms(const SearchState& state)
{
    std::vector<int> out;
    for (std::size_t i = 0; i < state.vms().size(); ++i)
        if (!state.vms()[i].input)
            out.push_back(static_cast<int>(i));
    return out;
}

void finish(const Substrate& sub, std::span<const Vsr> vsrs, Placement placement, const PowerOptions& options,
            Solution& out)
{
    complete_routes(sub, vsrs, placement);
    out.breakdown = evaluate_placement(sub, vsrs, placement, options);
    out.objective = out.breakdown.total;
    out.placement = std::move(placement);
}

std::string capacity_failure(const Substrate& sub, std::span<const Vsr> vsrs, const Placement& placement,
                             const PowerOptions& options)
{
    PowerBreakdown scratch;
    std::string failure;
    if (detail::evaluate_unchecked(sub, vsrs, placement, options, scratch, &failure))
        return {};
    return failure;
}

bool strictly_better(double candidate, double incumbent)
{
    return candidate < incumbent;
}

} // namespace detail

namespace {

void check_batch(const Substrate& sub, std::span<const Vsr> vsrs)
{
    for (const Vsr& v : vsrs) {
        const ValidationReport report = validate_vsr(v, sub.topology());
        if (!report.empty()) {
            std::string msg = "invalid VSR batch:";
            for (const Violation& x : report)
                msg += "\n  " + x.message;
            throw InputError(msg);
        }
    }
}

struct Enumerator
{
    detail::SearchState& state;
    const std::vector<int>& order;
    const std::vector<NodeIndex>& cands;
    const Substrate& sub;
    std::span<const Vsr> vsrs;
    const PowerOptions& power;

    double best = detail::kInfinity;
    Placement best_placement;
    std::int64_t leaves = 0;

    void run(std::size_t depth)
    {
        if (depth == order.size()) {
            ++leaves;
            // The incremental total only filters; the exact evaluator decides.
            if (state.total() > best + 1e-9 * std::max(1.0, std::abs(best)))
                return;
            Placement p = state.placement();
            PowerBreakdown b;
            if (!detail::evaluate_unchecked(sub, vsrs, p, power, b, nullptr))
                return;
            if (detail::strictly_better(b.total, best)) {
                best = b.total;
                best_placement = std::move(p);
            }
            return;
        }
        for (NodeIndex c : cands) {
            const std::size_t m = state.mark();
            if (state.assign(order[depth], c))
                run(depth + 1);
            state.rollback(m);
        }
    }
};

} // namespace

std::string_view to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::Feasible:
        return "feasible";
    case SolveStatus::Infeasible:
        return "infeasible";
    }
    return "?";
}

std::string_view to_string(Layer layer)
{
    switch (layer) {
    case Layer::CDC:
        return "CDC";
    case Layer::AF:
        return "AF";
    case Layer::MF:
        return "MF";
    }
    return "?";
}

NodeKind layer_kind(Layer layer)
{
    switch (layer) {
    case Layer::CDC:
        return NodeKind::CDC;
    case Layer::AF:
        return NodeKind::AF;
    case Layer::MF:
        return NodeKind::MF;
    }
    return NodeKind::CDC;
}

double enumeration_size(const Substrate& sub, std::span<const Vsr> vsrs, const SolveOptions& options)
{
    const auto cands = detail::resolve_candidates(sub, options);
    double free = 0;
    for (const Vsr& v : vsrs)
        for (const VmNode& vm : v.vms)
            if (!vm.is_input)
                ++free;
    return std::pow(static_cast<double>(cands.size()), free);
}

Solution solve_exact_enumeration(const Substrate& sub, std::span<const Vsr> vsrs, const EnumerationParams& params,
                                 const SolveOptions& options)
{
    detail::Stopwatch clock;
    check_batch(sub, vsrs);
    if (params.max_configurations == 0)
        throw ConfigError("max_configurations must be positive");
    const double size = enumeration_size(sub, vsrs, options);
    if (size > static_cast<double>(params.max_configurations))
        throw SearchSpaceTooLarge(size, params.max_configurations);

    Solution out;
    detail::SearchState state(sub, vsrs, options.power);
    std::string failure;
    if (!detail::pin_inputs(state, &failure)) {
        out.message = failure;
        out.wall_time = clock.seconds();
        return out;
    }
    const auto cands = detail::resolve_candidates(sub, options);
    const auto order = detail::free_vms(state);
    Enumerator e{state, order, cands, sub, vsrs, options.power, detail::kInfinity, {}, 0};
    e.run(0);
    out.nodes_explored = e.leaves;
    if (e.best == detail::kInfinity) {
        out.message = "infeasible: no feasible assignment";
    } else {
        detail::finish(sub, vsrs, std::move(e.best_placement), options.power, out);
        out.status = SolveStatus::Optimal;
    }
    out.wall_time = clock.seconds();
    return out;
}

Solution solve_fixed_layer(const Substrate& sub, std::span<const Vsr> vsrs, const FixedLayerParams& params,
                           const SolveOptions& options)
{
    detail::Stopwatch clock;
    check_batch(sub, vsrs);
    const NodeKind kind = layer_kind(params.layer);
    std::vector<NodeIndex> layer;
    for (NodeIndex p : sub.processing_nodes())
        if (sub.node(p).kind == kind)
            layer.push_back(p);
    std::sort(layer.begin(), layer.end(), [&](NodeIndex a, NodeIndex b) { return sub.node(a).id < sub.node(b).id; });
    if (layer.empty())
        throw ConfigError("topology has no " + std::string(to_string(params.layer)) + " node");

    Solution out;
    detail::SearchState state(sub, vsrs, options.power);
    std::string failure;
    if (!detail::pin_inputs(state, &failure)) {
        out.message = failure;
        out.wall_time = clock.seconds();
        return out;
    }
    const auto& vms = state.vms();
    for (std::size_t r = 0; r < vsrs.size(); ++r) {
        bool placed = false;
        for (NodeIndex node : layer) {
            const std::size_t m = state.mark();
            bool ok = true;
            for (std::size_t j = 0; j < vsrs[r].vms.size() && ok; ++j) {
                const int v = state.vm_index(static_cast<int>(r), static_cast<int>(j));
                if (!vms[static_cast<std::size_t>(v)].input)
                    ok = state.assign(v, node);
            }
            if (ok) {
                placed = true;
                break;
            }
            state.rollback(m);
        }
        if (!placed) {
            // Report the first violated node with the VSR forced onto the layer.
            Placement p = state.placement();
            p.assign.resize(r + 1);
            for (std::size_t j = 0; j < vsrs[r].vms.size(); ++j)
                if (!vsrs[r].vms[j].is_input)
                    p.assign[r][j] = layer.front();
            std::string why = detail::capacity_failure(sub, vsrs.first(r + 1), p, options.power);
            if (why.empty())
                why = "node '" + sub.node(layer.front()).id + "': capacity exceeded";
            out.message = "infeasible: " + std::string(to_string(params.layer)) + " layer cannot host VSR "
                        + std::to_string(vsrs[r].id) + "; " + why;
            out.wall_time = clock.seconds();
            return out;
        }
        state.commit();
    }
    detail::finish(sub, vsrs, state.placement(), options.power, out);
    out.status = SolveStatus::Feasible;
    out.wall_time = clock.seconds();
    return out;
}

Solution solve(const Substrate& sub, std::span<const Vsr> vsrs, const Strategy& strategy, const SolveOptions& options)
{
    return std::visit(
        [&](const auto& params) -> Solution {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, EnumerationParams>)
                return solve_exact_enumeration(sub, vsrs, params, options);
            else if constexpr (std::is_same_v<T, BranchAndBoundParams>)
                return solve_branch_and_bound(sub, vsrs, params, options);
            else if constexpr (std::is_same_v<T, HeuristicParams>)
                return solve_heuristic(sub, vsrs, params, options);
            else
                return solve_fixed_layer(sub, vsrs, params, options);
        },
        strategy);
}

} // namespace cfn
