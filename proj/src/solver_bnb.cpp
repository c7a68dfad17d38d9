// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/errors.hpp"
#include "cfnembed/solver.hpp"
#include "solver_common.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cfn {

namespace {

using detail::kInfinity;
using detail::SearchState;

bool interchangeable(const Substrate& sub, NodeIndex a, NodeIndex b)
{
    const Node& x = sub.node(a);
    const Node& y = sub.node(b);
    return x.kind == y.kind && x.device == y.device && x.server == y.server && x.server_count_max == y.server_count_max
        && x.lan == y.lan && x.pue_net == y.pue_net && x.pue_pr == y.pue_pr && sub.neighbors(a) == sub.neighbors(b);
}

// Metered nodes whose removal disconnects s from c.
std::vector<NodeIndex> separators(const Substrate& sub, NodeIndex s, NodeIndex c)
{
    std::vector<NodeIndex> out;
    if (s == c)
        return out;
    std::vector<char> seen(sub.size());
    std::vector<NodeIndex> stack;
    for (NodeIndex n : sub.network_nodes()) {
        std::fill(seen.begin(), seen.end(), 0);
        seen[static_cast<std::size_t>(n)] = 1;
        seen[static_cast<std::size_t>(s)] = 1;
        stack.assign(1, s);
        bool reached = false;
        while (!stack.empty() && !reached) {
            const NodeIndex u = stack.back();
            stack.pop_back();
            for (NodeIndex w : sub.neighbors(u)) {
                if (seen[static_cast<std::size_t>(w)])
                    continue;
                if (w == c) {
                    reached = true;
                    break;
                }
                seen[static_cast<std::size_t>(w)] = 1;
                stack.push_back(w);
            }
        }
        if (!reached)
            out.push_back(n);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Lower bound on the cost of completing a partial placement. The committed
// running total is extended by
//   - the cheapest way to spread the remaining GFLOPS, treating it as
//     divisible: idle charges of still inactive exit devices (and of the LAN
//     and first server of unique nodes) are paid in full for every subset of
//     them that is switched on, other idle charges are amortized;
//   - the traffic of links whose unassigned end can no longer join its peer.
class Bounder
{
public:
    Bounder(const SearchState& state, const std::vector<NodeIndex>& cands, const std::vector<int>& order)
        : sub_(state.substrate()), order_(order)
    {
        const auto& vms = state.vms();
        std::set<NodeIndex> sources;
        for (const auto& vm : vms)
            sources.insert(vm.source);
        all_positive_ = true;
        for (const auto& vm : vms)
            for (const auto& l : vm.links)
                if (!(l.gbps > 0.0))
                    all_positive_ = false;

        in_cands_.assign(sub_.size(), false);
        for (NodeIndex c : cands) {
            in_cands_[static_cast<std::size_t>(c)] = true;
            Cand k;
            k.node = c;
            const Node& n = sub_.node(c);
            k.unit = n.pue_pr * energy_per_bit(*n.server);
            k.server_idle = n.pue_pr * n.server->idle_power;
            k.capacity = n.server->capacity;
            k.max_omega = n.server->capacity * n.server_count_max;
            k.lan_idle = n.lan ? n.pue_pr * effective_idle(*n.lan, sub_.idle_share_delta()) : 0.0;
            k.unique = std::none_of(cands.begin(), cands.end(),
                                    [&](NodeIndex o) { return o != c && interchangeable(sub_, c, o); });
            if (all_positive_ && !sources.count(c)) {
                // Metered nodes that every route into or out of c crosses.
                bool first = true;
                std::vector<NodeIndex> common;
                for (NodeIndex q : sub_.processing_nodes()) {
                    if (q == c)
                        continue;
                    for (const auto& route : {sub_.route_metered(c, q), sub_.route_metered(q, c)}) {
                        std::vector<NodeIndex> r = route;
                        std::sort(r.begin(), r.end());
                        if (first) {
                            common = r;
                            first = false;
                        } else {
                            std::vector<NodeIndex> keep;
                            std::set_intersection(common.begin(), common.end(), r.begin(), r.end(),
                                                  std::back_inserter(keep));
                            common.swap(keep);
                        }
                    }
                }
                // A connected request with its input elsewhere also crosses
                // everything separating c from each source.
                first = true;
                std::vector<NodeIndex> cut;
                for (NodeIndex s : sources) {
                    std::vector<NodeIndex> sep = separators(sub_, s, c);
                    if (first) {
                        cut = std::move(sep);
                        first = false;
                    } else {
                        std::vector<NodeIndex> keep;
                        std::set_intersection(cut.begin(), cut.end(), sep.begin(), sep.end(),
                                              std::back_inserter(keep));
                        cut.swap(keep);
                    }
                }
                std::vector<NodeIndex> both;
                std::set_union(common.begin(), common.end(), cut.begin(), cut.end(), std::back_inserter(both));
                k.exits = std::move(both);
            }
            cands_.push_back(std::move(k));
        }

        exit_idle_.assign(sub_.size(), 0.0);
        for (NodeIndex n : sub_.network_nodes()) {
            const Node& node = sub_.node(n);
            exit_idle_[static_cast<std::size_t>(n)] =
                node.pue_net * effective_idle(*node.device, sub_.idle_share_delta());
        }
        bit_of_.assign(sub_.size(), -1);

        min_out_.assign(sub_.size(), kInfinity);
        min_in_.assign(sub_.size(), kInfinity);
        for (NodeIndex b : sub_.processing_nodes())
            for (NodeIndex q : cands) {
                if (q == b)
                    continue;
                min_out_[static_cast<std::size_t>(b)] =
                    std::min(min_out_[static_cast<std::size_t>(b)], route_unit(state, b, q));
                min_in_[static_cast<std::size_t>(b)] =
                    std::min(min_in_[static_cast<std::size_t>(b)], route_unit(state, q, b));
            }

        suffix_.assign(order.size() + 1, 0.0);
        for (std::size_t i = order.size(); i > 0; --i)
            suffix_[i - 1] = suffix_[i] + vms[static_cast<std::size_t>(order[i - 1])].flops;
        suffix_max_.assign(order.size() + 1, 0.0);
        for (std::size_t i = order.size(); i > 0; --i)
            suffix_max_[i - 1] = std::max(suffix_max_[i], vms[static_cast<std::size_t>(order[i - 1])].flops);
        group_cap_.assign(sub_.size(), 0.0);
    }

    /// Lower bound on the total of any completion assigning order[depth..].
    double bound(const SearchState& st, std::size_t depth)
    {
        const double demand = suffix_[depth];
        if (demand <= 0.0)
            return st.total();

        double room = 0.0;
        double largest_room = 0.0;
        for (const Cand& k : cands_) {
            k.residual = std::max(0.0, k.max_omega - st.omega(k.node));
            room += k.residual;
            largest_room = std::max(largest_room, k.residual);
        }
        if (room + kTolerance < demand || largest_room + kTolerance < suffix_max_[depth])
            return kInfinity;

        double extra = exact_charges(st, depth);
        if (extra < 0.0)
            extra = amortized_charges(st, demand);
        if (extra == kInfinity)
            return kInfinity;

        const auto& vms = st.vms();
        for (std::size_t i = depth; i < order_.size(); ++i) {
            const auto& vm = vms[static_cast<std::size_t>(order_[i])];
            for (const auto& l : vm.links) {
                const NodeIndex b = st.where(l.other);
                if (b < 0)
                    continue;
                const bool can_join = in_cands_[static_cast<std::size_t>(b)]
                                   && sub_.node(b).server->capacity * sub_.node(b).server_count_max - st.omega(b)
                                          + kTolerance
                                          >= vm.flops;
                if (!can_join)
                    extra += l.gbps * (l.outgoing ? min_in_[static_cast<std::size_t>(b)]
                                                  : min_out_[static_cast<std::size_t>(b)]);
            }
        }
        return st.total() + extra;
    }

private:
    struct Cand
    {
        NodeIndex node = -1;
        double unit = 0.0;
        double server_idle = 0.0;
        double capacity = 0.0;
        double max_omega = 0.0;
        double lan_idle = 0.0;
        bool unique = false;
        std::vector<NodeIndex> exits;
        mutable double residual = 0.0;
    };

    struct Segment
    {
        double unit;
        double cap;
        std::uint32_t mask;
        std::size_t cand;
    };

    static constexpr int kMaxBits = 20;
    static constexpr std::size_t kMaxUnions = 2048;

    // Fixed charges switched on in full per subset; -1 when there are too many.
    double exact_charges(const SearchState& st, std::size_t depth)
    {
        const double demand = suffix_[depth];
        const double biggest = suffix_max_[depth];
        int bits = 0;
        charge_.clear();
        segs_.clear();
        masks_.clear();
        for (std::size_t i = 0; i < cands_.size(); ++i) {
            const Cand& k = cands_[i];
            if (k.residual <= 0.0)
                continue;
            std::uint32_t mask = 0;
            for (NodeIndex n : k.exits) {
                if (st.network_active(n))
                    continue;
                int& b = bit_of_[static_cast<std::size_t>(n)];
                if (b < 0) {
                    if (bits == kMaxBits)
                        return reset_bits(-1.0);
                    b = bits++;
                    charge_.push_back(exit_idle_[static_cast<std::size_t>(n)]);
                    used_.push_back(n);
                }
                mask |= 1u << b;
            }
            const double omega = st.omega(k.node);
            const bool inactive = st.hosted(k.node) == 0 && st.theta(k.node) <= 0.0;
            const double lan = inactive ? k.lan_idle : 0.0;
            const double open_room = std::min(k.residual, servers_for(omega, k.capacity) * k.capacity - omega);
            if (k.unique && (lan > 0.0 || open_room <= 0.0)) {
                if (bits == kMaxBits)
                    return reset_bits(-1.0);
                const int b = bits++;
                mask |= 1u << b;
                charge_.push_back(lan + (open_room > 0.0 ? 0.0 : k.server_idle));
                used_.push_back(-1);
                if (open_room > 0.0) {
                    segs_.push_back({k.unit, open_room, mask, i});
                    if (k.residual > open_room)
                        segs_.push_back({k.unit + k.server_idle / k.capacity, k.residual - open_room, mask, i});
                } else {
                    const double first = std::min(k.capacity, k.residual);
                    segs_.push_back({k.unit, first, mask, i});
                    if (k.residual > first)
                        segs_.push_back({k.unit + k.server_idle / k.capacity, k.residual - first, mask, i});
                }
            } else {
                const double lan_unit = lan > 0.0 ? lan / std::min(k.residual, demand) : 0.0;
                if (open_room > 0.0)
                    segs_.push_back({k.unit + lan_unit, open_room, mask, i});
                const double fresh = k.residual - std::max(0.0, open_room);
                if (fresh > 0.0)
                    segs_.push_back({k.unit + lan_unit + k.server_idle / std::min(k.capacity, demand), fresh, mask,
                                     i});
            }
            if (std::find(masks_.begin(), masks_.end(), mask) == masks_.end())
                masks_.push_back(mask);
        }
        std::sort(segs_.begin(), segs_.end(), [](const Segment& a, const Segment& b) {
            return a.unit < b.unit || (a.unit == b.unit && a.cand < b.cand);
        });

        unions_.assign(1, 0u);
        for (std::size_t u = 0; u < unions_.size(); ++u)
            for (std::uint32_t m : masks_) {
                const std::uint32_t next = unions_[u] | m;
                if (std::find(unions_.begin(), unions_.end(), next) != unions_.end())
                    continue;
                if (unions_.size() == kMaxUnions)
                    return reset_bits(-1.0);
                unions_.push_back(next);
            }

        const double floor = fill(~0u, demand, 0.0);
        double best = kInfinity;
        for (std::uint32_t a : unions_) {
            double fixed = 0.0;
            for (int b = 0; b < bits; ++b)
                if (a & (1u << b))
                    fixed += charge_[static_cast<std::size_t>(b)];
            if (fixed + floor >= best)
                continue;
            const double cost = fill(a, demand, biggest);
            if (cost < kInfinity)
                best = std::min(best, fixed + cost);
        }
        return reset_bits(best);
    }

    // Cheapest divisible fill of `demand` using segments allowed by `allowed`.
    double fill(std::uint32_t allowed, double demand, double biggest) const
    {
        double left = demand;
        double cost = 0.0;
        double largest = 0.0;
        for (const Segment& s : segs_) {
            if ((s.mask & ~allowed) != 0)
                continue;
            if (left > 0.0) {
                const double take = std::min(s.cap, left);
                cost += s.unit * take;
                left -= take;
            }
            largest = std::max(largest, cands_[s.cand].residual);
            if (left <= 0.0 && largest + kTolerance >= biggest)
                break;
        }
        if (left > kTolerance || largest + kTolerance < biggest)
            return kInfinity;
        return cost;
    }

    double reset_bits(double value)
    {
        for (NodeIndex n : used_)
            if (n >= 0)
                bit_of_[static_cast<std::size_t>(n)] = -1;
        used_.clear();
        return value;
    }

    double amortized_charges(const SearchState& st, double demand)
    {
        if (all_positive_) {
            for (const Cand& k : cands_)
                for (NodeIndex n : k.exits)
                    group_cap_[static_cast<std::size_t>(n)] = 0.0;
            for (const Cand& k : cands_)
                for (NodeIndex n : k.exits)
                    group_cap_[static_cast<std::size_t>(n)] += k.residual;
        }
        segments_.clear();
        for (const Cand& k : cands_) {
            if (k.residual <= 0.0)
                continue;
            const double omega = st.omega(k.node);
            const double open_room = std::min(k.residual, servers_for(omega, k.capacity) * k.capacity - omega);
            double surcharge = 0.0;
            const bool inactive = st.hosted(k.node) == 0 && st.theta(k.node) <= 0.0;
            if (inactive && k.lan_idle > 0.0)
                surcharge += k.lan_idle / std::min(k.residual, demand);
            for (NodeIndex n : k.exits)
                if (!st.network_active(n))
                    surcharge += exit_idle_[static_cast<std::size_t>(n)]
                               / std::min(group_cap_[static_cast<std::size_t>(n)], demand);
            if (open_room > 0.0)
                segments_.emplace_back(k.unit + surcharge, open_room);
            const double fresh = k.residual - std::max(0.0, open_room);
            if (fresh > 0.0)
                segments_.emplace_back(k.unit + surcharge + k.server_idle / std::min(k.capacity, demand), fresh);
        }
        std::sort(segments_.begin(), segments_.end());
        double left = demand;
        double extra = 0.0;
        for (const auto& [unit, cap] : segments_) {
            const double take = std::min(cap, left);
            extra += unit * take;
            left -= take;
            if (left <= 0.0)
                break;
        }
        return extra;
    }

    double route_unit(const SearchState& st, NodeIndex b, NodeIndex e) const
    {
        double u = 0.0;
        for (const auto& [n, count] : st.meter(b, e))
            u += sub_.weight(n) * count;
        return u;
    }

    const Substrate& sub_;
    const std::vector<int>& order_;
    std::vector<Cand> cands_;
    std::vector<bool> in_cands_;
    bool all_positive_ = true;
    std::vector<double> exit_idle_;
    std::vector<int> bit_of_;
    std::vector<NodeIndex> used_;
    std::vector<double> charge_;
    std::vector<Segment> segs_;
    std::vector<std::uint32_t> masks_, unions_;
    std::vector<double> min_out_, min_in_;
    std::vector<double> suffix_, suffix_max_;
    std::vector<double> group_cap_;
    std::vector<std::pair<double, double>> segments_;
};

std::vector<int> branch_order(const SearchState& st)
{
    std::vector<int> order = detail::free_vms(st);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return st.vms()[static_cast<std::size_t>(a)].flops > st.vms()[static_cast<std::size_t>(b)].flops;
    });
    return order;
}

struct Search
{
    SearchState& state;
    Bounder& bounder;
    const std::vector<int>& order;
    const std::vector<NodeIndex>& cands;
    const std::vector<int>& class_of; // per node; -1 when unique
    int classes = 0;
    const BranchAndBoundParams& params;
    const Substrate& sub;
    std::span<const Vsr> vsrs;
    const PowerOptions& power;

    double incumbent = kInfinity;
    Placement best;
    std::int64_t nodes = 0;
    bool limit_hit = false;
    double open_bound = kInfinity;

    bool prunable(double lb) const
    {
        if (incumbent == kInfinity)
            return lb == kInfinity;
        if (params.epsilon > 0.0)
            return lb >= incumbent * (1.0 - params.epsilon);
        return lb > incumbent + 1e-9 * std::max(1.0, std::abs(incumbent));
    }

    double bound_at(std::size_t depth)
    {
        switch (params.bound) {
        case BoundMode::Full:
            return bounder.bound(state, depth);
        case BoundMode::Committed:
            return state.total();
        case BoundMode::None:
            break;
        }
        return -kInfinity;
    }

    void leaf()
    {
        if (incumbent != kInfinity && state.total() > incumbent + 1e-9 * std::max(1.0, std::abs(incumbent)))
            return;
        Placement p = state.placement();
        PowerBreakdown b;
        if (detail::evaluate_unchecked(sub, vsrs, p, power, b, nullptr) && b.total < incumbent) {
            incumbent = b.total;
            best = std::move(p);
        }
    }

    void run(std::size_t depth, double self_bound)
    {
        if (depth == order.size()) {
            leaf();
            return;
        }
        const int v = order[depth];
        std::vector<char> opened(static_cast<std::size_t>(classes), 0);
        for (NodeIndex c : cands) {
            if (nodes >= params.node_limit) {
                limit_hit = true;
                open_bound = std::min(open_bound, self_bound);
                return;
            }
            const int cls = class_of[static_cast<std::size_t>(c)];
            if (cls >= 0 && state.hosted(c) == 0) {
                if (opened[static_cast<std::size_t>(cls)])
                    continue;
                opened[static_cast<std::size_t>(cls)] = 1;
            }
            ++nodes;
            const std::size_t m = state.mark();
            if (state.assign(v, c)) {
                const double lb = bound_at(depth + 1);
                if (!prunable(lb))
                    run(depth + 1, lb);
            }
            state.rollback(m);
            if (limit_hit) {
                open_bound = std::min(open_bound, self_bound);
                return;
            }
        }
    }
};

} // namespace

double root_lower_bound(const Substrate& sub, std::span<const Vsr> vsrs, const SolveOptions& options)
{
    SearchState state(sub, vsrs, options.power);
    if (!detail::pin_inputs(state, nullptr))
        return kInfinity;
    const auto cands = detail::resolve_candidates(sub, options);
    const auto order = branch_order(state);
    Bounder bounder(state, cands, order);
    return bounder.bound(state, 0);
}

Solution solve_branch_and_bound(const Substrate& sub, std::span<const Vsr> vsrs, const BranchAndBoundParams& params,
                                const SolveOptions& options)
{
    detail::Stopwatch clock;
    if (!(params.epsilon >= 0.0 && params.epsilon < 1.0))
        throw ConfigError("epsilon must lie in [0, 1)");
    if (params.node_limit <= 0)
        throw ConfigError("node_limit must be positive");
    for (const Vsr& v : vsrs)
        if (!validate_vsr(v, sub.topology()).empty())
            throw InputError("invalid VSR " + std::to_string(v.id));

    Solution out;
    SearchState state(sub, vsrs, options.power);
    std::string failure;
    if (!detail::pin_inputs(state, &failure)) {
        out.message = failure;
        out.wall_time = clock.seconds();
        return out;
    }

    std::vector<NodeIndex> cands = detail::resolve_candidates(sub, options);
    std::stable_sort(cands.begin(), cands.end(), [&](NodeIndex a, NodeIndex b) {
        const Node& x = sub.node(a);
        const Node& y = sub.node(b);
        return x.pue_pr * energy_per_bit(*x.server) < y.pue_pr * energy_per_bit(*y.server);
    });

    std::set<NodeIndex> sources;
    for (const auto& vm : state.vms())
        sources.insert(vm.source);
    std::vector<int> class_of(sub.size(), -1);
    int classes = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const NodeIndex a = cands[i];
        if (sources.count(a) || class_of[static_cast<std::size_t>(a)] >= 0)
            continue;
        std::vector<NodeIndex> members{a};
        for (std::size_t j = i + 1; j < cands.size(); ++j) {
            const NodeIndex b = cands[j];
            if (!sources.count(b) && class_of[static_cast<std::size_t>(b)] < 0 && interchangeable(sub, a, b))
                members.push_back(b);
        }
        if (members.size() < 2)
            continue;
        for (NodeIndex m : members)
            class_of[static_cast<std::size_t>(m)] = classes;
        ++classes;
    }

    const auto order = branch_order(state);
    Bounder bounder(state, cands, order);
    Search search{state,   bounder, order, cands, class_of,  classes, params,
                  sub,     vsrs,    options.power, kInfinity, {}, 0, false, kInfinity};

    if (params.warm_start) {
        HeuristicParams warm_params;
        warm_params.restarts = 32;
        warm_params.neighborhood = Neighborhood::RelocateSwap;
        const Solution warm = solve_heuristic(sub, vsrs, warm_params, options);
        if (warm.status != SolveStatus::Infeasible) {
            search.incumbent = warm.objective;
            search.best = warm.placement;
            search.best.routes.clear();
        }
        // Fixed-layer placements, polished, are starting points too.
        const std::vector<int> free = detail::free_vms(state);
        for (Layer layer : {Layer::CDC, Layer::AF, Layer::MF}) {
            bool present = false;
            for (NodeIndex c : cands)
                present = present || sub.node(c).kind == layer_kind(layer);
            if (!present)
                continue;
            const Solution base = solve_fixed_layer(sub, vsrs, FixedLayerParams{layer}, options);
            if (base.status == SolveStatus::Infeasible)
                continue;
            SearchState start = state;
            bool ok = true;
            for (int v : free) {
                const auto& vm = start.vms()[static_cast<std::size_t>(v)];
                const NodeIndex at = base.placement.assign[static_cast<std::size_t>(vm.vsr)]
                                                          [static_cast<std::size_t>(vm.vm)];
                ok = ok && std::find(cands.begin(), cands.end(), at) != cands.end() && start.assign(v, at);
            }
            if (!ok)
                continue;
            start.commit();
            detail::polish(start, cands, Neighborhood::RelocateSwap, warm_params.move_budget);
            Placement p = start.placement();
            PowerBreakdown b;
            if (detail::evaluate_unchecked(sub, vsrs, p, options.power, b, nullptr) && b.total < search.incumbent) {
                search.incumbent = b.total;
                search.best = std::move(p);
            }
        }
    }

    const double root = params.bound == BoundMode::Full ? bounder.bound(state, 0) : -kInfinity;
    if (!search.prunable(root))
        search.run(0, root);

    out.nodes_explored = search.nodes;
    if (search.incumbent == kInfinity) {
        out.message = search.limit_hit ? "infeasible: node limit reached without a feasible placement"
                                       : "infeasible: no feasible assignment";
    } else {
        detail::finish(sub, vsrs, std::move(search.best), options.power, out);
        if (search.limit_hit) {
            out.status = SolveStatus::Feasible;
            const double lb = std::max(0.0, std::min(search.open_bound, out.objective));
            out.gap = out.objective > 0.0 ? (out.objective - lb) / out.objective : 0.0;
            out.message = "node limit reached";
        } else {
            out.status = SolveStatus::Optimal;
        }
    }
    out.wall_time = clock.seconds();
    return out;
}

} // namespace cfn
