// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "search_state.hpp"

#include <algorithm>

namespace cfn::detail {

SearchState::SearchState(const Substrate& substrate, std::span<const Vsr> vsrs, const PowerOptions& options)
    : sub_(substrate), vsrs_(vsrs), delta_(substrate.idle_share_delta())
{
    for (std::size_t r = 0; r < vsrs.size(); ++r) {
        const Vsr& v = vsrs[r];
        offsets_.push_back(static_cast<int>(vms_.size()));
        const NodeIndex source = sub_.index_of(v.source_iot);
        for (const VmNode& vm : v.vms)
            vms_.push_back({static_cast<int>(r), vm.id, vm.flops_demand, vm.is_input, source, {}});
        const int base = offsets_.back();
        for (const VirtualLink& l : v.vlinks) {
            const double gbps = l.bitrate / 1000.0;
            vms_[static_cast<std::size_t>(base + l.src)].links.push_back({base + l.dst, gbps, true});
            vms_[static_cast<std::size_t>(base + l.dst)].links.push_back({base + l.src, gbps, false});
        }
    }

    slot_.assign(sub_.size(), -1);
    const auto& proc = sub_.processing_nodes();
    slots_ = proc.size();
    for (std::size_t i = 0; i < proc.size(); ++i)
        slot_[static_cast<std::size_t>(proc[i])] = static_cast<int>(i);
    meter_.resize(slots_ * slots_);
    for (NodeIndex b : proc)
        for (NodeIndex e : proc)
            if (b != e)
                meter_[static_cast<std::size_t>(slot_[static_cast<std::size_t>(b)]) * slots_
                       + static_cast<std::size_t>(slot_[static_cast<std::size_t>(e)])] =
                    route_meter_counts(sub_, sub_.route(b, e).nodes, options.counting);

    const std::size_t n = sub_.size();
    where_.assign(vms_.size(), -1);
    omega_.assign(n, 0.0);
    theta_.assign(n, 0.0);
    lambda_.assign(n, 0.0);
    cost_.assign(n, 0.0);
    vm_count_.assign(n, 0);
    theta_count_.assign(n, 0);
    flow_count_.assign(n, 0);
}

const std::vector<std::pair<NodeIndex, int>>& SearchState::meter(NodeIndex b, NodeIndex e) const
{
    return meter_[static_cast<std::size_t>(slot_[static_cast<std::size_t>(b)]) * slots_
                  + static_cast<std::size_t>(slot_[static_cast<std::size_t>(e)])];
}

void SearchState::save_node(NodeIndex i)
{
    const auto k = static_cast<std::size_t>(i);
    journal_.push_back({0, i, omega_[k], theta_[k], lambda_[k], cost_[k], vm_count_[k], theta_count_[k],
                        flow_count_[k], -1, total_});
}

void SearchState::refresh_cost(NodeIndex i)
{
    const auto k = static_cast<std::size_t>(i);
    const Node& node = sub_.node(i);
    double c = 0.0;
    if (node.is_processing()) {
        if (vm_count_[k] == 0)
            omega_[k] = 0.0;
        if (theta_count_[k] == 0)
            theta_[k] = 0.0;
        const ProcessingNodeTerms t = processing_node_terms(node, omega_[k], theta_[k], delta_);
        c = t.proportional + t.idle + t.lan_proportional + t.lan_idle;
    } else if (sub_.is_metered(i)) {
        if (flow_count_[k] == 0)
            lambda_[k] = 0.0;
        const NetworkNodeTerms t = network_node_terms(node, lambda_[k], delta_);
        c = t.proportional + t.idle;
    }
    total_ += c - cost_[k];
    cost_[k] = c;
}

bool SearchState::within_capacity(NodeIndex i) const
{
    const auto k = static_cast<std::size_t>(i);
    const Node& node = sub_.node(i);
    if (node.is_processing()) {
        if (omega_[k] > node.server->capacity * node.server_count_max + kTolerance)
            return false;
        if (node.lan && theta_[k] > node.lan->capacity + kTolerance)
            return false;
        return true;
    }
    return !sub_.is_metered(i) || lambda_[k] <= node.device->capacity + kTolerance;
}

void SearchState::add_traffic(NodeIndex b, NodeIndex e, double gbps, int sign, std::vector<NodeIndex>& touched)
{
    for (const auto& [n, count] : meter(b, e)) {
        save_node(n);
        const auto k = static_cast<std::size_t>(n);
        lambda_[k] += sign * count * gbps;
        flow_count_[k] += sign;
        touched.push_back(n);
    }
}

bool SearchState::assign(int vm, NodeIndex p)
{
    const std::size_t m = mark();
    const auto v = static_cast<std::size_t>(vm);
    journal_.push_back({1, vm, 0, 0, 0, 0, 0, 0, 0, where_[v], total_});
    where_[v] = p;

    touched_.clear();
    const auto pk = static_cast<std::size_t>(p);
    save_node(p);
    omega_[pk] += vms_[v].flops;
    ++vm_count_[pk];
    touched_.push_back(p);
    for (const LinkEnd& l : vms_[v].links) {
        const NodeIndex q = where_[static_cast<std::size_t>(l.other)];
        if (q == p)
            continue;
        theta_[pk] += l.gbps;
        ++theta_count_[pk];
        if (q < 0)
            continue;
        if (l.outgoing)
            add_traffic(p, q, l.gbps, +1, touched_);
        else
            add_traffic(q, p, l.gbps, +1, touched_);
    }
    std::sort(touched_.begin(), touched_.end());
    touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
    for (NodeIndex n : touched_)
        if (!within_capacity(n)) {
            rollback(m);
            return false;
        }
    for (NodeIndex n : touched_)
        refresh_cost(n);
    return true;
}

void SearchState::unassign(int vm)
{
    const auto v = static_cast<std::size_t>(vm);
    const NodeIndex p = where_[v];
    if (p < 0)
        return;
    journal_.push_back({1, vm, 0, 0, 0, 0, 0, 0, 0, p, total_});
    where_[v] = -1;

    touched_.clear();
    const auto pk = static_cast<std::size_t>(p);
    save_node(p);
    omega_[pk] -= vms_[v].flops;
    --vm_count_[pk];
    touched_.push_back(p);
    for (const LinkEnd& l : vms_[v].links) {
        const NodeIndex q = where_[static_cast<std::size_t>(l.other)];
        if (q == p)
            continue;
        theta_[pk] -= l.gbps;
        --theta_count_[pk];
        if (q < 0)
            continue;
        if (l.outgoing)
            add_traffic(p, q, l.gbps, -1, touched_);
        else
            add_traffic(q, p, l.gbps, -1, touched_);
    }
    std::sort(touched_.begin(), touched_.end());
    touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
    for (NodeIndex n : touched_)
        refresh_cost(n);
}

void SearchState::rollback(std::size_t m)
{
    while (journal_.size() > m) {
        const Saved& s = journal_.back();
        if (s.kind == 0) {
            const auto k = static_cast<std::size_t>(s.index);
            omega_[k] = s.omega;
            theta_[k] = s.theta;
            lambda_[k] = s.lambda;
            cost_[k] = s.cost;
            vm_count_[k] = s.vm_count;
            theta_count_[k] = s.theta_count;
            flow_count_[k] = s.flow_count;
        } else {
            where_[static_cast<std::size_t>(s.index)] = s.where;
        }
        total_ = s.total;
        journal_.pop_back();
    }
}

void SearchState::resync()
{
    std::vector<double> c(cost_);
    std::sort(c.begin(), c.end());
    total_ = 0.0;
    for (double x : c)
        total_ += x;
}

Placement SearchState::placement() const
{
    Placement p;
    p.assign.resize(vsrs_.size());
    for (std::size_t i = 0; i < vms_.size(); ++i) {
        const FlatVm& vm = vms_[i];
        auto& row = p.assign[static_cast<std::size_t>(vm.vsr)];
        if (row.size() <= static_cast<std::size_t>(vm.vm))
            row.resize(static_cast<std::size_t>(vm.vm) + 1, -1);
        row[static_cast<std::size_t>(vm.vm)] = where_[i];
    }
    return p;
}

} // namespace cfn::detail
