// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_SRC_SEARCH_STATE_HPP
#define CFNEMBED_SRC_SEARCH_STATE_HPP

#include "cfnembed/power.hpp"

#include <span>
#include <vector>

namespace cfn::detail {

struct LinkEnd
{
    int other = 0;       // flat index of the VM at the other end
    double gbps = 0.0;
    bool outgoing = false; // this VM is the link source
};

struct FlatVm
{
    int vsr = 0; // position in the batch
    int vm = 0;
    double flops = 0.0;
    bool input = false;
    NodeIndex source = -1;
    std::vector<LinkEnd> links;
};

/// Partial placement with incrementally maintained node loads and power.
/// Every mutation is journaled so that callers can roll back exactly.
class SearchState
{
public:
    SearchState(const Substrate& substrate, std::span<const Vsr> vsrs, const PowerOptions& options);

    const Substrate& substrate() const { return sub_; }
    const std::vector<FlatVm>& vms() const { return vms_; }
    int vm_index(int vsr, int vm) const { return offsets_[static_cast<std::size_t>(vsr)] + vm; }

    /// Applies the assignment; returns false (state unchanged) on a capacity violation.
    bool assign(int vm, NodeIndex node);
    void unassign(int vm);

    std::size_t mark() const { return journal_.size(); }
    void rollback(std::size_t mark);
    void commit() { journal_.clear(); }

    NodeIndex where(int vm) const { return where_[static_cast<std::size_t>(vm)]; }
    double total() const { return total_; }
    /// Recomputes the running total from the per-node costs.
    void resync();

    double omega(NodeIndex p) const { return omega_[static_cast<std::size_t>(p)]; }
    double theta(NodeIndex p) const { return theta_[static_cast<std::size_t>(p)]; }
    double lambda(NodeIndex n) const { return lambda_[static_cast<std::size_t>(n)]; }
    int hosted(NodeIndex p) const { return vm_count_[static_cast<std::size_t>(p)]; }
    bool network_active(NodeIndex n) const { return flow_count_[static_cast<std::size_t>(n)] > 0; }
    double node_cost(NodeIndex i) const { return cost_[static_cast<std::size_t>(i)]; }

    const std::vector<std::pair<NodeIndex, int>>& meter(NodeIndex b, NodeIndex e) const;

    Placement placement() const;

private:
    struct Saved
    {
        int kind; // 0: node, 1: vm location
        int index;
        double omega, theta, lambda, cost;
        int vm_count, theta_count, flow_count;
        NodeIndex where;
        double total;
    };

    void save_node(NodeIndex i);
    void refresh_cost(NodeIndex i);
    bool within_capacity(NodeIndex i) const;
    void add_traffic(NodeIndex b, NodeIndex e, double gbps, int sign, std::vector<NodeIndex>& touched);

    const Substrate& sub_;
    std::span<const Vsr> vsrs_;
    double delta_;
    std::vector<FlatVm> vms_;
    std::vector<int> offsets_;
    std::vector<int> slot_;
    std::size_t slots_ = 0;
    std::vector<std::vector<std::pair<NodeIndex, int>>> meter_;

    std::vector<NodeIndex> where_;
    std::vector<double> omega_, theta_, lambda_, cost_;
    std::vector<int> vm_count_, theta_count_, flow_count_;
    double total_ = 0.0;
    std::vector<Saved> journal_;
    std::vector<NodeIndex> touched_;
};

} // namespace cfn::detail

#endif
