// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace cfn;
using namespace cfn::test;

namespace {

bool has_code(const ValidationReport& r, const std::string& code)
{
    return std::any_of(r.begin(), r.end(), [&](const Violation& v) { return v.code == code; });
}

} // namespace

TEST_CASE("total demand adds FLOPS and bitrates")
{
    CHECK(total_demand({}).gflops == 0.0);
    CHECK(total_demand({}).mbps == 0.0);
    const std::vector<Vsr> one{chain(0, {0.5, 4, 6}, {10, 20})};
    CHECK(total_demand(one).gflops == doctest::Approx(10.5));
    CHECK(total_demand(one).mbps == doctest::Approx(30.0));
}

TEST_CASE("generated batches are valid, bounded and reproducible")
{
    const CfnTopology t = build_default_cfn();
    for (VlinkPattern p : {VlinkPattern::Chain, VlinkPattern::Star, VlinkPattern::RandomConnected}) {
        CAPTURE(to_string(p));
        WorkloadSpec w;
        w.vsr_count = 25;
        w.vms_per_vsr = 5;
        w.vlink_pattern = p;
        const auto a = generate_vsrs(w, t);
        CHECK(a == generate_vsrs(w, t));
        REQUIRE(a.size() == 25);
        for (const Vsr& v : a) {
            CHECK(validate_vsr(v, t).empty());
            CHECK(v.input_vm() == 0);
            CHECK(v.source_iot == "iot_01");
            CHECK(v.vms.size() == 5);
        }
        w.seed = 2;
        CHECK(a != generate_vsrs(w, t));
    }
}

TEST_CASE("generated demands stay inside their ranges")
{
    const CfnTopology t = build_default_cfn();
    WorkloadSpec w;
    w.vsr_count = 4000;
    w.vms_per_vsr = 3;
    w.flops_range = {3.0, 10.0};
    w.input_flops_range = {0.1, 1.0};
    w.bitrate_range = {1.0, 50.0};
    const auto batch = generate_vsrs(w, t);
    std::size_t samples = 0;
    double lo = 1e9, hi = -1e9;
    for (const Vsr& v : batch) {
        for (const VmNode& vm : v.vms) {
            const Range r = vm.is_input ? w.input_flops_range : w.flops_range;
            CHECK(vm.flops_demand >= r.min);
            CHECK(vm.flops_demand <= r.max);
            if (!vm.is_input) {
                lo = std::min(lo, vm.flops_demand);
                hi = std::max(hi, vm.flops_demand);
            }
            ++samples;
        }
        for (const VirtualLink& l : v.vlinks) {
            CHECK(l.bitrate >= 1.0);
            CHECK(l.bitrate <= 50.0);
            ++samples;
        }
    }
    CHECK(samples >= 10000);
    // The whole range is exercised.
    CHECK(lo < 3.1);
    CHECK(hi > 9.9);
}

TEST_CASE("seeded default 20-VSR batch is frozen")
{
    WorkloadSpec w;
    w.vsr_count = 20;
    w.seed = 21;
    const Demand d = total_demand(generate_vsrs(w, build_default_cfn()));
    CHECK(d.gflops == doctest::Approx(265.6839940534884).epsilon(1e-7));
    CHECK(d.mbps == doctest::Approx(1169.3693405475158).epsilon(1e-7));
}

TEST_CASE("workload specs are checked")
{
    const CfnTopology t = build_default_cfn();
    WorkloadSpec w;
    w.source_iot = "cdc";
    CHECK_THROWS_AS(generate_vsrs(w, t), ConfigError);
    w.source_iot = "nowhere";
    CHECK_THROWS_AS(generate_vsrs(w, t), ConfigError);

    WorkloadSpec bad;
    bad.flops_range = {5.0, 1.0};
    CHECK_THROWS_AS(check_workload_spec(bad), ConfigError);
    bad = {};
    bad.vms_per_vsr = 0;
    CHECK_THROWS_AS(check_workload_spec(bad), ConfigError);
    bad = {};
    bad.vsr_count = -1;
    CHECK_THROWS_AS(check_workload_spec(bad), ConfigError);
}

TEST_CASE("structural VSR validation")
{
    Vsr ok = chain(0, {0.5, 4, 6}, {10, 20});
    CHECK(validate_vsr(ok).empty());

    Vsr no_input = ok;
    no_input.vms[0].is_input = false;
    CHECK(has_code(validate_vsr(no_input), "no input VM"));

    Vsr two_inputs = ok;
    two_inputs.vms[1].is_input = true;
    CHECK(has_code(validate_vsr(two_inputs), "multiple input VMs"));

    Vsr split = ok;
    split.vlinks.pop_back();
    CHECK(has_code(validate_vsr(split), "not connected"));

    Vsr zero = ok;
    zero.vms[2].flops_demand = 0.0;
    CHECK(has_code(validate_vsr(zero), "invalid demand"));

    Vsr dangling = ok;
    dangling.vlinks.push_back({1, 7, 1.0});
    CHECK(has_code(validate_vsr(dangling), "unknown endpoint"));

    Vsr negative = ok;
    negative.vlinks[0].bitrate = -1.0;
    CHECK(has_code(validate_vsr(negative), "invalid bitrate"));

    CHECK_FALSE(validate_vsr(chain(0, {1, 1}, {1}, "cdc"), build_default_cfn()).empty());
}

TEST_CASE("link pattern names round-trip")
{
    for (VlinkPattern p : {VlinkPattern::Chain, VlinkPattern::Star, VlinkPattern::RandomConnected})
        CHECK(vlink_pattern_from_string(to_string(p)) == p);
}
