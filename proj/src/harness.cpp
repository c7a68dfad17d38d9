// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/harness.hpp"

#include "cfnembed/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace cfn {

namespace {

bool known_strategy(const std::string& s)
{
    return s == "CFN" || s == "CDC" || s == "AF" || s == "MF" || s == "HEURISTIC" || s == "ENUMERATION";
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double field(const std::string& s, int line)
{
    if (s.empty())
        return 0.0;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("CSV line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

} // namespace

void check_scenario(const Scenario& s)
{
    const ValidationReport report = validate_topology(s.topology);
    if (!report.empty()) {
        std::string msg = "scenario topology is invalid:";
        for (const Violation& v : report)
            msg += "\n  " + v.message;
        throw ConfigError(msg);
    }
    check_workload_spec(s.workload);
    if (s.sweep.from < 1 || s.sweep.to < s.sweep.from || s.sweep.step < 1)
        throw ConfigError("sweep needs 1 <= from <= to and step >= 1");
    if (s.strategies.empty())
        throw ConfigError("scenario lists no strategies");
    for (const std::string& name : s.strategies)
        if (!known_strategy(name))
            throw ConfigError("unknown strategy '" + name + "' (expected CFN, CDC, AF, MF, HEURISTIC or ENUMERATION)");
    if (s.threads < 0)
        throw ConfigError("threads must be >= 0");
}

std::vector<Vsr> sweep_batch(const Scenario& scenario, int vsr_count)
{
    WorkloadSpec spec = scenario.workload;
    spec.vsr_count = vsr_count;
    spec.seed = scenario.base_seed + static_cast<std::uint64_t>(vsr_count);
    return generate_vsrs(spec, scenario.topology);
}

Solution run_strategy(const Substrate& sub, std::span<const Vsr> vsrs, const std::string& strategy,
                      const Scenario& scenario)
{
    const SolveOptions options{scenario.power, {}};
    if (strategy == "CFN") {
        Solution s = solve_branch_and_bound(sub, vsrs, scenario.bnb, options);
        if (s.status != SolveStatus::Optimal
            && enumeration_size(sub, vsrs, options) <= static_cast<double>(scenario.enumeration.max_configurations))
            return solve_exact_enumeration(sub, vsrs, scenario.enumeration, options);
        return s;
    }
    if (strategy == "CDC")
        return solve_fixed_layer(sub, vsrs, {Layer::CDC}, options);
    if (strategy == "AF")
        return solve_fixed_layer(sub, vsrs, {Layer::AF}, options);
    if (strategy == "MF")
        return solve_fixed_layer(sub, vsrs, {Layer::MF}, options);
    if (strategy == "HEURISTIC")
        return solve_heuristic(sub, vsrs, scenario.heuristic, options);
    if (strategy == "ENUMERATION")
        return solve_exact_enumeration(sub, vsrs, scenario.enumeration, options);
    throw ConfigError("unknown strategy '" + strategy + "'");
}

const ResultRow* ResultTable::find(int vsr_count, const std::string& strategy) const
{
    for (const ResultRow& r : rows)
        if (r.vsr_count == vsr_count && r.strategy == strategy)
            return &r;
    return nullptr;
}

ResultRow make_row(const Substrate& sub, int vsr_count, const std::string& strategy, const Solution& solution,
                   bool record_timing)
{
    ResultRow row;
    row.vsr_count = vsr_count;
    row.strategy = strategy;
    row.status = solution.status;
    row.solution = solution;
    row.wall_time_s = record_timing ? solution.wall_time : 0.0;
    if (!row.solved())
        return row;
    const PowerBreakdown& b = solution.breakdown;
    row.total_w = b.total;
    row.net_prop_w = b.net_proportional;
    row.net_idle_w = b.net_idle;
    row.pr_prop_w = b.pr_proportional;
    row.pr_idle_w = b.pr_idle;
    row.lan_w = b.lan_proportional + b.lan_idle;
    for (std::size_t i = 0; i < b.per_node.size(); ++i) {
        const double omega = b.per_node[i].omega_p;
        switch (sub.node(static_cast<NodeIndex>(i)).kind) {
        case NodeKind::IoT:
            row.omega_iot += omega;
            break;
        case NodeKind::AF:
            row.omega_af += omega;
            break;
        case NodeKind::MF:
            row.omega_mf += omega;
            break;
        case NodeKind::CDC:
            row.omega_cdc += omega;
            break;
        default:
            break;
        }
    }
    return row;
}

ResultTable run_sweep(const Scenario& scenario)
{
    check_scenario(scenario);
    const Substrate sub(scenario.topology);

    std::vector<int> points;
    for (int n = scenario.sweep.from; n <= scenario.sweep.to; n += scenario.sweep.step)
        points.push_back(n);
    std::vector<std::vector<Vsr>> batches;
    for (int n : points)
        batches.push_back(sweep_batch(scenario, n));

    const std::size_t per_point = scenario.strategies.size();
    const std::size_t tasks = points.size() * per_point;
    ResultTable table;
    table.rows.resize(tasks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks)
                return;
            try {
                const std::size_t p = t / per_point;
                const std::string& name = scenario.strategies[t % per_point];
                const Solution s = run_strategy(sub, batches[p], name, scenario);
                table.rows[t] = make_row(sub, points[p], name, s, scenario.record_timing);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(tasks);
            }
        }
    };

    unsigned threads = scenario.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                             : static_cast<unsigned>(scenario.threads);
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(tasks, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i)
            pool.emplace_back(worker);
        for (std::thread& th : pool)
            th.join();
    }
    if (error)
        std::rethrow_exception(error);
    return table;
}

SavingsSummary savings_summary(const ResultTable& table, const std::string& baseline, const std::string& subject)
{
    SavingsSummary s;
    double sum = 0.0;
    for (const ResultRow& b : table.rows) {
        if (b.strategy != baseline || !b.solved() || !(b.total_w > 0.0))
            continue;
        const ResultRow* x = table.find(b.vsr_count, subject);
        if (!x || !x->solved())
            continue;
        const double saving = 100.0 * (1.0 - x->total_w / b.total_w);
        s.min = s.points == 0 ? saving : std::min(s.min, saving);
        s.max = s.points == 0 ? saving : std::max(s.max, saving);
        sum += saving;
        ++s.points;
    }
    if (s.points == 0)
        throw InputError("no sweep point where both " + baseline + " and " + subject + " are solved");
    s.avg = sum / s.points;
    return s;
}

std::string format_summary(const SavingsSummary& s, const std::string& baseline, const std::string& subject)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s vs %s savings: avg=%.1f%% min=%.1f%% max=%.1f%%", subject.c_str(),
                  baseline.c_str(), s.avg, s.min, s.max);
    return buf;
}

void write_csv(const ResultTable& table, std::ostream& out)
{
    if (table.rows.empty())
        throw InputError("result table is empty");
    out << kCsvHeader << '\n';
    for (const ResultRow& r : table.rows) {
        out << r.vsr_count << ',' << r.strategy << ',' << to_string(r.status);
        if (r.solved()) {
            for (double v : {r.total_w, r.net_prop_w, r.net_idle_w, r.pr_prop_w, r.pr_idle_w, r.lan_w, r.omega_iot,
                             r.omega_af, r.omega_mf, r.omega_cdc, r.wall_time_s})
                out << ',' << fmt(v);
        } else {
            out << ",,,,,,,,,,,";
        }
        out << '\n';
    }
}

void write_csv(const ResultTable& table, const std::string& path)
{
    std::ostringstream text;
    write_csv(table, text);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << text.str();
    out.flush();
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

std::string to_csv(const ResultTable& table)
{
    std::ostringstream out;
    write_csv(table, out);
    return out.str();
}

ResultTable read_csv(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != split_csv(kCsvHeader))
        throw ParseError("CSV header does not match the result table layout");
    ResultTable table;
    int n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line == "\r")
            continue;
        const auto f = split_csv(line);
        if (f.size() != 14)
            throw ParseError("CSV line " + std::to_string(n) + ": expected 14 fields");
        ResultRow r;
        r.vsr_count = static_cast<int>(field(f[0], n));
        r.strategy = f[1];
        if (f[2] == "optimal")
            r.status = SolveStatus::Optimal;
        else if (f[2] == "feasible")
            r.status = SolveStatus::Feasible;
        else if (f[2] == "infeasible")
            r.status = SolveStatus::Infeasible;
        else
            throw ParseError("CSV line " + std::to_string(n) + ": unknown status '" + f[2] + "'");
        double* dst[] = {&r.total_w,  &r.net_prop_w, &r.net_idle_w, &r.pr_prop_w, &r.pr_idle_w, &r.lan_w,
                         &r.omega_iot, &r.omega_af,  &r.omega_mf,  &r.omega_cdc, &r.wall_time_s};
        for (std::size_t i = 0; i < 11; ++i)
            *dst[i] = field(f[i + 3], n);
        table.rows.push_back(std::move(r));
    }
    return table;
}

} // namespace cfn
