#include "ragloop/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

namespace ragloop {

using nlohmann::json;

namespace {

double to_ms(std::chrono::microseconds us) {
    return static_cast<double>(us.count()) / 1000.0;
}

double to_seconds(std::chrono::microseconds us) {
    return static_cast<double>(us.count()) / 1e6;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

json usage_to_json(const UsageRecord& usage, bool include_timing) {
    json j = {{"role_tag", std::string(to_string(usage.role_tag))},
              {"iteration", usage.iteration},
              {"prompt_tokens", usage.prompt_tokens},
              {"completion_tokens", usage.completion_tokens},
              {"retries", usage.retries}};
    if (include_timing) {
        j["wall_clock_ms"] = to_ms(usage.wall_clock);
    }
    return j;
}

} // namespace

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::SeedRetrieval:
        return "seed_retrieval";
    case EventKind::LlmCall:
        return "llm_call";
    case EventKind::NotePhase:
        return "note_phase";
    case EventKind::RefineMetric:
        return "refine_metric";
    }
    return "unknown";
}

json TranscriptEvent::to_json(bool include_timing) const {
    json j = {{"kind", std::string(to_string(kind))}, {"iteration", iteration}};
    switch (kind) {
    case EventKind::SeedRetrieval: {
        json hits = json::array();
        for (const auto& [chunk_id, score] : seed_hits) {
            hits.push_back(json{{"chunk_id", chunk_id}, {"score", score}});
        }
        j["hits"] = std::move(hits);
        break;
    }
    case EventKind::LlmCall:
        if (usage) {
            j.update(usage_to_json(*usage, include_timing));
        }
        break;
    case EventKind::NotePhase:
        j["tasks"] = task_count;
        if (include_timing) {
            j["wall_clock_ms"] = to_ms(phase_wall_clock);
        }
        break;
    case EventKind::RefineMetric:
        j["compression_ratio"] = compression_ratio;
        break;
    }
    return j;
}

json RunReport::to_json(bool include_timing) const {
    json records = json::array();
    for (const auto& record : ledger_records) {
        records.push_back(usage_to_json(record, include_timing));
    }

    json per_role = json::object();
    for (const auto& [role, breakdown] : totals.per_role) {
        per_role[role] = json{{"calls", breakdown.calls},
                              {"prompt_tokens", breakdown.prompt_tokens},
                              {"completion_tokens", breakdown.completion_tokens},
                              {"cost_usd", breakdown.cost.str()}};
    }

    json events = json::array();
    for (const auto& event : transcript) {
        events.push_back(event.to_json(include_timing));
    }

    json j = {{"user_query", user_query},
              {"final_hypothesis", final_hypothesis},
              {"final_notes", final_notes},
              {"final_feedback", final_feedback},
              {"satisfied", satisfied},
              {"iterations_used", iterations_used},
              {"query_log", query_log},
              {"ledger",
               json{{"prices",
                     json{{"prompt_per_1k", prices.prompt_per_1k.str()},
                          {"completion_per_1k", prices.completion_per_1k.str()}}},
                    {"records", std::move(records)},
                    {"totals", json{{"total_cost_usd", totals.total_cost.str()},
                                    {"prompt_tokens", totals.total_prompt_tokens},
                                    {"completion_tokens", totals.total_completion_tokens},
                                    {"per_role", std::move(per_role)}}}}},
              {"transcript", std::move(events)}};
    if (include_timing) {
        j["total_wall_clock_ms"] = to_ms(total_wall_clock);
    }
    return j;
}

BenchReport make_bench_report(std::string user_query, BenchRow baseline, BenchRow proposed) {
    BenchReport report;
    report.user_query = std::move(user_query);
    report.baseline = std::move(baseline);
    report.proposed = std::move(proposed);

    if (report.baseline.cost.nanos() > 0) {
        report.relative_cost_reduction =
            static_cast<double>(report.baseline.cost.nanos() - report.proposed.cost.nanos()) /
            static_cast<double>(report.baseline.cost.nanos());
    }
    if (report.baseline.delay.count() > 0) {
        report.relative_delay_reduction =
            static_cast<double>(report.baseline.delay.count() - report.proposed.delay.count()) /
            static_cast<double>(report.baseline.delay.count());
    }
    return report;
}

json BenchReport::to_json(bool include_timing) const {
    auto row_to_json = [&](const BenchRow& row) {
        json j = {{"method", row.method},
                  {"information_need", row.satisfied ? "satisfied" : "not satisfied"},
                  {"cost_usd", row.cost.str()}};
        if (include_timing) {
            j["delay_seconds"] = to_seconds(row.delay);
        }
        return j;
    };
    json j = {{"user_query", user_query},
              {"rows", json::array({row_to_json(baseline), row_to_json(proposed)})},
              {"relative_cost_reduction", relative_cost_reduction}};
    if (include_timing) {
        j["relative_delay_reduction"] = relative_delay_reduction;
    }
    return j;
}

std::string render_bench_table(const BenchReport& report) {
    const std::vector<std::string> headers = {"Method", "Information Need", "Cost ($)",
                                              "Delay (seconds)"};
    auto row_cells = [](const BenchRow& row) {
        return std::vector<std::string>{row.method,
                                        row.satisfied ? "satisfied" : "not satisfied",
                                        row.cost.str(),
                                        format_fixed(to_seconds(row.delay), 2)};
    };

    std::vector<std::vector<std::string>> rows = {headers, row_cells(report.baseline),
                                                  row_cells(report.proposed)};

    std::vector<std::size_t> widths(headers.size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }

    std::string out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += row[c];
            if (c + 1 < row.size()) {
                out.append(widths[c] - row[c].size() + 2, ' ');
            }
        }
        out += "\n";
    }
    out += "\n";
    out += "Relative cost reduction:  " + format_fixed(report.relative_cost_reduction * 100.0, 2) +
           " %\n";
    out += "Relative delay reduction: " +
           format_fixed(report.relative_delay_reduction * 100.0, 2) + " %\n";
    return out;
}

} // namespace ragloop
