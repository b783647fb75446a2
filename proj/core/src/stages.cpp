#include "ragloop/stages.hpp"

#include "ragloop/error.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <exception>
#include <optional>
#include <thread>
#include <unordered_set>

namespace ragloop {

using nlohmann::json;

std::string normalize_query(std::string_view query) {
    std::string out;
    out.reserve(query.size());
    bool pending_space = false;
    for (char raw : query) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(c));
    }
    while (!out.empty() && (out.back() == '.' || out.back() == '?' || out.back() == '!')) {
        out.pop_back();
    }
    while (!out.empty() && out.back() == ' ') {
        out.pop_back();
    }
    return out;
}

bool QueryLog::add(const std::string& query) {
    std::string key = normalize_query(query);
    if (key.empty()) {
        return false;
    }
    if (std::find(normalized_.begin(), normalized_.end(), key) != normalized_.end()) {
        return false;
    }
    entries_.push_back(query);
    normalized_.push_back(std::move(key));
    return true;
}

bool QueryLog::contains(std::string_view query) const {
    std::string key = normalize_query(query);
    return std::find(normalized_.begin(), normalized_.end(), key) != normalized_.end();
}

std::string composite_context_text(const std::string& user_query, const Notes& notes) {
    if (notes.empty()) {
        return user_query;
    }
    return user_query + "\n" + notes.text;
}

std::string format_chunk_context(const std::vector<SearchHit>& hits, std::size_t text_budget) {
    std::string out;
    std::size_t used = 0;
    for (const auto& hit : hits) {
        if (used >= text_budget) {
            break; // lowest-ranked chunks dropped first
        }
        std::string_view text = hit.chunk.text;
        std::string_view kept = text.substr(0, std::min(text.size(), text_budget - used));

        char score_buf[32];
        std::snprintf(score_buf, sizeof(score_buf), "%.4f", hit.score);

        if (!out.empty()) {
            out += "\n\n";
        }
        out += "[" + std::to_string(hit.rank) + "] " + hit.chunk.chunk_id + " (score " +
               score_buf + ")\n";
        out.append(kept);
        used += kept.size();
    }
    return out;
}

namespace {

std::string or_none(const std::string& text) {
    return text.empty() ? "(none)" : text;
}

std::string render_query_log(const QueryLog& log) {
    if (log.empty()) {
        return "(none)";
    }
    std::string out;
    for (const auto& q : log.entries()) {
        out += "- " + q + "\n";
    }
    out.pop_back();
    return out;
}

/// chat_json + ledger bookkeeping: exactly one record lands in the ledger
/// whether the call succeeds or exhausts its retries.
ChatJsonResult ledgered_chat_json(ChatProvider& provider, const ChatRequest& request,
                                  CostLedger& ledger) {
    try {
        ChatJsonResult result = chat_json(provider, request);
        ledger.append(result.usage);
        return result;
    } catch (const ProtocolError& e) {
        ledger.append(e.usage);
        throw;
    }
}

ChatTextResult ledgered_chat_text(ChatProvider& provider, const ChatRequest& request,
                                  CostLedger& ledger) {
    try {
        ChatTextResult result = chat_text(provider, request);
        ledger.append(result.usage);
        return result;
    } catch (const ProtocolError& e) {
        ledger.append(e.usage);
        throw;
    }
}

void validate_brainstorm_request(const BrainstormRequest& request) {
    if (request.user_query.empty()) {
        throw InvalidInput("brainstorm: empty user query");
    }
    if (request.store == nullptr || request.embedder == nullptr || request.prompts == nullptr ||
        request.query_log == nullptr) {
        throw InvalidInput("brainstorm: request is missing a store/embedder/prompts/query_log");
    }
    if (request.store->empty()) {
        throw StoreError("empty store");
    }
    if (request.n_questions < 1) {
        throw ConfigError("n_questions must be >= 1");
    }
    if (request.k < 1) {
        throw ConfigError("k must be >= 1");
    }
    if (request.parallelism < 1) {
        throw ConfigError("parallelism must be >= 1");
    }
}

std::vector<std::string> parse_question_array(const json& value, const UsageRecord& usage) {
    if (!value.is_object() || !value.contains("questions") || !value["questions"].is_array()) {
        throw ProtocolError("brainstorm-questions reply lacks a 'questions' array", value.dump(),
                            usage);
    }
    std::vector<std::string> questions;
    for (const auto& item : value["questions"]) {
        if (!item.is_string()) {
            throw ProtocolError("brainstorm-questions entries must be strings", value.dump(),
                                usage);
        }
        questions.push_back(item.get<std::string>());
    }
    return questions;
}

struct NoteTaskResult {
    std::string note_text;
    UsageRecord usage;
};

} // namespace

BrainstormOutcome brainstorm_concurrent(const BrainstormRequest& request, ChatProvider& provider,
                                        CostLedger& ledger) {
    validate_brainstorm_request(request);

    // Step 1: one call proposes the candidate queries.
    auto questions_prompt = request.prompts->render(
        RoleTag::BrainstormQuestions,
        {{"user_query", request.user_query},
         {"notes", or_none(request.notes.text)},
         {"query_log", render_query_log(*request.query_log)},
         {"chunks", or_none(request.initial_context)},
         {"n_questions", std::to_string(request.n_questions)}});

    ChatRequest questions_request;
    questions_request.role_tag = RoleTag::BrainstormQuestions;
    questions_request.system_prompt = questions_prompt.system;
    questions_request.user_prompt = questions_prompt.user;
    questions_request.temperature = request.temperature;
    questions_request.max_tokens = request.max_tokens;
    questions_request.json_mode = true;
    questions_request.iteration = request.iteration;

    ChatJsonResult questions_reply = ledgered_chat_json(provider, questions_request, ledger);

    BrainstormOutcome outcome;
    outcome.notes = request.notes;
    outcome.usage.push_back(questions_reply.usage);

    // Drop candidates that duplicate the user query, the query log, or an
    // earlier candidate from this same batch.
    std::unordered_set<std::string> seen;
    seen.insert(normalize_query(request.user_query));
    for (const auto& q : request.query_log->entries()) {
        seen.insert(normalize_query(q));
    }
    std::vector<std::string> survivors;
    for (auto& candidate : parse_question_array(questions_reply.value, questions_reply.usage)) {
        std::string key = normalize_query(candidate);
        if (key.empty() || !seen.insert(key).second) {
            continue;
        }
        survivors.push_back(std::move(candidate));
    }
    if (survivors.empty()) {
        return outcome; // nothing new to chase; notes unchanged
    }

    // Step 2: per-query retrieval + note extraction, bounded fan-out. All
    // tasks see the pre-merge notes snapshot; results are merged by slot,
    // never by completion order.
    const Embedding context_emb =
        request.embedder->embed(composite_context_text(request.user_query, request.notes));

    const std::size_t n_tasks = survivors.size();
    std::vector<std::optional<NoteTaskResult>> results(n_tasks);
    std::vector<std::exception_ptr> failures(n_tasks);

    auto run_task = [&](std::size_t slot) {
        const std::string& sub_query = survivors[slot];
        Embedding query_emb = request.embedder->embed(sub_query);
        auto hits = request.store->search(query_emb, static_cast<std::size_t>(4) * request.k);
        std::size_t k_eff = std::min<std::size_t>(request.k, hits.size());
        auto reranked = request.store->rerank(hits, context_emb, k_eff);
        std::string chunk_block = format_chunk_context(reranked, kChunkContextBudget);

        auto notes_prompt = request.prompts->render(RoleTag::BrainstormNotes,
                                                    {{"user_query", request.user_query},
                                                     {"notes", or_none(request.notes.text)},
                                                     {"chunks", or_none(chunk_block)}});

        ChatRequest note_request;
        note_request.role_tag = RoleTag::BrainstormNotes;
        note_request.system_prompt = notes_prompt.system;
        note_request.user_prompt = notes_prompt.user;
        note_request.temperature = request.temperature;
        note_request.max_tokens = request.max_tokens;
        note_request.json_mode = true;
        note_request.iteration = request.iteration;
        note_request.slot = static_cast<int>(slot);

        ChatJsonResult reply = chat_json(provider, note_request);
        const json& value = reply.value;
        if (!value.is_object() || !value.contains("notes") || !value["notes"].is_string()) {
            throw ProtocolError("brainstorm-notes reply lacks a string 'notes' field",
                                value.dump(), reply.usage);
        }
        results[slot] = NoteTaskResult{value["notes"].get<std::string>(), reply.usage};
    };

    const auto phase_start = std::chrono::steady_clock::now();
    {
        std::atomic<std::size_t> next{0};
        const std::size_t n_workers =
            std::min<std::size_t>(static_cast<std::size_t>(request.parallelism), n_tasks);
        std::vector<std::thread> workers;
        workers.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            workers.emplace_back([&]() {
                for (std::size_t slot = next.fetch_add(1); slot < n_tasks;
                     slot = next.fetch_add(1)) {
                    try {
                        run_task(slot);
                    } catch (...) {
                        failures[slot] = std::current_exception();
                    }
                }
            });
        }
        for (auto& worker : workers) {
            worker.join();
        }
    }
    outcome.note_phase_wall_clock = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - phase_start);
    outcome.note_tasks = static_cast<int>(n_tasks);

    // Ledger in slot order, failed or not, then surface the first failure.
    for (std::size_t slot = 0; slot < n_tasks; ++slot) {
        if (results[slot]) {
            ledger.append(results[slot]->usage);
            outcome.usage.push_back(results[slot]->usage);
        } else if (failures[slot]) {
            try {
                std::rethrow_exception(failures[slot]);
            } catch (const ProtocolError& e) {
                ledger.append(e.usage);
                outcome.usage.push_back(e.usage);
            } catch (...) {
                // no usable usage for transport/script failures
            }
        }
    }
    for (std::size_t slot = 0; slot < n_tasks; ++slot) {
        if (!failures[slot]) {
            continue;
        }
        try {
            std::rethrow_exception(failures[slot]);
        } catch (const std::exception& e) {
            throw StageError("brainstorm note extraction failed for query \"" + survivors[slot] +
                             "\": " + e.what());
        }
    }

    // Step 3: ordered merge.
    std::string blocks;
    for (std::size_t slot = 0; slot < n_tasks; ++slot) {
        if (slot > 0) {
            blocks += "\n\n";
        }
        blocks += results[slot]->note_text;
    }
    outcome.notes.text =
        request.notes.empty() ? blocks : request.notes.text + "\n\n" + blocks;
    outcome.new_queries = std::move(survivors);
    return outcome;
}

namespace {

const json& require_field(const json& value, const char* field, const char* role,
                          bool (json::*check)() const, const char* type_name,
                          const UsageRecord& usage) {
    if (!value.is_object() || !value.contains(field) || !((value.at(field)).*check)()) {
        throw ProtocolError(std::string(role) + " reply is missing " + type_name + " field '" +
                                field + "'",
                            value.dump(), usage);
    }
    return value.at(field);
}

} // namespace

std::pair<Verdict, UsageRecord> hypothesize_satisfy(const HypSatRequest& request,
                                                    ChatProvider& provider, CostLedger& ledger) {
    if (request.user_query.empty()) {
        throw InvalidInput("hypothesize_satisfy: empty user query");
    }
    if (request.prompts == nullptr || request.query_log == nullptr) {
        throw InvalidInput("hypothesize_satisfy: request is missing prompts/query_log");
    }

    auto prompt = request.prompts->render(RoleTag::HypSat,
                                          {{"user_query", request.user_query},
                                           {"notes", or_none(request.notes.text)},
                                           {"query_log", render_query_log(*request.query_log)}});

    ChatRequest chat_request;
    chat_request.role_tag = RoleTag::HypSat;
    chat_request.system_prompt = prompt.system;
    chat_request.user_prompt = prompt.user;
    chat_request.temperature = request.temperature;
    chat_request.max_tokens = request.max_tokens;
    chat_request.json_mode = true;
    chat_request.iteration = request.iteration;

    // The hybridity claim: hypothesis and verdict from exactly one call.
    ChatJsonResult reply = ledgered_chat_json(provider, chat_request, ledger);
    const json& value = reply.value;

    Verdict verdict;
    verdict.reasoning =
        require_field(value, "reasoning", "hyp-sat", &json::is_string, "a string", reply.usage)
            .get<std::string>();
    verdict.hypothesis =
        require_field(value, "hypothesis", "hyp-sat", &json::is_string, "a string", reply.usage)
            .get<std::string>();
    // strict boolean: "true" (a string) is a protocol error
    verdict.satisfied =
        require_field(value, "satisfied", "hyp-sat", &json::is_boolean, "a boolean", reply.usage)
            .get<bool>();
    verdict.feedback =
        require_field(value, "feedback", "hyp-sat", &json::is_string, "a string", reply.usage)
            .get<std::string>();

    if (verdict.satisfied && verdict.hypothesis.empty()) {
        throw ProtocolError("hyp-sat reply is satisfied but has an empty hypothesis",
                            value.dump(), reply.usage);
    }
    if (!verdict.satisfied && verdict.feedback.empty()) {
        throw ProtocolError("hyp-sat reply is unsatisfied but has no feedback", value.dump(),
                            reply.usage);
    }
    return {std::move(verdict), reply.usage};
}

std::pair<Verdict, std::vector<UsageRecord>> baseline_hypothesize_satisfy(
    const HypSatRequest& request, ChatProvider& provider, CostLedger& ledger) {
    if (request.user_query.empty()) {
        throw InvalidInput("baseline_hypothesize_satisfy: empty user query");
    }
    if (request.prompts == nullptr || request.query_log == nullptr) {
        throw InvalidInput("baseline_hypothesize_satisfy: request is missing prompts/query_log");
    }

    std::vector<UsageRecord> usages;
    Verdict verdict;

    auto hyp_prompt =
        request.prompts->render(RoleTag::BaselineHypothesize,
                                {{"user_query", request.user_query},
                                 {"notes", or_none(request.notes.text)},
                                 {"query_log", render_query_log(*request.query_log)}});

    ChatRequest hyp_request;
    hyp_request.role_tag = RoleTag::BaselineHypothesize;
    hyp_request.system_prompt = hyp_prompt.system;
    hyp_request.user_prompt = hyp_prompt.user;
    hyp_request.temperature = request.temperature;
    hyp_request.max_tokens = request.max_tokens;
    hyp_request.json_mode = true;
    hyp_request.iteration = request.iteration;

    ChatJsonResult hyp_reply = ledgered_chat_json(provider, hyp_request, ledger);
    usages.push_back(hyp_reply.usage);
    verdict.reasoning = require_field(hyp_reply.value, "reasoning", "baseline-hypothesize",
                                      &json::is_string, "a string", hyp_reply.usage)
                            .get<std::string>();
    verdict.hypothesis = require_field(hyp_reply.value, "hypothesis", "baseline-hypothesize",
                                       &json::is_string, "a string", hyp_reply.usage)
                             .get<std::string>();

    auto sat_prompt = request.prompts->render(RoleTag::BaselineSatisfy,
                                              {{"user_query", request.user_query},
                                               {"notes", or_none(request.notes.text)},
                                               {"hypothesis", verdict.hypothesis}});

    ChatRequest sat_request;
    sat_request.role_tag = RoleTag::BaselineSatisfy;
    sat_request.system_prompt = sat_prompt.system;
    sat_request.user_prompt = sat_prompt.user;
    sat_request.temperature = request.temperature;
    sat_request.max_tokens = request.max_tokens;
    sat_request.json_mode = true;
    sat_request.iteration = request.iteration;

    ChatJsonResult sat_reply = ledgered_chat_json(provider, sat_request, ledger);
    usages.push_back(sat_reply.usage);
    verdict.satisfied = require_field(sat_reply.value, "satisfied", "baseline-satisfy",
                                      &json::is_boolean, "a boolean", sat_reply.usage)
                            .get<bool>();
    verdict.feedback = require_field(sat_reply.value, "feedback", "baseline-satisfy",
                                     &json::is_string, "a string", sat_reply.usage)
                           .get<std::string>();

    if (verdict.satisfied && verdict.hypothesis.empty()) {
        throw ProtocolError("baseline verdict is satisfied but has an empty hypothesis",
                            sat_reply.value.dump(), sat_reply.usage);
    }
    if (!verdict.satisfied && verdict.feedback.empty()) {
        throw ProtocolError("baseline verdict is unsatisfied but has no feedback",
                            sat_reply.value.dump(), sat_reply.usage);
    }
    return {std::move(verdict), std::move(usages)};
}

RefineResult refine_notes(const Notes& notes, const std::string& user_query,
                          const PromptLibrary& prompts, ChatProvider& provider,
                          CostLedger& ledger, double temperature, int max_tokens, int iteration) {
    if (notes.empty()) {
        throw InvalidInput("refine: notes are empty");
    }

    auto prompt =
        prompts.render(RoleTag::Refine, {{"user_query", user_query}, {"notes", notes.text}});

    ChatRequest chat_request;
    chat_request.role_tag = RoleTag::Refine;
    chat_request.system_prompt = prompt.system;
    chat_request.user_prompt = prompt.user;
    chat_request.temperature = temperature;
    chat_request.max_tokens = max_tokens;
    chat_request.json_mode = false;
    chat_request.iteration = iteration;

    ChatTextResult reply = ledgered_chat_text(provider, chat_request, ledger);

    RefineResult result;
    result.notes = Notes{reply.text};
    result.usage = reply.usage;
    result.compression_ratio =
        static_cast<double>(reply.text.size()) / static_cast<double>(notes.text.size());
    return result;
}

} // namespace ragloop
