#include "collab/agent/demo.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "collab/agent/agent.hpp"

namespace collab::agent {

namespace {

constexpr std::size_t kFetchedHits = 2;

bool offered(const PromptView& v, std::string_view tool) {
    return std::find(v.tools.begin(), v.tools.end(), tool) != v.tools.end();
}

json step(const PromptView& v) {
    if (v.evidence.empty()) {
        return {{"action", "tools"},
                {"reasoning", "Search the indexed artifacts for the query."},
                {"calls", json::array({{{"tool", "search_sessions"}, {"arguments", {{"query", v.query}}}}})}};
    }
    const auto& last = v.evidence.back();
    json calls = json::array();
    for (const auto& r : last["results"]) {
        if (r["tool"] != "search_sessions" || !r["ok"].get<bool>() || !r.contains("payload")) continue;
        const auto& hits = r["payload"]["hits"];
        for (std::size_t i = 0; i < hits.size() && i < kFetchedHits; ++i) {
            const auto did = hits[i]["discussion_id"].get<std::string>();
            for (const char* tool : {"get_assessment", "get_concept_map", "get_transcript"}) {
                if (offered(v, tool)) calls.push_back({{"tool", tool}, {"arguments", {{"discussion_id", did}}}});
            }
        }
    }
    if (calls.empty()) return {{"action", "finish"}, {"reasoning", "Nothing further to fetch."}};
    return {{"action", "tools"}, {"reasoning", "Fetch the artifacts of the top matches."}, {"calls", calls}};
}

json synthesis(const PromptView& v) {
    std::vector<std::string> found;
    std::set<std::pair<std::string, std::string>> cited;
    std::map<std::string, std::string> strongest;
    for (const auto& it : v.evidence) {
        for (const auto& r : it["results"]) {
            if (!r["ok"].get<bool>()) continue;
            if (r["tool"] == "search_sessions" && r.contains("payload")) {
                for (const auto& h : r["payload"]["hits"]) found.push_back(h["discussion_id"].get<std::string>());
                continue;
            }
            for (const auto& c : r["evidence"]) {
                cited.insert({c["discussion_id"].get<std::string>(), c["kind"].get<std::string>()});
            }
            if (r["tool"] == "get_assessment" && r.contains("payload")) {
                const json* best = nullptr;
                for (const auto& d : r["payload"]["dimensions"]) {
                    if (!best || d["score"].get<int>() > (*best)["score"].get<int>()) best = &d;
                }
                if (best) {
                    strongest[r["payload"]["discussion_id"].get<std::string>()] =
                        (*best)["dimension"].get<std::string>() + " (" + std::to_string((*best)["score"].get<int>()) + ")";
                }
            }
        }
    }
    std::string answer;
    if (v.stopped_reason == StopReason::iteration_cap) answer += "Evidence is incomplete. ";
    if (found.empty()) {
        answer += "No indexed artifact matched the query.";
    } else {
        answer += "Most relevant discussions:";
        for (std::size_t i = 0; i < found.size() && i < kFetchedHits; ++i) {
            answer += (i ? ", " : " ") + found[i];
            if (const auto s = strongest.find(found[i]); s != strongest.end()) answer += " (strongest: " + s->second + ")";
        }
        answer += ".";
    }
    json citations = json::array();
    for (const auto& [did, kind] : cited) citations.push_back({{"discussion_id", did}, {"kind", kind}});
    return {{"answer", answer}, {"citations", citations}};
}

}  // namespace

void install_demo_agent_script(gen::MockProvider& mock) {
    const auto tag = mock.tag();
    mock.set_handler(gen::PromptKind::agent_step, [tag](const gen::GenerationRequest& r) {
        return gen::json_response(step(parse_prompt_view(r)), tag);
    });
    mock.set_handler(gen::PromptKind::synthesis, [tag](const gen::GenerationRequest& r) {
        return gen::json_response(synthesis(parse_prompt_view(r)), tag);
    });
}

}  // namespace collab::agent
