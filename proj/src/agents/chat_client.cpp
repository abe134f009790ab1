#include "weaver/agents/chat_client.hpp"

#include <cstdlib>
#include <memory>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "weaver/core/errors.hpp"

namespace weaver {

using nlohmann::json;

ChatEndpoint ChatEndpoint::from_env() {
    ChatEndpoint ep;
    if (const char* url = std::getenv("WEAVER_CHAT_URL")) ep.url = url;
    if (const char* tok = std::getenv("WEAVER_CHAT_TOKEN")) ep.token = tok;
    return ep;
}

std::string encode_chat_request(const ChatRequest& request) {
    json msgs = json::array();
    for (const auto& m : request.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    json body = {{"model", request.model}, {"messages", std::move(msgs)}, {"max_tokens", request.max_tokens}};
    return body.dump();
}

ChatResponse decode_chat_response(const std::string& body) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw BackendUnavailable("chat response is not a JSON object");
    if (!doc.contains("text") || !doc["text"].is_string()) throw BackendUnavailable("chat response has no text");
    if (!doc.contains("usage") || !doc["usage"].is_object()) throw MalformedUsage("chat response has no usage");
    const json& u = doc["usage"];
    for (const char* key : {"input_tokens", "output_tokens"}) {
        if (!u.contains(key) || !u[key].is_number_integer() || u[key].get<std::int64_t>() < 0)
            throw MalformedUsage(std::string("chat response usage lacks a valid ") + key);
    }
    return {doc["text"].get<std::string>(), {u["input_tokens"].get<std::int64_t>(), u["output_tokens"].get<std::int64_t>()}};
}

HttpTransport make_http_transport(const ChatEndpoint& endpoint, std::chrono::seconds timeout) {
    if (endpoint.url.empty()) throw ConfigError("chat endpoint URL is not set (WEAVER_CHAT_URL)");
    auto scheme_end = endpoint.url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("chat endpoint URL needs a scheme: " + endpoint.url);
    auto path_start = endpoint.url.find('/', scheme_end + 3);
    std::string origin = endpoint.url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : endpoint.url.substr(path_start);
    auto client = std::make_shared<httplib::Client>(origin);
    client->set_connection_timeout(timeout);
    client->set_read_timeout(timeout);
    httplib::Headers headers;
    if (!endpoint.token.empty()) headers.emplace("Authorization", "Bearer " + endpoint.token);
    return [client, path, headers](const std::string& body) -> HttpReply {
        auto res = client->Post(path, headers, body, "application/json");
        if (!res) return {0, httplib::to_string(res.error())};
        return {res->status, res->body};
    };
}

ChatClient::ChatClient(const ChatEndpoint& endpoint, RetryPolicy retry)
    : transport_(make_http_transport(endpoint)), retry_(retry) {}

ChatClient::ChatClient(HttpTransport transport, RetryPolicy retry) : transport_(std::move(transport)), retry_(retry) {
    if (!transport_) throw InvalidArgument("chat client needs a transport");
    if (retry_.max_attempts < 1) throw InvalidArgument("chat client needs at least one attempt");
}

ChatResponse ChatClient::complete(const ChatRequest& request) const {
    if (request.messages.empty()) throw InvalidArgument("chat request has no messages");
    if (request.model.empty()) throw InvalidArgument("chat request has no model");
    if (request.max_tokens < 1) throw InvalidArgument("chat request max_tokens must be positive");
    const std::string body = encode_chat_request(request);

    std::string last_error;
    auto backoff = retry_.base_backoff;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        HttpReply reply = transport_(body);
        if (reply.status >= 200 && reply.status < 300) return decode_chat_response(reply.body);
        bool transient = reply.status == 0 || reply.status == 429 || reply.status >= 500;
        last_error = reply.status == 0 ? "transport error: " + reply.body : "HTTP " + std::to_string(reply.status);
        if (!transient) throw BackendUnavailable("chat endpoint rejected request: " + last_error);
        if (attempt < retry_.max_attempts && backoff.count() > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw BackendUnavailable("chat endpoint failed after " + std::to_string(retry_.max_attempts) +
                             " attempts: " + last_error);
}

ChatAgentBackend::ChatAgentBackend(const ChatClient& client, std::map<Role, std::string> role_prompts, int max_tokens)
    : client_(client), role_prompts_(std::move(role_prompts)), max_tokens_(max_tokens) {
    for (Role r : {Role::Searcher, Role::Reader, Role::Reasoner, Role::Critic})
        if (!role_prompts_.count(r)) role_prompts_[r] = default_role_prompts().at(r);
}

std::map<Role, std::string> ChatAgentBackend::default_role_prompts() {
    return {
        {Role::Searcher,
         "You are a search agent. Given a query, list the five most relevant documents as "
         "(doc_id, title, snippet) lines."},
        {Role::Reader, "You are a document reader. Given document ids or URLs, return their full content."},
        {Role::Reasoner,
         "You are a reasoning agent. Work through the problem step by step using the evidence provided "
         "and end with a line 'answer: <final answer>'."},
        {Role::Critic,
         "You are a critic. Given the task state and gathered information, identify what is still missing "
         "and recommend what to search for next."},
    };
}

std::vector<ChatMessage> ChatAgentBackend::render(const WorkerAgent& agent, std::string_view subtask,
                                                  const CallContext& ctx) const {
    std::string user;
    if (ctx.task != nullptr) user += "Task: " + ctx.task->question + "\n\n";
    auto outs = ctx.outputs();
    if (!outs.empty()) {
        user += "Context so far:\n";
        for (std::size_t i = 0; i < outs.size(); ++i) {
            user += "[" + std::to_string(i) + "] ";
            user += outs[i];
            user += '\n';
        }
        user += '\n';
    }
    user += "Subtask: ";
    user += subtask;
    return {{"system", role_prompts_.at(agent.role)}, {"user", user}};
}

InvocationResult ChatAgentBackend::invoke(const WorkerAgent& agent, std::string_view subtask, const CallContext& ctx) {
    ChatRequest req{agent.model, render(agent, subtask, ctx), max_tokens_};
    ChatResponse resp = client_.complete(req);
    return {resp.text, resp.usage};
}

}  // namespace weaver
