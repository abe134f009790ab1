#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "weaver/agents/agent.hpp"

namespace weaver {

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    int max_tokens = 1024;
};

struct ChatResponse {
    std::string text;
    TokenUsage usage;
};

// status == 0 means the request never produced an HTTP response.
struct HttpReply {
    int status = 0;
    std::string body;
};

using HttpTransport = std::function<HttpReply(const std::string& body)>;

struct ChatEndpoint {
    std::string url;
    std::string token;

    // WEAVER_CHAT_URL and WEAVER_CHAT_TOKEN.
    static ChatEndpoint from_env();
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_backoff{250};
};

std::string encode_chat_request(const ChatRequest& request);
ChatResponse decode_chat_response(const std::string& body);

// HTTP(S) POST transport for the endpoint URL.
HttpTransport make_http_transport(const ChatEndpoint& endpoint, std::chrono::seconds timeout = std::chrono::seconds(120));

/// Minimal chat-completion client.
///
/// Wire format: request {model, messages:[{role, content}], max_tokens};
/// response {text, usage:{input_tokens, output_tokens}}. Transport errors,
/// 429 and 5xx are retried with exponential backoff; usage of failed
/// attempts is never reported.
class ChatClient {
public:
    explicit ChatClient(const ChatEndpoint& endpoint, RetryPolicy retry = {});
    ChatClient(HttpTransport transport, RetryPolicy retry);

    ChatResponse complete(const ChatRequest& request) const;

private:
    HttpTransport transport_;
    RetryPolicy retry_;
};

/// Worker backend that plays each role through a chat model.
class ChatAgentBackend final : public AgentBackend {
public:
    ChatAgentBackend(const ChatClient& client, std::map<Role, std::string> role_prompts, int max_tokens = 1024);

    static std::map<Role, std::string> default_role_prompts();

    InvocationResult invoke(const WorkerAgent& agent, std::string_view subtask, const CallContext& ctx) override;

    std::vector<ChatMessage> render(const WorkerAgent& agent, std::string_view subtask, const CallContext& ctx) const;

private:
    const ChatClient& client_;
    std::map<Role, std::string> role_prompts_;
    int max_tokens_;
};

}  // namespace weaver
