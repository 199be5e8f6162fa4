#pragma once

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "toolalign/sampling.hpp"

namespace toolalign {

/// Chat-completion style client for a live model endpoint. One name per
/// request: the rendered prompt goes out as a single user message and the
/// raw completion text comes back for sanitization upstream.
class HttpSampler : public Sampler {
public:
    struct Options {
        std::string base_url;      // e.g. "http://localhost:8000/v1"
        std::string model;
        std::string api_key;       // empty: no Authorization header
        int transport_retries = 3;
        int timeout_seconds = 60;
    };

    explicit HttpSampler(Options options) : options_(std::move(options)) {
        split_base_url();
    }

    static std::string api_key_from_env(const std::string& env_var) {
        if (env_var.empty()) return "";
        const char* v = std::getenv(env_var.c_str());
        if (!v)
            throw ConfigError("environment variable " + env_var +
                              " named by --api-key-env is not set");
        return v;
    }

    std::string generate(const SampleRequest& request) override {
        count_request();
        nlohmann::json body;
        body["model"] = options_.model;
        body["messages"] = nlohmann::json::array(
            {nlohmann::json{{"role", "user"}, {"content", request.prompt}}});
        body["temperature"] = request.temperature;
        body["max_tokens"] = request.max_output_tokens;
        std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt <= options_.transport_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(250 * (1 << (attempt - 1))));
            httplib::Client client(host_.c_str());
            client.set_connection_timeout(options_.timeout_seconds, 0);
            client.set_read_timeout(options_.timeout_seconds, 0);
            httplib::Headers headers;
            if (!options_.api_key.empty())
                headers.emplace("Authorization", "Bearer " + options_.api_key);
            auto res = client.Post((path_prefix_ + "/chat/completions").c_str(), headers,
                                   payload, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "server error: HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw SamplerError("sampler request failed: HTTP " + std::to_string(res->status) +
                                   " " + res->body);
            try {
                auto doc = nlohmann::json::parse(res->body);
                return doc.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw SamplerError(std::string("unexpected completion payload: ") + e.what());
            }
        }
        throw SamplerError("sampler unreachable after " +
                           std::to_string(options_.transport_retries + 1) + " attempts (" +
                           last_error + ")");
    }

    std::string id() const override { return options_.model; }

private:
    void split_base_url() {
        // httplib wants scheme://host[:port] separate from the path
        std::string url = options_.base_url;
        while (!url.empty() && url.back() == '/') url.pop_back();
        size_t scheme = url.find("://");
        size_t path_start = scheme == std::string::npos ? url.find('/')
                                                        : url.find('/', scheme + 3);
        if (path_start == std::string::npos) {
            host_ = url;
            path_prefix_ = "";
        } else {
            host_ = url.substr(0, path_start);
            path_prefix_ = url.substr(path_start);
        }
    }

    Options options_;
    std::string host_;
    std::string path_prefix_;
};

}  // namespace toolalign
