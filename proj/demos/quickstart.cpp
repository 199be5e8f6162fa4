// Minimal end-to-end walkthrough: align a two-tool schema with a scripted
// sampler, then translate a call back into the original namespace.

#include <iostream>

#include "toolalign/alignment.hpp"
#include "toolalign/sampling.hpp"
#include "toolalign/schema.hpp"
#include "toolalign/translation.hpp"

using namespace toolalign;

int main() {
    const char* schema_text = R"({
      "tools": [
        {
          "name": "get_user_id",
          "description": "Retrieves the unique account identifier for a user.",
          "parameters": {
            "type": "object",
            "properties": {
              "user_id": {"type": "string", "description": "A unique identifier for the user."}
            },
            "required": ["user_id"]
          }
        }
      ]
    })";

    // a scripted sampler stands in for a live model here; see
    // toolalign::HttpSampler for the real thing
    ordered_json script = ordered_json::parse(R"({
      "components": {
        "get_user_id": {
          "samples": ["get_customer_id", "get_customer_id", "get_customer_id",
                      "fetch_user", "get_customer_id", "get_account_id"],
          "greedy": "get_customer_id"
        },
        "get_user_id/user_id": {
          "samples": ["customer_id", "customer_id", "user_id",
                      "customer_id", "account_id", "customer_id"],
          "greedy": "customer_id"
        }
      }
    })");

    ToolSchema schema = load_schema(schema_text);
    FixtureSampler sampler = FixtureSampler::from_json(script);
    SamplerConfig config;
    config.num_candidates = 6;

    AlignmentResult result = align_schema(schema, config, sampler);
    std::cout << "aligned schema:\n" << serialize_schema(result.aligned_schema) << "\n";

    ToolCall call;
    call.tool_name = "get_customer_id";
    call.arguments["customer_id"] = 42;
    call.ns = Namespace::Aligned;

    TranslationResult translated = translate_call(call, result.mapping);
    std::cout << "translated call: " << serialize_tool_call(*translated.call) << "\n";
    return 0;
}
