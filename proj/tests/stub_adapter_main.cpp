// Records every request it receives and answers with canned responses, so
// tests can check what the framework actually sends across the adapter
// boundary. Usage: stub_adapter <request.json> <response.json>; set
// XLING_STUB_RECORD to append request JSON lines to a file.
#include <cstdlib>
#include <fstream>
#include <string>

#include "vendor/json.hpp"

int main(int argc, char** argv) {
  if (argc < 3) return 64;

  nlohmann::json request;
  {
    std::ifstream in(argv[1]);
    if (!in) return 66;
    try {
      request = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error&) {
      return 65;
    }
  }

  if (const char* record = std::getenv("XLING_STUB_RECORD"); record && *record) {
    std::ofstream log(record, std::ios::app);
    log << request.dump() << "\n";
  }

  nlohmann::json response;
  const std::string action = request.value("action", "");
  if (action == "train" || action == "fine_tune") {
    response["model_ref"] = "stub-model-" + action;
  } else if (action == "predict") {
    nlohmann::json predictions = nlohmann::json::array();
    for (const auto& item : request.at("texts")) {
      predictions.push_back(
          {{"post_id", item.at("post_id")}, {"label", "normal"}, {"score", 0.25}});
    }
    response["predictions"] = predictions;
  } else {
    return 65;
  }

  std::ofstream out(argv[2]);
  out << response.dump();
  return 0;
}
