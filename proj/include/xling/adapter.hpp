#pragma once

#include <memory>
#include <string>

#include "xling/backend.hpp"

namespace xling::adapter {

// Wraps an external classifier behind the subprocess contract: the command
// is run as `<command> <request.json> <response.json>` for every train,
// fine_tune, and predict call.
std::unique_ptr<backend::Backend> make_adapter_backend(std::string command);

}  // namespace xling::adapter
