// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RUMEX_RUN_CONFIG_HPP
#define RUMEX_RUN_CONFIG_HPP

#include <string>

#include "rumex/stream_engine.hpp"

namespace rumex {

// Applies one `section.key = value` setting to the engine configuration.
// Unknown keys and malformed values fail with ConfigError.
void apply_config_entry(EngineConfig& cfg, const std::string& key, const std::string& value);

// key = value per line; '#' starts a comment; blank lines ignored.
// Flags parsed after the file win, so presets stay reproducible.
void load_config_file(EngineConfig& cfg, const std::string& path);

}  // namespace rumex

#endif  // RUMEX_RUN_CONFIG_HPP
