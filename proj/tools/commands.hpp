// tools/commands.hpp

// Copyright 2026  The derev Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DEREV_TOOLS_COMMANDS_HPP_
#define DEREV_TOOLS_COMMANDS_HPP_

#include <CLI11.hpp>

#include "tool_util.hpp"

namespace derev::tool {

void register_enhance(CLI::App& app, const CliContext& ctx);
void register_train(CLI::App& app, const CliContext& ctx);
void register_simulate(CLI::App& app, const CliContext& ctx);
void register_eval(CLI::App& app, const CliContext& ctx);

// Parses and executes one command line (without the program name).
int run_cli(const std::vector<std::string>& args, int depth = 0);

}  // namespace derev::tool

#endif  // DEREV_TOOLS_COMMANDS_HPP_
