// tools/derev_main.cpp

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

#include <fstream>
#include <iostream>
#include <memory>

#include "commands.hpp"

namespace derev::tool {

namespace {

// Re-executes the argv stored in a run manifest.
void register_rerun(CLI::App& app, const CliContext& ctx) {
  auto manifest = std::make_shared<std::string>();
  CLI::App* cmd = app.add_subcommand(
      "rerun", "Re-execute the command recorded in a run manifest");
  cmd->add_option("manifest", *manifest, "Run manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->callback([manifest, &ctx] {
    if (ctx.depth > 0) throw std::runtime_error("rerun: refusing to nest reruns");
    std::ifstream in(*manifest);
    nlohmann::json doc;
    in >> doc;
    if (!doc.contains("argv") || !doc["argv"].is_array())
      throw std::runtime_error("rerun: " + *manifest + " has no argv record");
    const std::vector<std::string> argv =
        doc["argv"].get<std::vector<std::string>>();
    if (!argv.empty() && argv.front() == "rerun")
      throw std::runtime_error("rerun: manifest records a rerun");
    const int status = run_cli(argv, ctx.depth + 1);
    if (status != 0) throw std::runtime_error("rerun: replay failed");
  });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, int depth) {
  CliContext ctx;
  ctx.argv = args;
  ctx.depth = depth;

  CLI::App app{"Multichannel speech dereverberation and denoising toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  register_enhance(app, ctx);
  register_train(app, ctx);
  register_simulate(app, ctx);
  register_eval(app, ctx);
  register_rerun(app, ctx);

  try {
    // CLI11 wants argv in reverse order for the vector overload
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "derev: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace derev::tool

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return derev::tool::run_cli(args);
}
