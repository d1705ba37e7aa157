#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kneecast {

/// Entry point of the `kneecast` tool. Subcommands: synth, preprocess, train,
/// transfer, finetune, eval, predict. Returns 0 on success, 1 for usage or
/// configuration errors, 2 for data errors and 3 for numeric failures; every
/// failure writes one line
///   error code=<n> kind=<kind> category=<tag> message="<text>"
/// to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace kneecast
