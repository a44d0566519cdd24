#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace e2t {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Command {
  enum class Verb { train, tune_k, summarize, evaluate, annotate, stats, gradcheck, help };
  Verb verb = Verb::help;
  std::string config_path;
  std::string data_path;
  std::string dev_path;
  std::string model_dir;
  std::string input_path;
  std::string output_path;
  std::string gazetteer_path;
  std::string candidates = "1,2,5,10,20";
  std::size_t beam = 0;  // 0 keeps the config value
  std::vector<std::pair<std::string, std::string>> overrides;  // --set key=value
  std::string help_text;
};

// Parses argv (without the program name). Throws UsageError on bad input;
// --help anywhere yields a help Command.
Command parse_args(const std::vector<std::string>& args);

// Dispatches a parsed command. Exit code 0 on success, 1 on user error,
// 2 on internal error (including a failing gradient suite).
int run(const Command& cmd);

int run_cli(int argc, char** argv);

}  // namespace e2t
