#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "adavu/config.hpp"
#include "adavu/confusion.hpp"
#include "adavu/motion_segmentation.hpp"

namespace adavu::cli {

// Flags shared by the subcommands; empty strings mean "not given".
struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string seed;
  std::string classifier;
  std::string out;
  std::string model;
  std::string input;
  std::string frames;
  std::string beats;
  std::string annotations;
  std::string skeleton;
  std::string kframes;
  std::string counts;
  std::string kind;
  std::string count;
  bool validate = false;
  bool force = false;
};

// Config file, then --set overrides, then the dedicated flags.
PipelineConfig resolve_config(const Options& options);

SegmentationReport cmd_segment(const Options& options, std::ostream& out);
void cmd_gen(const Options& options, std::ostream& out);
void cmd_features(const Options& options, std::ostream& out);
void cmd_train(const Options& options, std::ostream& out);
void cmd_classify(const Options& options, std::ostream& out);
ConfusionMatrix cmd_evaluate(const Options& options, std::ostream& out);
void cmd_pipeline(const Options& options, std::ostream& out);

// Parses argv and runs one subcommand. Returns the process exit code:
// 0 success, 2 bad input, 3 numeric failure, 4 I/O failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adavu::cli
