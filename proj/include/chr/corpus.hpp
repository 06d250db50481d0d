#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chr/syntax.hpp"

namespace chr {

struct Fixture {
  std::string name;
  std::string program;  // file name inside the corpus directory
  std::string goal;
  std::size_t steps = 0;  // 0 = default step limit
  bool confluent = true;
  int exit = 0;                       // expected `chr run` exit code
  std::vector<std::string> expect;    // answer lines that must appear
  bool exact = false;                 // answer lines must be exactly `expect`
};

struct ProgramGroup {
  std::string group;
  std::vector<std::string> files;
};

struct Manifest {
  std::filesystem::path dir;
  std::vector<ProgramGroup> programs;
  std::vector<Fixture> fixtures;
};

/// $CHR_CORPUS_DIR if set, else the directory compiled in.
std::filesystem::path default_corpus_dir();

/// Reads `manifest.json` from `dir`. Throws Error{Io} or Error{Syntax}.
Manifest load_manifest(const std::filesystem::path& dir);

/// Throws Error{Io} if the file cannot be read.
std::string read_file(const std::filesystem::path& path);

Program load_program(const std::filesystem::path& path);

}  // namespace chr
