#include "chr/corpus.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chr/error.hpp"

namespace chr {

std::filesystem::path default_corpus_dir() {
  if (const char* env = std::getenv("CHR_CORPUS_DIR"); env && *env) return env;
  return CHR_CORPUS_DIR;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program load_program(const std::filesystem::path& path) {
  return parse_program(read_file(path));
}

Manifest load_manifest(const std::filesystem::path& dir) {
  Manifest m;
  m.dir = dir;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(dir / "manifest.json"));
    for (const auto& p : j.at("programs")) {
      ProgramGroup g;
      g.group = p.at("group").get<std::string>();
      g.files = p.at("files").get<std::vector<std::string>>();
      m.programs.push_back(std::move(g));
    }
    for (const auto& f : j.at("fixtures")) {
      Fixture x;
      x.name = f.at("name").get<std::string>();
      x.program = f.at("program").get<std::string>();
      x.goal = f.at("goal").get<std::string>();
      x.steps = f.value("steps", std::size_t{0});
      x.confluent = f.value("confluent", true);
      x.exit = f.value("exit", 0);
      x.expect = f.value("expect", std::vector<std::string>{});
      x.exact = f.value("exact", false);
      m.fixtures.push_back(std::move(x));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Syntax, "manifest.json: " + std::string(e.what()));
  }
  return m;
}

}  // namespace chr
