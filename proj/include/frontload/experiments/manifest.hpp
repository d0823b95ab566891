#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "frontload/error.hpp"
#include "frontload/experiments/config.hpp"

namespace frontload {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct EmittedFile {
  std::string name;  // relative to the output directory
  std::string checksum;
};

struct RunManifest {
  std::string scenario;
  ParameterMap parameters;
  int digits = 0;
  std::vector<EmittedFile> files;
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, std::string>> notes;
  double wall_seconds = 0;

  [[nodiscard]] bool passed() const {
    for (const auto& a : assertions)
      if (!a.pass) return false;
    return true;
  }

  void check(const std::string& name, bool pass, const std::string& detail = {}) {
    assertions.push_back({name, pass, detail});
  }

  void note(const std::string& key, const std::string& value) { notes.emplace_back(key, value); }

  [[nodiscard]] const EmittedFile* file(const std::string& name) const {
    for (const auto& f : files)
      if (f.name == name) return &f;
    return nullptr;
  }
};

/// Writes `contents` to dir/name and records its checksum.
inline void emit_file(RunManifest& m, const std::filesystem::path& dir, const std::string& name,
                      const std::string& contents) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw DomainError("cannot write " + (dir / name).string());
  out << contents;
  if (!out) throw DomainError("write failed for " + (dir / name).string());
  m.files.push_back({name, hex64(fnv1a64(contents))});
}

inline void write_manifest(std::ostream& os, const RunManifest& m) {
  os << "scenario=" << m.scenario << "\n";
  for (const auto& [k, v] : m.parameters) os << "param." << k << "=" << v << "\n";
  os << "digits=" << m.digits << "\n";
  for (const auto& f : m.files) os << "file." << f.name << "=" << f.checksum << "\n";
  for (const auto& a : m.assertions) {
    os << "assert." << a.name << "=" << (a.pass ? "PASS" : "FAIL") << "\n";
    if (!a.detail.empty()) os << "detail." << a.name << "=" << a.detail << "\n";
  }
  for (const auto& [k, v] : m.notes) os << "note." << k << "=" << v << "\n";
  os << "status=" << (m.passed() ? "PASS" : "FAIL") << "\n";
  os << "wall_seconds=" << std::fixed << std::setprecision(3) << m.wall_seconds << "\n";
}

inline RunManifest read_manifest(std::istream& is) {
  RunManifest m;
  for (const auto& [key, value] : parse_key_values(is)) {
    auto take = [&](const char* prefix) -> std::optional<std::string> {
      std::string p(prefix);
      if (key.rfind(p, 0) == 0) return key.substr(p.size());
      return std::nullopt;
    };
    if (key == "scenario") {
      m.scenario = value;
    } else if (key == "digits") {
      m.digits = std::stoi(value);
    } else if (key == "wall_seconds") {
      m.wall_seconds = std::stod(value);
    } else if (key == "status") {
      continue;
    } else if (auto p = take("param.")) {
      m.parameters[*p] = value;
    } else if (auto f = take("file.")) {
      m.files.push_back({*f, value});
    } else if (auto a = take("assert.")) {
      m.assertions.push_back({*a, value == "PASS", {}});
    } else if (auto d = take("detail.")) {
      for (auto& a : m.assertions)
        if (a.name == *d) a.detail = value;
    } else if (auto n = take("note.")) {
      m.notes.emplace_back(*n, value);
    } else {
      throw DomainError("unknown manifest key '" + key + "'");
    }
  }
  return m;
}

}  // namespace frontload
