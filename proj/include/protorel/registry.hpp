#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "protorel/error.hpp"
#include "protorel/protocol.hpp"
#include "protorel/taxonomy.hpp"

namespace protorel {

// A directory of protocol files indexed by protocol id. Files are named
// <id>.json; the id stored inside the file is authoritative.
class Registry {
 public:
  struct Entry {
    std::string id;
    std::filesystem::path path;
  };

  explicit Registry(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  // Entries sorted by id. Files that do not parse as protocols are reported
  // as schema errors rather than skipped.
  std::vector<Entry> list() const {
    std::vector<Entry> out;
    if (!std::filesystem::exists(dir_)) return out;
    if (!std::filesystem::is_directory(dir_))
      throw Error(Errc::io_error, "registry '" + dir_.string() + "' is not a directory");
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
      if (!e.is_regular_file() || e.path().extension() != ".json") continue;
      const auto doc = parse_json_document(read_file(e.path()), e.path().string());
      if (!doc.is_object() || !doc.contains("id") || !doc.at("id").is_string())
        throw Error(Errc::schema_error, e.path().string() + ": not a protocol document");
      out.push_back({doc.at("id").get<std::string>(), e.path()});
    }
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < out.size(); ++i)
      if (out[i].id == out[i - 1].id)
        throw Error(Errc::duplicate_protocol_id, "protocol id '" + out[i].id + "' appears twice in the registry");
    return out;
  }

  std::filesystem::path find(const std::string& id) const {
    for (auto& e : list())
      if (e.id == id) return e.path;
    throw Error(Errc::unknown_protocol, "no protocol '" + id + "' in registry '" + dir_.string() + "'");
  }

  // Validates the file and stores a normalized copy. Returns the stored path.
  std::filesystem::path add(const std::filesystem::path& file, const Taxonomy* tax) const {
    const Protocol p = load_protocol_file(file, tax);
    if (p.id().empty() || p.id().front() == '.' || p.id().find_first_of("/\\") != std::string::npos)
      throw Error(Errc::schema_error, "protocol id '" + p.id() + "' cannot be used as a file name");
    for (const auto& e : list())
      if (e.id == p.id())
        throw Error(Errc::duplicate_protocol_id, "protocol id '" + p.id() + "' is already registered");
    std::filesystem::create_directories(dir_);
    const auto target = dir_ / (p.id() + ".json");
    std::ofstream out(target, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write '" + target.string() + "'");
    out << to_json(p).dump(2) << '\n';
    return target;
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace protorel
