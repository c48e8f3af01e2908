// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uavplace/simkit/config.hpp"

namespace uavplace::simkit {

std::string tool_version();

/// %.12g, with "inf", "-inf" and "nan" spelled out.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  /// Index of a column, or throws std::out_of_range.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

/// Provenance written into every artifact.
struct Stamp {
  std::string kind;  // e.g. "figure fig2" or "sweep"
  Json config;       // canonical config that produced the artifact
  std::uint64_t seed = 0;
  bool complete = true;

  std::string hash() const { return config_hash(config); }
};

/// '#'-prefixed provenance lines, a header row, then the rows.
std::string render_csv(const CsvTable& table, const Stamp& stamp);
CsvTable parse_csv(const std::string& text);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

/// Output directory with a manifest.json listing every file written through it
/// (name, byte count, FNV-1a digest) under one config hash.
class ArtifactStore {
 public:
  ArtifactStore(std::filesystem::path dir, Stamp stamp);

  const std::filesystem::path& dir() const { return dir_; }
  const Stamp& stamp() const { return stamp_; }
  void mark_incomplete() { stamp_.complete = false; }

  std::filesystem::path write_csv(const std::string& name, const CsvTable& table);
  /// Adds "config", "config_hash", "seed", "tool_version" to the object.
  std::filesystem::path write_json(const std::string& name, Json body);
  /// SVG with the provenance in a leading XML comment.
  std::filesystem::path write_svg(const std::string& name, const std::string& svg);
  std::filesystem::path write_manifest();

 private:
  std::filesystem::path put(const std::string& name, const std::string& bytes);

  std::filesystem::path dir_;
  Stamp stamp_;
  Json files_ = Json::array();
};

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
  std::size_t files_checked = 0;
};

/// Recomputes the config hash embedded in every artifact listed by the
/// manifest of `dir`, and each file's digest.
VerifyReport verify_artifacts(const std::filesystem::path& dir);

}  // namespace uavplace::simkit
