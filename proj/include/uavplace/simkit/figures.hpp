// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavplace/simkit/artifacts.hpp"
#include "uavplace/simkit/runner.hpp"
#include "uavplace/simkit/svg.hpp"

namespace uavplace::simkit {

const std::vector<std::string>& figure_ids();

/// Pinned default configuration of a figure: an experiment document plus an
/// "analysis" object with figure-specific settings. Throws
/// std::invalid_argument for an unknown id.
Json default_figure_config(const std::string& id);

struct FigureOptions {
  std::optional<std::uint64_t> seed;       // overrides the config seed
  std::optional<Json> quadrature;          // replaces the config quadrature object
  std::size_t jobs = 1;
  JobProgressFn progress;
};

struct FigureDataset {
  std::string id;
  Json config;  // the document actually used, overrides applied
  std::uint64_t seed = 0;
  CsvTable table;
  Plot plot;
  Json summary;  // figure-specific derived quantities (may be null)
  bool complete = true;
};

FigureDataset compute_figure(const std::string& id, const FigureOptions& options = {});
FigureDataset compute_figure(const std::string& id, Json config, const FigureOptions& options);

/// Writes <id>.csv, <id>.svg, <id>_summary.json (when present) and
/// manifest.json into dir.
void write_figure(const FigureDataset& fig, const std::filesystem::path& dir);

}  // namespace uavplace::simkit
