#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toolwear/types.hpp"

namespace toolwear {

// One tool's wear history.  x is cumulative sliding distance in km, y the
// measured surface roughness in um.  revealed marks labels visible to the
// fitting code; masked points keep their y for later scoring but never enter
// a likelihood.
struct ToolSeries {
  int tool_id = 0;
  VecXd x;
  VecXd y;
  std::vector<std::uint8_t> revealed;

  Index size() const { return x.size(); }
  Index n_revealed() const;
  VecXd revealed_x() const;
  VecXd revealed_y() const;
  std::vector<Index> hidden_indices() const;
};

struct PopulationDataset {
  std::vector<ToolSeries> tools;
  // Grid spacing hint; used to extend a horizon one step past the last
  // measurement.  Inferred from the data when loading.
  double step_km = 0.0;

  Index n_tools() const { return static_cast<Index>(tools.size()); }
  int index_of(int tool_id) const;  // -1 if absent
  const ToolSeries& tool(int tool_id) const;
  ToolSeries& tool(int tool_id);

  // Throws ConfigError on structural problems: no tools, duplicated ids,
  // length mismatches, non-increasing or negative x, non-finite values.
  void validate() const;
};

// CSV exchange format, header exactly:
//   tool_id,sliding_distance_km,roughness_um,revealed
// Rows are grouped by tool in file order.  Loading validates the result;
// parse failures report the 1-based line number.
PopulationDataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const PopulationDataset& ds, const std::string& path);

}  // namespace toolwear
