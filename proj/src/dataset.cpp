#include "toolwear/dataset.hpp"

#include <charconv>
#include <cmath>
#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "toolwear/errors.hpp"
#include "toolwear/io.hpp"

namespace toolwear {

Index ToolSeries::n_revealed() const {
  Index n = 0;
  for (auto r : revealed) n += (r != 0);
  return n;
}

VecXd ToolSeries::revealed_x() const {
  VecXd out(n_revealed());
  Index j = 0;
  for (Index i = 0; i < size(); ++i)
    if (revealed[static_cast<std::size_t>(i)]) out[j++] = x[i];
  return out;
}

VecXd ToolSeries::revealed_y() const {
  VecXd out(n_revealed());
  Index j = 0;
  for (Index i = 0; i < size(); ++i)
    if (revealed[static_cast<std::size_t>(i)]) out[j++] = y[i];
  return out;
}

std::vector<Index> ToolSeries::hidden_indices() const {
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (!revealed[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

int PopulationDataset::index_of(int tool_id) const {
  for (std::size_t i = 0; i < tools.size(); ++i)
    if (tools[i].tool_id == tool_id) return static_cast<int>(i);
  return -1;
}

const ToolSeries& PopulationDataset::tool(int tool_id) const {
  int i = index_of(tool_id);
  if (i < 0) throw ConfigError("unknown tool id " + std::to_string(tool_id));
  return tools[static_cast<std::size_t>(i)];
}

ToolSeries& PopulationDataset::tool(int tool_id) {
  int i = index_of(tool_id);
  if (i < 0) throw ConfigError("unknown tool id " + std::to_string(tool_id));
  return tools[static_cast<std::size_t>(i)];
}

void PopulationDataset::validate() const {
  if (tools.empty()) throw ConfigError("dataset has no tools");
  std::set<int> ids;
  for (const auto& t : tools) {
    if (!ids.insert(t.tool_id).second)
      throw ConfigError("duplicate tool id " + std::to_string(t.tool_id));
    if (t.x.size() != t.y.size() ||
        static_cast<std::size_t>(t.x.size()) != t.revealed.size())
      throw ConfigError("tool " + std::to_string(t.tool_id) +
                        ": x, y, revealed lengths differ");
    if (t.x.size() == 0)
      throw ConfigError("tool " + std::to_string(t.tool_id) + " is empty");
    for (Index i = 0; i < t.size(); ++i) {
      if (!std::isfinite(t.x[i]) || !std::isfinite(t.y[i]))
        throw ConfigError("tool " + std::to_string(t.tool_id) +
                          ": non-finite measurement");
      if (t.x[i] < 0.0)
        throw ConfigError("tool " + std::to_string(t.tool_id) +
                          ": sliding distance must be nonnegative");
      if (i > 0 && t.x[i] <= t.x[i - 1])
        throw ConfigError("tool " + std::to_string(t.tool_id) +
                          ": sliding distance must be strictly increasing");
    }
  }
}

namespace {

constexpr const char* kHeader = "tool_id,sliding_distance_km,roughness_um,revealed";

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw IoError(path + ": line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view f, const std::string& path,
                    std::size_t line, const char* col) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || p != f.data() + f.size())
    parse_fail(path, line, std::string("bad ") + col + " value '" +
                               std::string(f) + "'");
  return v;
}

int parse_int(std::string_view f, const std::string& path, std::size_t line,
              const char* col) {
  int v = 0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || p != f.data() + f.size())
    parse_fail(path, line, std::string("bad ") + col + " value '" +
                               std::string(f) + "'");
  return v;
}

double infer_step(const PopulationDataset& ds) {
  std::vector<double> diffs;
  for (const auto& t : ds.tools)
    for (Index i = 1; i < t.size(); ++i) diffs.push_back(t.x[i] - t.x[i - 1]);
  if (diffs.empty()) return 1.0;
  std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2,
                   diffs.end());
  return diffs[diffs.size() / 2];
}

}  // namespace

PopulationDataset load_dataset_csv(const std::string& path) {
  std::string text = read_text_file(path);
  PopulationDataset ds;
  struct Row {
    double x, y;
    std::uint8_t revealed;
  };
  std::vector<std::vector<Row>> rows;
  std::vector<int> ids;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (pos > text.size()) break;
      continue;
    }
    if (line_no == 1) {
      if (line != kHeader)
        parse_fail(path, 1, std::string("expected header '") + kHeader + "'");
      continue;
    }
    auto f = split_fields(line);
    if (f.size() != 4) parse_fail(path, line_no, "expected 4 fields");
    int id = parse_int(f[0], path, line_no, "tool_id");
    Row r;
    r.x = parse_double(f[1], path, line_no, "sliding_distance_km");
    r.y = parse_double(f[2], path, line_no, "roughness_um");
    int rev = parse_int(f[3], path, line_no, "revealed");
    if (rev != 0 && rev != 1)
      parse_fail(path, line_no, "revealed must be 0 or 1");
    r.revealed = static_cast<std::uint8_t>(rev);
    auto it = std::find(ids.begin(), ids.end(), id);
    std::size_t k;
    if (it == ids.end()) {
      k = ids.size();
      ids.push_back(id);
      rows.emplace_back();
    } else {
      k = static_cast<std::size_t>(it - ids.begin());
    }
    rows[k].push_back(r);
  }
  if (ids.empty()) throw IoError(path + ": no data rows");

  for (std::size_t k = 0; k < ids.size(); ++k) {
    ToolSeries t;
    t.tool_id = ids[k];
    Index n = static_cast<Index>(rows[k].size());
    t.x.resize(n);
    t.y.resize(n);
    t.revealed.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      const Row& r = rows[k][static_cast<std::size_t>(i)];
      t.x[i] = r.x;
      t.y[i] = r.y;
      t.revealed[static_cast<std::size_t>(i)] = r.revealed;
    }
    ds.tools.push_back(std::move(t));
  }
  ds.step_km = infer_step(ds);
  try {
    ds.validate();
  } catch (const ConfigError& e) {
    throw IoError(path + ": " + e.what());
  }
  return ds;
}

void save_dataset_csv(const PopulationDataset& ds, const std::string& path) {
  std::string out(kHeader);
  out.push_back('\n');
  for (const auto& t : ds.tools) {
    for (Index i = 0; i < t.size(); ++i) {
      out += std::to_string(t.tool_id);
      out.push_back(',');
      out += fmt_double(t.x[i]);
      out.push_back(',');
      out += fmt_double(t.y[i]);
      out.push_back(',');
      out += t.revealed[static_cast<std::size_t>(i)] ? '1' : '0';
      out.push_back('\n');
    }
  }
  write_text_file(path, out);
}

}  // namespace toolwear
