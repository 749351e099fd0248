#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fhtlr/errors.hpp"
#include "fhtlr/parafac.hpp"
#include "fhtlr/tabular_agents.hpp"

#include <nlohmann/json.hpp>

namespace fhtlr {

// 17 significant digits: a double round-trips losslessly through this.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // binary: identical bytes everywhere
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

// A T x S x A value table as CSV: one row per cell, t external (1..T),
// state/action as flat indices.
inline void write_value_table_csv(const std::filesystem::path& path, int horizon,
                                  std::size_t num_states, std::size_t num_actions,
                                  const std::vector<double>& values) {
  if (values.size() != static_cast<std::size_t>(horizon) * num_states * num_actions) {
    throw ShapeError("value table size does not match (T, S, A)");
  }
  auto out = open_for_write(path);
  out << "t,state,action,value\n";
  std::size_t i = 0;
  for (int t = 1; t <= horizon; ++t) {
    for (std::size_t s = 0; s < num_states; ++s) {
      for (std::size_t a = 0; a < num_actions; ++a, ++i) {
        out << t << ',' << s << ',' << a << ',' << format_double(values[i]) << '\n';
      }
    }
  }
}

inline void export_table_csv(const std::filesystem::path& path, const FhqAgent& agent) {
  const auto& space = agent.space();
  write_value_table_csv(path, space.horizon(), space.num_states(), space.num_actions(),
                        agent.table());
}

inline void export_table_csv(const std::filesystem::path& path, const StationaryQAgent& agent) {
  const auto& space = agent.space();
  auto out = open_for_write(path);
  out << "state,action,value\n";
  std::size_t i = 0;
  for (std::size_t s = 0; s < space.num_states(); ++s) {
    for (std::size_t a = 0; a < space.num_actions(); ++a, ++i) {
      out << s << ',' << a << ',' << format_double(agent.table()[i]) << '\n';
    }
  }
}

inline void write_policy_csv(const std::filesystem::path& path, int horizon,
                             std::size_t num_states, const std::vector<int>& policy) {
  if (policy.size() != static_cast<std::size_t>(horizon) * num_states) {
    throw ShapeError("policy table size does not match (T, S)");
  }
  auto out = open_for_write(path);
  out << "t,state,action\n";
  std::size_t i = 0;
  for (int t = 1; t <= horizon; ++t) {
    for (std::size_t s = 0; s < num_states; ++s, ++i) {
      out << t << ',' << s << ',' << policy[i] << '\n';
    }
  }
}

// PARAFAC checkpoint: factor<d>.csv per factor with header k0..k{K-1}, one
// row per coordinate of that dimension, plus manifest.json with dims, rank
// and the seed the run was started from.
inline void save_checkpoint(const std::filesystem::path& dir, const ParafacModel& model,
                            std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (int d = 0; d < model.order(); ++d) {
    auto out = open_for_write(dir / ("factor" + std::to_string(d) + ".csv"));
    const Matrix& f = model.factor(d);
    for (int k = 0; k < f.cols; ++k) out << (k ? "," : "") << 'k' << k;
    out << '\n';
    for (int r = 0; r < f.rows; ++r) {
      for (int k = 0; k < f.cols; ++k) out << (k ? "," : "") << format_double(f.at(r, k));
      out << '\n';
    }
  }
  nlohmann::json manifest;
  manifest["schema_version"] = 1;
  manifest["dims"] = model.dims();
  manifest["rank"] = model.rank();
  manifest["seed"] = seed;
  auto out = open_for_write(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

inline ParafacModel load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw Error("cannot open " + (dir / "manifest.json").string());
  nlohmann::json manifest = nlohmann::json::parse(mf);
  const std::vector<int> dims = manifest.at("dims").get<std::vector<int>>();
  const int rank = manifest.at("rank").get<int>();
  ParafacModel model(dims, rank);
  for (int d = 0; d < model.order(); ++d) {
    const auto path = dir / ("factor" + std::to_string(d) + ".csv");
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error("empty factor file " + path.string());
    Matrix& f = model.factor(d);
    for (int r = 0; r < f.rows; ++r) {
      if (!std::getline(in, line)) {
        throw ShapeError("factor file " + path.string() + " has too few rows");
      }
      std::stringstream ss(line);
      std::string cell;
      for (int k = 0; k < f.cols; ++k) {
        if (!std::getline(ss, cell, ',')) {
          throw ShapeError("factor file " + path.string() + " has too few columns");
        }
        f.at(r, k) = std::stod(cell);
      }
    }
  }
  return model;
}

}  // namespace fhtlr
