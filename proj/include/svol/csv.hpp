#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "svol/model.hpp"

namespace svol {

enum class IngestMode { Prices, Returns };

/// Reads a CSV of dated prices or returns and produces the return series.
///
/// Prices mode expects a header containing `date` and `price` columns and at
/// least two rows; it emits T-1 log-returns log(P_t / P_{t-1}). Returns mode
/// accepts `date,return` or the simulator's own `t,r[,h]` layout, so simulated
/// output re-ingests losslessly. Dates are ISO-8601 (or a plain integer index)
/// and must be strictly increasing; gaps between rows are permitted.
SeriesPair ingest(const std::filesystem::path& file, IngestMode mode);

/// Shortest round-trip decimal rendering of a double (to_chars).
std::string format_double(double x);

/// Writes a simulated path as CSV. One path: header `t,r,h`; several paths
/// get a leading `path` column.
void write_path_csv(const std::filesystem::path& file,
                    std::span<const SeriesPair> paths);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& file);
void write_csv(const std::filesystem::path& file, const CsvTable& table);

}  // namespace svol
