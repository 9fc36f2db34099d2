#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ttoent {

using FieldValue = std::variant<std::string, double, long, bool>;

/// 17-significant-digit formatting: doubles round-trip exactly through text.
std::string format_field(const FieldValue& value);

/// One row of machine-readable output. `parameters` is the flattened,
/// command-specific parameter set; the remaining fields are common to every
/// command. wall_time_seconds is only populated by the timing command so
/// that reruns of every other command are byte-identical.
struct ResultRecord {
  std::string command;
  std::vector<std::pair<std::string, FieldValue>> parameters;
  double eof_bits = 0.0;
  std::optional<double> exact_eof;  // abs_error is emitted iff this is present
  int k0 = 0;
  int k = 0;
  int m = 0;
  long evaluations = 0;
  std::optional<double> wall_time_seconds;
  bool converged = false;
  std::uint64_t seed = 0;
};

/// Header: command,<params...>,E_F,exact_eof,abs_error,K0,K,M,evaluations,
/// wall_time_seconds,converged,seed,artifact_version. Parameter columns are
/// the union over records in first-seen order.
void write_csv(std::ostream& os, const std::vector<ResultRecord>& records);
void write_json(std::ostream& os, const std::vector<ResultRecord>& records);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(std::istream& is);

/// Parses "0.1", "0.1,0.2,0.3" or "lo:hi:step" (inclusive of hi up to
/// rounding) into a value list. Throws InvalidInputError on malformed input.
std::vector<double> parse_value_grid(const std::string& text);

/// Runs fn(0..count-1) on `workers` threads pulling from a shared queue.
/// Results must be written to pre-sized slots keyed by the index, which makes
/// the merged output independent of scheduling. The first exception thrown by
/// a job is rethrown after all workers join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace ttoent
