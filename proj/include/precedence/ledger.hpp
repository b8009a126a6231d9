#pragma once

// Append-only store of precedents: every recorded outcome, keyed by the
// canonical identity of its preparation and measurement.
//
// File format (one JSON object per line, each line newline-terminated):
//   {"format":"precedence-ledger","version":1}
//   {"prep":"<64 hex>","meas":"<64 hex>","outcome":k,"seq":n,"wall_time":"2026-01-02T03:04:05.123456Z"}
//
// A Ledger is not synchronized; one writer owns it. Parallel studies use
// separate ledgers.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "precedence/preparation.hpp"

namespace precedence::ledger {

struct PrecedentRecord {
  PreparationKey prep;
  MeasurementKey meas;
  std::int32_t outcome = 0;
  std::uint64_t seq_no = 0;
  /// Microseconds since the Unix epoch, UTC.
  std::int64_t wall_time_us = 0;

  bool operator==(const PrecedentRecord&) const = default;
};

struct StreamKey {
  PreparationKey prep;
  MeasurementKey meas;
  auto operator<=>(const StreamKey&) const = default;
};

/// Outcomes of one (preparation, measurement) stream.
struct Ensemble {
  std::vector<std::int32_t> sequence;    // seq_no order
  std::map<std::int32_t, std::uint64_t> counts;
};

std::string format_iso8601(std::int64_t wall_time_us);
/// Parses the exact form produced by format_iso8601. Throws parse.
std::int64_t parse_iso8601(std::string_view text);

class Ledger {
 public:
  using Clock = std::function<std::int64_t()>;

  Ledger();
  explicit Ledger(Clock clock);

  /// Appends an outcome. Throws out_of_range unless 0 <= outcome < n_outcomes.
  /// Returns the record's seq_no within its stream.
  std::uint64_t record(const PreparationKey& prep, const MeasurementKey& meas, std::int32_t outcome,
                       std::size_t n_outcomes);

  /// Appends an existing record verbatim (used by load). Throws invalid_state
  /// unless seq_no is strictly greater than the stream's last seq_no.
  void append(const PrecedentRecord& rec);

  /// Number of precedents for the stream; 0 for an unknown stream.
  std::uint64_t count(const PreparationKey& prep, const MeasurementKey& meas) const;

  Ensemble ensemble(const PreparationKey& prep, const MeasurementKey& meas) const;

  /// Outcomes in seq_no order; empty for an unknown stream.
  const std::vector<std::int32_t>& sequence(const PreparationKey& prep, const MeasurementKey& meas) const;

  /// Per-outcome counts indexed by outcome (trailing entries may be absent).
  const std::vector<std::uint64_t>& counts(const PreparationKey& prep, const MeasurementKey& meas) const;

  const std::vector<PrecedentRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::vector<StreamKey> streams() const;

 private:
  struct Stream {
    std::vector<std::int32_t> outcomes;
    std::vector<std::uint64_t> counts;
    std::optional<std::uint64_t> last_seq;
  };

  const Stream* find(const PreparationKey& prep, const MeasurementKey& meas) const;

  Clock clock_;
  std::map<StreamKey, Stream> streams_;
  std::vector<PrecedentRecord> records_;
};

/// Writes the ledger atomically (temporary file, then rename).
void save_ledger(const Ledger& ledger, const std::filesystem::path& path);

/// Throws io if the file cannot be read and parse (with the 1-based line
/// number in the message) on any malformed or truncated line.
Ledger load_ledger(const std::filesystem::path& path);

/// Human-readable summary: per-stream counts plus the head and tail of each
/// sequence. `filter` is "PREP:MEAS" (hex digests) or empty for all streams.
std::string inspect(const Ledger& ledger, std::string_view filter = {}, std::size_t head_tail = 10);

}  // namespace precedence::ledger
