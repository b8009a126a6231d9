#include "precedence/ledger.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "precedence/error.hpp"

namespace precedence::ledger {
namespace {

constexpr const char* kFormatName = "precedence-ledger";
constexpr int kFormatVersion = 1;

std::int64_t system_now_us() {
  using namespace std::chrono;
  return duration_cast<microseconds>(system_clock::now().time_since_epoch()).count();
}

const std::vector<std::int32_t> kEmptySequence;
const std::vector<std::uint64_t> kEmptyCounts;

[[noreturn]] void corrupt(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::parse, "ledger line " + std::to_string(line) + ": " + why);
}

}  // namespace

std::string format_iso8601(std::int64_t wall_time_us) {
  std::int64_t secs = wall_time_us / 1'000'000;
  std::int64_t micros = wall_time_us % 1'000'000;
  if (micros < 0) {
    micros += 1'000'000;
    secs -= 1;
  }
  const auto t = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<long long>(micros));
  return buf;
}

std::int64_t parse_iso8601(std::string_view text) {
  int year, month, day, hour, minute, second;
  long long micros;
  char tail = 0;
  const std::string s(text);
  if (s.size() != 27 ||
      std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%6lld%c", &year, &month, &day, &hour, &minute, &second,
                  &micros, &tail) != 8 ||
      tail != 'Z')
    throw Error(ErrorCode::parse, "wall_time: expected YYYY-MM-DDTHH:MM:SS.ffffffZ");
  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = month - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = minute;
  tm.tm_sec = second;
  const std::time_t secs = timegm(&tm);
  const std::int64_t value = static_cast<std::int64_t>(secs) * 1'000'000 + micros;
  if (format_iso8601(value) != s) throw Error(ErrorCode::parse, "wall_time: not a valid calendar time");
  return value;
}

Ledger::Ledger() : Ledger(system_now_us) {}

Ledger::Ledger(Clock clock) : clock_(std::move(clock)) {}

std::uint64_t Ledger::record(const PreparationKey& prep, const MeasurementKey& meas, std::int32_t outcome,
                             std::size_t n_outcomes) {
  if (outcome < 0 || static_cast<std::size_t>(outcome) >= n_outcomes)
    throw Error(ErrorCode::out_of_range, "ledger: outcome " + std::to_string(outcome) + " outside [0, " +
                                             std::to_string(n_outcomes) + ")");
  Stream& s = streams_[StreamKey{prep, meas}];
  const std::uint64_t seq = s.last_seq ? *s.last_seq + 1 : 0;
  PrecedentRecord rec{prep, meas, outcome, seq, clock_()};
  records_.push_back(rec);
  s.outcomes.push_back(outcome);
  if (s.counts.size() <= static_cast<std::size_t>(outcome)) s.counts.resize(static_cast<std::size_t>(outcome) + 1, 0);
  ++s.counts[static_cast<std::size_t>(outcome)];
  s.last_seq = seq;
  return seq;
}

void Ledger::append(const PrecedentRecord& rec) {
  if (rec.outcome < 0) throw Error(ErrorCode::out_of_range, "ledger: negative outcome");
  Stream& s = streams_[StreamKey{rec.prep, rec.meas}];
  if (s.last_seq && rec.seq_no <= *s.last_seq)
    throw Error(ErrorCode::invalid_state, "ledger: seq_no " + std::to_string(rec.seq_no) +
                                              " does not increase past " + std::to_string(*s.last_seq));
  records_.push_back(rec);
  s.outcomes.push_back(rec.outcome);
  if (s.counts.size() <= static_cast<std::size_t>(rec.outcome))
    s.counts.resize(static_cast<std::size_t>(rec.outcome) + 1, 0);
  ++s.counts[static_cast<std::size_t>(rec.outcome)];
  s.last_seq = rec.seq_no;
}

const Ledger::Stream* Ledger::find(const PreparationKey& prep, const MeasurementKey& meas) const {
  const auto it = streams_.find(StreamKey{prep, meas});
  return it == streams_.end() ? nullptr : &it->second;
}

std::uint64_t Ledger::count(const PreparationKey& prep, const MeasurementKey& meas) const {
  const Stream* s = find(prep, meas);
  return s ? s->outcomes.size() : 0;
}

Ensemble Ledger::ensemble(const PreparationKey& prep, const MeasurementKey& meas) const {
  Ensemble e;
  if (const Stream* s = find(prep, meas)) {
    e.sequence = s->outcomes;
    for (std::size_t k = 0; k < s->counts.size(); ++k)
      if (s->counts[k]) e.counts[static_cast<std::int32_t>(k)] = s->counts[k];
  }
  return e;
}

const std::vector<std::int32_t>& Ledger::sequence(const PreparationKey& prep, const MeasurementKey& meas) const {
  const Stream* s = find(prep, meas);
  return s ? s->outcomes : kEmptySequence;
}

const std::vector<std::uint64_t>& Ledger::counts(const PreparationKey& prep, const MeasurementKey& meas) const {
  const Stream* s = find(prep, meas);
  return s ? s->counts : kEmptyCounts;
}

std::vector<StreamKey> Ledger::streams() const {
  std::vector<StreamKey> out;
  out.reserve(streams_.size());
  for (const auto& [key, stream] : streams_) out.push_back(key);
  return out;
}

void save_ledger(const Ledger& ledger, const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "ledger: cannot open '" + tmp.string() + "' for writing");
    out << nlohmann::json{{"format", kFormatName}, {"version", kFormatVersion}}.dump() << '\n';
    for (const PrecedentRecord& r : ledger.records()) {
      nlohmann::json line{{"prep", r.prep.digest.hex()},
                          {"meas", r.meas.digest.hex()},
                          {"outcome", r.outcome},
                          {"seq", r.seq_no},
                          {"wall_time", format_iso8601(r.wall_time_us)}};
      out << line.dump() << '\n';
    }
    out.flush();
    if (!out) throw Error(ErrorCode::io, "ledger: write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io, "ledger: cannot rename into '" + path.string() + "': " + ec.message());
}

Ledger load_ledger(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "ledger: cannot open '" + path.string() + "': file not found or unreadable");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  Ledger ledger;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  if (text.empty()) corrupt(1, "missing header");
  while (pos < text.size()) {
    ++line_no;
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) corrupt(line_no, "truncated line (no terminating newline)");
    const std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      corrupt(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) corrupt(line_no, "expected a JSON object");

    if (line_no == 1) {
      if (j.size() != 2 || j.value("format", "") != kFormatName || !j.contains("version") ||
          !j["version"].is_number_integer() || j["version"].get<int>() != kFormatVersion)
        corrupt(line_no, "not a precedence-ledger v1 header");
      continue;
    }

    if (j.size() != 5) corrupt(line_no, "expected exactly the fields prep, meas, outcome, seq, wall_time");
    try {
      PrecedentRecord rec;
      const auto& prep = j.at("prep");
      const auto& meas = j.at("meas");
      const auto& outcome = j.at("outcome");
      const auto& seq = j.at("seq");
      const auto& wall = j.at("wall_time");
      if (!prep.is_string() || !meas.is_string() || !wall.is_string()) corrupt(line_no, "field has wrong type");
      if (!outcome.is_number_integer() || !seq.is_number_unsigned()) corrupt(line_no, "field has wrong type");
      rec.prep = PreparationKey{Digest::from_hex(prep.get<std::string>())};
      rec.meas = MeasurementKey{Digest::from_hex(meas.get<std::string>())};
      const auto o = outcome.get<std::int64_t>();
      if (o < 0 || o > INT32_MAX) corrupt(line_no, "outcome out of range");
      rec.outcome = static_cast<std::int32_t>(o);
      rec.seq_no = seq.get<std::uint64_t>();
      rec.wall_time_us = parse_iso8601(wall.get<std::string>());
      ledger.append(rec);
    } catch (const nlohmann::json::exception& e) {
      corrupt(line_no, e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::parse && std::string_view(e.what()).starts_with("ledger line")) throw;
      corrupt(line_no, e.what());
    }
  }
  return ledger;
}

std::string inspect(const Ledger& ledger, std::string_view filter, std::size_t head_tail) {
  std::optional<StreamKey> wanted;
  if (!filter.empty()) {
    const auto colon = filter.find(':');
    if (colon == std::string_view::npos)
      throw Error(ErrorCode::invalid_argument, "inspect: key filter must be PREP:MEAS");
    wanted = StreamKey{PreparationKey{Digest::from_hex(filter.substr(0, colon))},
                       MeasurementKey{Digest::from_hex(filter.substr(colon + 1))}};
  }
  std::ostringstream os;
  os << "records: " << ledger.size() << "\n";
  os << "streams: " << ledger.streams().size() << "\n";
  std::size_t shown = 0;
  for (const StreamKey& key : ledger.streams()) {
    if (wanted && key != *wanted) continue;
    ++shown;
    const Ensemble e = ledger.ensemble(key.prep, key.meas);
    os << "\nstream " << key.prep.digest.hex() << ":" << key.meas.digest.hex() << "\n";
    os << "  count: " << e.sequence.size() << "\n  counts:";
    for (const auto& [outcome, n] : e.counts) os << " " << outcome << "=" << n;
    os << "\n";
    auto print_range = [&os, &e](const char* label, std::size_t from, std::size_t to) {
      os << "  " << label << ":";
      for (std::size_t i = from; i < to; ++i) os << " " << e.sequence[i];
      os << "\n";
    };
    const std::size_t n = e.sequence.size();
    if (n <= 2 * head_tail) {
      print_range("sequence", 0, n);
    } else {
      print_range("head", 0, head_tail);
      print_range("tail", n - head_tail, n);
    }
  }
  if (wanted && shown == 0) os << "\nno stream matches " << filter << "\n";
  return os.str();
}

}  // namespace precedence::ledger
