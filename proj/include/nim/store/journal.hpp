#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace nim::store {

enum class RecordKind { ModelRegistered, InstanceCreated, ValueAppended, ForecastAdded, Purged };

std::string_view record_kind_name(RecordKind kind);
std::optional<RecordKind> record_kind_from_name(std::string_view name);

/// `{"seq":N,"kind":"...","payload":{...}}`, one per line.
struct JournalRecord {
    std::uint64_t seq = 0;
    RecordKind kind = RecordKind::ModelRegistered;
    nlohmann::json payload;
};

struct JournalReadResult {
    std::vector<JournalRecord> records;
    std::vector<std::uintmax_t> endOffsets; // byte offset just past each record
    std::uintmax_t validBytes = 0;  // length of the well-formed prefix
    std::optional<std::string> warning; // set when reading stopped early
    std::size_t stoppedAtLine = 0;      // 1-based line of the bad record, 0 if none
};

/// Reads every well-formed record in order. Stops at the first malformed
/// line, a line without its terminating newline, or a non-increasing seq.
JournalReadResult read_journal(const std::filesystem::path& path);
JournalReadResult read_journal_bytes(std::string_view bytes);

/// Append-only JSON-lines writer. Each record is flushed before append returns.
class JournalWriter {
public:
    JournalWriter() = default;
    explicit JournalWriter(const std::filesystem::path& path);

    bool is_open() const { return out_.is_open(); }
    void append(const JournalRecord& record);

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

std::string encode_record(const JournalRecord& record);

} // namespace nim::store
