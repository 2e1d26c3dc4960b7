#include "nim/store/journal.hpp"

#include <sstream>

#include "nim/scalar.hpp"

namespace nim::store {

namespace {

constexpr std::pair<RecordKind, std::string_view> kKinds[] = {
    {RecordKind::ModelRegistered, "model-registered"},
    {RecordKind::InstanceCreated, "instance-created"},
    {RecordKind::ValueAppended, "value-appended"},
    {RecordKind::ForecastAdded, "forecast-added"},
    {RecordKind::Purged, "purged"},
};

} // namespace

std::string_view record_kind_name(RecordKind kind) {
    for (const auto& [k, name] : kKinds)
        if (k == kind) return name;
    return "?";
}

std::optional<RecordKind> record_kind_from_name(std::string_view name) {
    for (const auto& [k, n] : kKinds)
        if (n == name) return k;
    return std::nullopt;
}

std::string encode_record(const JournalRecord& record) {
    nlohmann::json j{{"seq", record.seq}, {"kind", record_kind_name(record.kind)}, {"payload", record.payload}};
    return j.dump() + "\n";
}

JournalReadResult read_journal_bytes(std::string_view bytes) {
    JournalReadResult out;
    std::size_t pos = 0;
    std::size_t line = 0;
    std::uint64_t lastSeq = 0;
    while (pos < bytes.size()) {
        ++line;
        const auto nl = bytes.find('\n', pos);
        auto stop = [&](std::string why) {
            out.warning = "journal line " + std::to_string(line) + " (byte " + std::to_string(pos) + "): " + why;
            out.stoppedAtLine = line;
        };
        if (nl == std::string_view::npos) {
            stop("truncated record without newline");
            break;
        }
        const auto text = bytes.substr(pos, nl - pos);
        JournalRecord rec;
        try {
            const auto j = nlohmann::json::parse(text);
            rec.seq = j.at("seq").get<std::uint64_t>();
            const auto kind = record_kind_from_name(j.at("kind").get<std::string>());
            if (!kind) throw std::runtime_error("unknown record kind");
            rec.kind = *kind;
            rec.payload = j.at("payload");
        } catch (const std::exception& e) {
            stop(std::string("malformed record: ") + e.what());
            break;
        }
        if (!out.records.empty() && rec.seq <= lastSeq) {
            stop("sequence number " + std::to_string(rec.seq) + " does not increase");
            break;
        }
        lastSeq = rec.seq;
        out.records.push_back(std::move(rec));
        pos = nl + 1;
        out.validBytes = pos;
        out.endOffsets.push_back(pos);
    }
    return out;
}

JournalReadResult read_journal(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_journal_bytes(ss.str());
}

JournalWriter::JournalWriter(const std::filesystem::path& path) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw NimError(ErrorCode::Corrupt, "cannot open journal " + path.string() + " for writing");
}

void JournalWriter::append(const JournalRecord& record) {
    const std::string line = encode_record(record);
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    if (!out_) throw NimError(ErrorCode::Corrupt, "journal write failed: " + path_.string());
}

} // namespace nim::store
