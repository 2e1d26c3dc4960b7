#include <gtest/gtest.h>

#include <fstream>
#include <map>

#include "fixtures.hpp"
#include "nim/store/journal.hpp"
#include "workload.hpp"

using namespace nim;
using nimtest::Harness;
using nimtest::TempDir;

namespace {

std::filesystem::path journal_of(const TempDir& d) { return d.path() / store::Store::kJournalFile; }

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << bytes;
}

} // namespace

TEST(Journal, MissingOrEmptyJournalGivesEmptyStore) {
    TempDir dir;
    {
        Harness h(dir.path());
        EXPECT_EQ(h.store.instance_count(), 0u);
        EXPECT_EQ(h.store.replay_report().records, 0u);
    }
    write_file(journal_of(dir), "");
    Harness h(dir.path());
    EXPECT_EQ(h.store.instance_count(), 0u);
    EXPECT_FALSE(h.store.replay_report().warning);
    EXPECT_EQ(h.store.canonical(), Harness().store.canonical());
}

TEST(Journal, EnvelopeFormat) {
    TempDir dir;
    {
        Harness h(dir.path());
        h.must_register(nimtest::kRoomNdf);
    }
    const std::string text = read_file(journal_of(dir));
    ASSERT_FALSE(text.empty());
    EXPECT_EQ(text.back(), '\n');
    auto j = nlohmann::json::parse(text.substr(0, text.find('\n')));
    EXPECT_EQ(j.at("seq"), 1);
    EXPECT_EQ(j.at("kind"), "model-registered");
    EXPECT_TRUE(j.at("payload").is_object());
}

// Dual execution: an in-memory store and a journaled store run the same
// operations; replaying the journal must reproduce the live state.
TEST(Journal, ReplayEqualsLiveStateAfterNOps) {
    for (int n : {1, 10, 300}) {
        TempDir dir;
        std::string live, memory;
        {
            Harness h(dir.path());
            nimtest::Workload w(h.store, h.registry, h.clock, 1000 + static_cast<std::uint64_t>(n));
            for (int i = 0; i < n; ++i) w.step();
            live = h.store.canonical();
        }
        {
            Harness h;
            nimtest::Workload w(h.store, h.registry, h.clock, 1000 + static_cast<std::uint64_t>(n));
            for (int i = 0; i < n; ++i) w.step();
            memory = h.store.canonical();
        }
        Harness replayed(dir.path());
        EXPECT_FALSE(replayed.store.replay_report().warning);
        EXPECT_EQ(replayed.store.canonical(), live) << n;
        EXPECT_EQ(memory, live) << n;
    }
}

TEST(Journal, ReplayIsPureFunctionOfBytes) {
    TempDir a, b;
    {
        Harness h(a.path());
        nimtest::Workload w(h.store, h.registry, h.clock, 77);
        for (int i = 0; i < 200; ++i) w.step();
    }
    std::filesystem::copy_file(journal_of(a), journal_of(b));
    Harness ra(a.path()), rb(b.path());
    EXPECT_EQ(ra.store.canonical(), rb.store.canonical());
}

TEST(Journal, TruncatedFinalLineDropsOneRecord) {
    TempDir dir;
    std::map<std::uint64_t, std::string> bySeq;
    {
        Harness h(dir.path());
        nimtest::Workload w(h.store, h.registry, h.clock, 5);
        for (int i = 0; i < 100; ++i) {
            w.step();
            auto snap = h.store.snapshot();
            bySeq[snap.at("journalSeq").get<std::uint64_t>()] = snap.dump();
        }
    }
    const std::uint64_t last = bySeq.rbegin()->first;
    ASSERT_GT(last, 1u);
    std::string bytes = read_file(journal_of(dir));
    bytes.resize(bytes.size() - 7); // cut into the last record
    write_file(journal_of(dir), bytes);

    Harness h(dir.path());
    ASSERT_TRUE(h.store.replay_report().warning);
    EXPECT_EQ(h.store.replay_report().records, last - 1);
    EXPECT_EQ(h.store.canonical(), bySeq.at(last - 1));
    // the bad tail is gone from disk, new writes continue the sequence
    const auto size = std::filesystem::file_size(journal_of(dir));
    EXPECT_EQ(read_file(journal_of(dir)).back(), '\n');
    h.store.purge_expired(h.clock.now());
    EXPECT_GT(std::filesystem::file_size(journal_of(dir)), size);
    Harness again(dir.path());
    EXPECT_FALSE(again.store.replay_report().warning);
    EXPECT_EQ(again.store.canonical(), h.store.canonical());
}

TEST(Journal, CorruptMiddleRecordStopsWithPosition) {
    TempDir dir;
    {
        Harness h(dir.path());
        h.must_register(nimtest::kRoomNdf);
        h.must_register(nimtest::kAnotherRoomNdf);
        h.must_register("Third { Number x; }");
    }
    std::string bytes = read_file(journal_of(dir));
    const auto second = bytes.find('\n') + 1;
    bytes[second + 2] = '#';
    write_file(journal_of(dir), bytes);
    Harness h(dir.path());
    ASSERT_TRUE(h.store.replay_report().warning);
    EXPECT_NE(h.store.replay_report().warning->find("line 2"), std::string::npos) << *h.store.replay_report().warning;
    EXPECT_EQ(h.store.models().size(), 1u);
    EXPECT_EQ(std::filesystem::file_size(journal_of(dir)), second);
}

TEST(JournalBytes, StopsAtNonIncreasingSeq) {
    std::string text;
    text += store::encode_record({1, store::RecordKind::Purged, {{"now", 0}, {"deleted", 0}}});
    text += store::encode_record({2, store::RecordKind::Purged, {{"now", 0}, {"deleted", 0}}});
    text += store::encode_record({2, store::RecordKind::Purged, {{"now", 0}, {"deleted", 0}}});
    auto r = store::read_journal_bytes(text);
    EXPECT_EQ(r.records.size(), 2u);
    EXPECT_EQ(r.stoppedAtLine, 3u);
    EXPECT_TRUE(r.warning);
}

TEST(JournalBytes, UnknownKindAndMissingNewline) {
    auto good = store::encode_record({1, store::RecordKind::Purged, {{"now", 0}, {"deleted", 0}}});
    auto r = store::read_journal_bytes(good + R"({"seq":2,"kind":"exploded","payload":{}})" "\n");
    EXPECT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.validBytes, good.size());
    auto partial = store::read_journal_bytes(good + good.substr(0, good.size() - 1));
    EXPECT_EQ(partial.records.size(), 1u);
    EXPECT_TRUE(partial.warning);
}

TEST(JournalBytes, EncodeDecodeEveryKind) {
    for (auto k : {store::RecordKind::ModelRegistered, store::RecordKind::InstanceCreated, store::RecordKind::ValueAppended,
                   store::RecordKind::ForecastAdded, store::RecordKind::Purged}) {
        EXPECT_EQ(store::record_kind_from_name(store::record_kind_name(k)), k);
        auto r = store::read_journal_bytes(store::encode_record({7, k, {{"x", 1}}}));
        ASSERT_EQ(r.records.size(), 1u);
        EXPECT_EQ(r.records[0].kind, k);
        EXPECT_EQ(r.records[0].seq, 7u);
    }
}
