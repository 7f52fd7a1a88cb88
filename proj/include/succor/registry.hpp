#pragma once

#include "succor/records.hpp"
#include "succor/storage.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace succor {

enum class Table { Registration, Esc, NewRequest, RequestInfo };

std::string_view table_name(Table t);
/// Accepts "Registration", "ESC", "New_Request", "Request_Info";
/// anything else throws Error{UnknownTable}.
Table parse_table(std::string_view name);

/// Field-level checks for a patient row; throws Error{Validation}.
void validate_patient(const PatientRecord& rec, Date today = Date::today());

/// The four Tracking tables. Mutations are serialized by one writer lock and
/// journaled to the backend before they take effect; reads share the lock and
/// see a consistent snapshot.
///
/// Lifecycle writes (insert_live, reserve, acknowledge, complete) enforce
/// referential integrity and live/handled exclusivity. `import_table` is a raw
/// table load: it validates row formats but not cross-table rules, so fixture
/// data can be loaded as printed.
class Registry {
public:
    explicit Registry(std::unique_ptr<StorageBackend> backend = std::make_unique<MemoryBackend>());

    std::string register_patient(const PatientRecord& rec);
    PatientRecord get_patient(std::string_view id) const;
    std::optional<PatientRecord> find_patient(std::string_view id) const;
    PatientRecord update_patient(std::string_view id, const PatientUpdate& update);
    std::vector<PatientRecord> list_patients() const;

    /// Inserts or relocates an ESC. A new ESC starts FREE; an existing one
    /// keeps its status. The status field of `rec` is ignored.
    /// Returns true when the ESC was newly created.
    bool upsert_esc(const EscRecord& rec);
    std::vector<EscRecord> list_escs() const;
    std::optional<EscRecord> find_esc(std::string_view id) const;

    std::string export_table(Table t) const;
    std::string export_table(std::string_view name) const { return export_table(parse_table(name)); }
    /// Replaces the table's contents with the CSV rows. ESC statuses are
    /// re-derived from live reserved rows afterwards.
    void import_table(Table t, std::string_view csv_text);
    void import_table(std::string_view name, std::string_view csv_text) {
        import_table(parse_table(name), csv_text);
    }

    void insert_live(const HelpRequest& req);
    /// Marks the live request reserved by `esc_id` and flips the ESC to
    /// RESERVED. Throws Error{BadState} if either is already reserved.
    void reserve(const RequestKey& key, const std::string& esc_id, Timestamp assigned_at);
    void acknowledge(const RequestKey& key, Timestamp ack_time);
    /// Moves the row from New_Request to Request_Info and frees its ESC.
    HandledRequest complete(const RequestKey& key, Timestamp received_time2, Timestamp reply_time);

    std::optional<HelpRequest> find_live(const RequestKey& key) const;
    std::vector<HelpRequest> live_requests() const;
    std::vector<HandledRequest> handled_requests() const;
    bool is_handled(const RequestKey& key) const;
    std::optional<RequestKey> live_key_for_patient(std::string_view patient_id) const;

private:
    template <typename Row>
    struct Slot {
        std::uint64_t seq;
        Row row;
    };

    void replay();
    void journal(const std::string& record);
    void apply(const std::string& record);

    void check_register(const PatientRecord& rec) const;
    void check_insert_live(const HelpRequest& req) const;
    HelpRequest& live_row(const RequestKey& key);
    void rederive_esc_status();
    std::uint64_t next_seq() { return seq_++; }

    template <typename Row>
    static std::vector<Row> in_order(const auto& table);

    std::unique_ptr<StorageBackend> backend_;
    mutable std::shared_mutex mutex_;
    std::uint64_t seq_ = 0;

    std::map<std::string, Slot<PatientRecord>, std::less<>> patients_;
    std::map<std::string, Slot<EscRecord>, std::less<>> escs_;
    std::map<RequestKey, Slot<HelpRequest>> live_;
    std::map<RequestKey, Slot<HandledRequest>> handled_;
};

/// Loads Registration.csv, ESC.csv, New_Request.csv and Request_Info.csv
/// from `dir` in that order, skipping files that do not exist.
void load_fixture_dir(Registry& registry, const std::filesystem::path& dir);

}  // namespace succor
