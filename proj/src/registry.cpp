#include "succor/registry.hpp"

#include "succor/csv.hpp"
#include "succor/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

namespace succor {

using nlohmann::json;

namespace {

const csv::Row kRegistrationHeader{"ID",           "F_Name",    "L_Name",
                                   "Emergency_Contact1", "Emergency_Contact2", "BirthDate",
                                   "Disease_Name", "Reg_Date"};
const csv::Row kEscHeader{"ID", "Latitude", "Longitude"};
const csv::Row kNewRequestHeader{"ID",       "request_time", "received_time", "latitude",
                                 "longitude", "isReserved",  "Terminal_ID"};
const csv::Row kRequestInfoHeader{"ID",        "request_time", "received_time", "received_time2",
                                  "latitude",  "longitude",    "reply_time",    "Esc_ID"};

void check_length(const std::string& value, std::size_t max, const char* field, bool required) {
    if (required && value.empty())
        fail(ErrorCode::Validation, std::string(field) + " is required");
    if (value.size() > max)
        fail(ErrorCode::Validation,
             std::string(field) + " exceeds " + std::to_string(max) + " characters");
}

void check_esc_id(const std::string& id) {
    check_length(id, 10, "ESC id", true);
}

// --- journal codec -------------------------------------------------------

json encode(const Location& l) {
    return {{"lat", l.lat_text}, {"lon", l.lon_text}};
}

Location decode_location(const json& j) {
    return Location::from_text(j.at("lat").get<std::string>(), j.at("lon").get<std::string>());
}

json encode(const PatientRecord& p) {
    return {{"id", p.id},
            {"first_name", p.first_name},
            {"last_name", p.last_name},
            {"emergency_contact1", p.emergency_contact1},
            {"emergency_contact2", p.emergency_contact2},
            {"birth_date", p.birth_date.str()},
            {"disease_name", p.disease_name},
            {"reg_date", p.reg_date.str()}};
}

PatientRecord decode_patient(const json& j) {
    return {j.at("id").get<std::string>(),
            j.at("first_name").get<std::string>(),
            j.at("last_name").get<std::string>(),
            j.at("emergency_contact1").get<std::string>(),
            j.at("emergency_contact2").get<std::string>(),
            Date::parse(j.at("birth_date").get<std::string>()),
            j.at("disease_name").get<std::string>(),
            Date::parse(j.at("reg_date").get<std::string>())};
}

json encode(const HelpRequest& r) {
    json j{{"patient_id", r.patient_id},
           {"request_time", r.request_time.str()},
           {"received_time", r.received_time.str()},
           {"location", encode(r.location)},
           {"is_reserved", r.is_reserved}};
    if (r.terminal_id)
        j["terminal_id"] = *r.terminal_id;
    return j;
}

HelpRequest decode_help(const json& j) {
    HelpRequest r;
    r.patient_id = j.at("patient_id").get<std::string>();
    r.request_time = Timestamp::parse(j.at("request_time").get<std::string>());
    r.received_time = Timestamp::parse(j.at("received_time").get<std::string>());
    r.location = decode_location(j.at("location"));
    r.is_reserved = j.at("is_reserved").get<bool>();
    if (j.contains("terminal_id"))
        r.terminal_id = j.at("terminal_id").get<std::string>();
    return r;
}

json encode(const RequestKey& k) {
    return k.str();
}

// --- CSV row codecs ------------------------------------------------------

csv::Row to_row(const PatientRecord& p) {
    return {p.id,           p.first_name,       p.last_name,    p.emergency_contact1,
            p.emergency_contact2, p.birth_date.str(), p.disease_name, p.reg_date.str()};
}

PatientRecord patient_from_row(const csv::Row& r) {
    return {r[0], r[1], r[2], r[3], r[4], Date::parse(r[5]), r[6], Date::parse(r[7])};
}

csv::Row to_row(const EscRecord& e) {
    return {e.id, e.location.lat_text, e.location.lon_text};
}

csv::Row to_row(const HelpRequest& r) {
    return {r.patient_id,          r.request_time.str(),        r.received_time.str(),
            r.location.lat_text,   r.location.lon_text,         r.is_reserved ? "t" : "f",
            r.terminal_id.value_or("")};
}

HelpRequest help_from_row(const csv::Row& r) {
    HelpRequest h;
    h.patient_id = r[0];
    h.request_time = Timestamp::parse(r[1]);
    h.received_time = Timestamp::parse(r[2]);
    h.location = Location::from_text(r[3], r[4]);
    if (r[5] == "t")
        h.is_reserved = true;
    else if (r[5] == "f")
        h.is_reserved = false;
    else
        fail(ErrorCode::Validation, "isReserved must be 't' or 'f', got '" + r[5] + "'");
    if (!r[6].empty())
        h.terminal_id = r[6];
    return h;
}

csv::Row to_row(const HandledRequest& h) {
    return {h.patient_id,        h.request_time.str(), h.received_time.str(),
            h.received_time2.str(), h.location.lat_text, h.location.lon_text,
            h.reply_time.str(),  h.esc_id};
}

HandledRequest handled_from_row(const csv::Row& r) {
    return {r[0],
            Timestamp::parse(r[1]),
            Timestamp::parse(r[2]),
            Timestamp::parse(r[3]),
            Location::from_text(r[4], r[5]),
            Timestamp::parse(r[6]),
            r[7]};
}

const csv::Row& header_of(Table t) {
    switch (t) {
    case Table::Registration: return kRegistrationHeader;
    case Table::Esc: return kEscHeader;
    case Table::NewRequest: return kNewRequestHeader;
    case Table::RequestInfo: return kRequestInfoHeader;
    }
    fail(ErrorCode::UnknownTable, "unknown table");
}

std::vector<csv::Row> data_rows(Table t, std::string_view text) {
    auto rows = csv::parse(text);
    std::erase_if(rows, [](const csv::Row& r) { return r.size() == 1 && r[0].empty(); });
    const auto& header = header_of(t);
    if (rows.empty() || rows.front() != header)
        fail(ErrorCode::Validation,
             "CSV header does not match table " + std::string(table_name(t)));
    rows.erase(rows.begin());
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].size() != header.size())
            fail(ErrorCode::Validation, std::string(table_name(t)) + " row " +
                                            std::to_string(i + 1) + " has " +
                                            std::to_string(rows[i].size()) + " columns");
    return rows;
}

}  // namespace

std::string_view table_name(Table t) {
    switch (t) {
    case Table::Registration: return "Registration";
    case Table::Esc: return "ESC";
    case Table::NewRequest: return "New_Request";
    case Table::RequestInfo: return "Request_Info";
    }
    return "?";
}

Table parse_table(std::string_view name) {
    for (Table t : {Table::Registration, Table::Esc, Table::NewRequest, Table::RequestInfo})
        if (table_name(t) == name)
            return t;
    fail(ErrorCode::UnknownTable, "unknown table: " + std::string(name));
}

void validate_patient(const PatientRecord& rec, Date today) {
    check_length(rec.id, 32, "id", true);
    check_length(rec.first_name, 50, "first_name", false);
    check_length(rec.last_name, 50, "last_name", false);
    check_length(rec.emergency_contact1, 32, "emergency_contact1", true);
    check_length(rec.emergency_contact2, 32, "emergency_contact2", false);
    check_length(rec.disease_name, 50, "disease_name", false);
    if (rec.birth_date > rec.reg_date)
        fail(ErrorCode::Validation, "birth_date is after reg_date");
    if (rec.reg_date > today)
        fail(ErrorCode::Validation, "reg_date is in the future");
}

Registry::Registry(std::unique_ptr<StorageBackend> backend) : backend_(std::move(backend)) {
    replay();
}

void Registry::replay() {
    std::unique_lock lock(mutex_);
    std::size_t n = 0;
    for (const auto& record : backend_->load()) {
        ++n;
        try {
            apply(record);
        } catch (const std::exception& e) {
            fail(ErrorCode::StorageFailure,
                 "journal record " + std::to_string(n) + " cannot be replayed: " + e.what());
        }
    }
}

void Registry::journal(const std::string& record) {
    backend_->append(record);
}

// Applies one journal record. The public mutators run the same checks before
// journaling, so a record that reached the journal always applies cleanly.
void Registry::apply(const std::string& record) {
    const json j = json::parse(record);
    const auto op = j.at("op").get<std::string>();

    if (op == "register") {
        auto rec = decode_patient(j.at("patient"));
        check_register(rec);
        const auto id = rec.id;
        patients_.emplace(id, Slot<PatientRecord>{next_seq(), std::move(rec)});
    } else if (op == "update_patient") {
        auto rec = decode_patient(j.at("patient"));
        auto it = patients_.find(rec.id);
        if (it == patients_.end())
            fail(ErrorCode::NotFound, "patient not found: " + rec.id);
        it->second.row = std::move(rec);
    } else if (op == "upsert_esc") {
        EscRecord e{j.at("id").get<std::string>(), decode_location(j.at("location")),
                    EscStatus::Free};
        auto it = escs_.find(e.id);
        if (it == escs_.end())
            escs_.emplace(j.at("id").get<std::string>(), Slot<EscRecord>{next_seq(), e});
        else
            it->second.row.location = e.location;
    } else if (op == "insert_live") {
        auto req = decode_help(j.at("request"));
        check_insert_live(req);
        const auto key = req.key();
        live_.emplace(key, Slot<HelpRequest>{next_seq(), std::move(req)});
    } else if (op == "reserve") {
        const auto key = RequestKey::parse(j.at("key").get<std::string>());
        const auto esc_id = j.at("esc_id").get<std::string>();
        auto& row = live_row(key);
        auto esc = escs_.find(esc_id);
        if (esc == escs_.end())
            fail(ErrorCode::UnknownEsc, "unknown ESC: " + esc_id);
        if (row.is_reserved || esc->second.row.status == EscStatus::Reserved)
            fail(ErrorCode::BadState, "request or ESC already reserved");
        row.is_reserved = true;
        row.terminal_id = esc_id;
        row.assigned_at = Timestamp::parse(j.at("assigned_at").get<std::string>());
        esc->second.row.status = EscStatus::Reserved;
    } else if (op == "ack") {
        auto& row = live_row(RequestKey::parse(j.at("key").get<std::string>()));
        row.ack_time = Timestamp::parse(j.at("ack_time").get<std::string>());
    } else if (op == "complete") {
        const auto key = RequestKey::parse(j.at("key").get<std::string>());
        auto it = live_.find(key);
        if (it == live_.end())
            fail(ErrorCode::NotFound, "no live request " + key.str());
        if (handled_.contains(key))
            fail(ErrorCode::Duplicate, "request already handled: " + key.str());
        const auto& row = it->second.row;
        if (!row.is_reserved || !row.terminal_id)
            fail(ErrorCode::BadState, "request is not reserved: " + key.str());
        HandledRequest h{row.patient_id,
                         row.request_time,
                         row.received_time,
                         Timestamp::parse(j.at("received_time2").get<std::string>()),
                         row.location,
                         Timestamp::parse(j.at("reply_time").get<std::string>()),
                         *row.terminal_id};
        if (auto esc = escs_.find(h.esc_id); esc != escs_.end())
            esc->second.row.status = EscStatus::Free;
        live_.erase(it);
        handled_.emplace(key, Slot<HandledRequest>{next_seq(), std::move(h)});
    } else if (op == "import") {
        const Table t = parse_table(j.at("table").get<std::string>());
        const auto rows = data_rows(t, j.at("csv").get<std::string>());
        switch (t) {
        case Table::Registration: {
            decltype(patients_) fresh;
            for (const auto& r : rows) {
                auto p = patient_from_row(r);
                validate_patient(p);
                const auto id = p.id;
                if (!fresh.emplace(id, Slot<PatientRecord>{next_seq(), std::move(p)}).second)
                    fail(ErrorCode::DuplicateId, "duplicate patient id in import: " + id);
            }
            patients_ = std::move(fresh);
            break;
        }
        case Table::Esc: {
            decltype(escs_) fresh;
            for (const auto& r : rows) {
                check_esc_id(r[0]);
                EscRecord e{r[0], Location::from_text(r[1], r[2]), EscStatus::Free};
                if (!fresh.emplace(r[0], Slot<EscRecord>{next_seq(), std::move(e)}).second)
                    fail(ErrorCode::DuplicateId, "duplicate ESC id in import: " + r[0]);
            }
            escs_ = std::move(fresh);
            break;
        }
        case Table::NewRequest: {
            decltype(live_) fresh;
            for (const auto& r : rows) {
                auto h = help_from_row(r);
                const auto key = h.key();
                if (!fresh.emplace(key, Slot<HelpRequest>{next_seq(), std::move(h)}).second)
                    fail(ErrorCode::Duplicate, "duplicate request in import: " + key.str());
            }
            live_ = std::move(fresh);
            break;
        }
        case Table::RequestInfo: {
            decltype(handled_) fresh;
            for (const auto& r : rows) {
                auto h = handled_from_row(r);
                const auto key = h.key();
                if (!fresh.emplace(key, Slot<HandledRequest>{next_seq(), std::move(h)}).second)
                    fail(ErrorCode::Duplicate, "duplicate request in import: " + key.str());
            }
            handled_ = std::move(fresh);
            break;
        }
        }
        rederive_esc_status();
    } else {
        fail(ErrorCode::StorageFailure, "unknown journal op: " + op);
    }
}

void Registry::check_register(const PatientRecord& rec) const {
    validate_patient(rec);
    if (patients_.contains(rec.id))
        fail(ErrorCode::DuplicateId, "patient already registered: " + rec.id);
}

void Registry::check_insert_live(const HelpRequest& req) const {
    const auto key = req.key();
    if (!patients_.contains(req.patient_id))
        fail(ErrorCode::UnknownPatient, "patient not registered: " + req.patient_id);
    if (!req.location.point.valid())
        fail(ErrorCode::Validation, "invalid request location");
    if (live_.contains(key) || handled_.contains(key))
        fail(ErrorCode::Duplicate, "request already exists: " + key.str());
    if (req.is_reserved != req.terminal_id.has_value())
        fail(ErrorCode::Validation, "terminal_id must be present exactly when reserved");
    if (req.terminal_id && !escs_.contains(*req.terminal_id))
        fail(ErrorCode::UnknownEsc, "unknown ESC: " + *req.terminal_id);
}

HelpRequest& Registry::live_row(const RequestKey& key) {
    auto it = live_.find(key);
    if (it == live_.end())
        fail(ErrorCode::NotFound, "no live request " + key.str());
    return it->second.row;
}

void Registry::rederive_esc_status() {
    for (auto& [id, slot] : escs_)
        slot.row.status = EscStatus::Free;
    for (const auto& [key, slot] : live_) {
        if (!slot.row.is_reserved || !slot.row.terminal_id)
            continue;
        if (auto esc = escs_.find(*slot.row.terminal_id); esc != escs_.end())
            esc->second.row.status = EscStatus::Reserved;
    }
}

template <typename Row>
std::vector<Row> Registry::in_order(const auto& table) {
    std::vector<const Slot<Row>*> slots;
    slots.reserve(table.size());
    for (const auto& [k, slot] : table)
        slots.push_back(&slot);
    std::sort(slots.begin(), slots.end(), [](auto* a, auto* b) { return a->seq < b->seq; });
    std::vector<Row> rows;
    rows.reserve(slots.size());
    for (auto* s : slots)
        rows.push_back(s->row);
    return rows;
}

// --- patients ------------------------------------------------------------

std::string Registry::register_patient(const PatientRecord& rec) {
    std::unique_lock lock(mutex_);
    check_register(rec);
    const auto record = json{{"op", "register"}, {"patient", encode(rec)}}.dump();
    journal(record);
    apply(record);
    return rec.id;
}

PatientRecord Registry::get_patient(std::string_view id) const {
    auto p = find_patient(id);
    if (!p)
        fail(ErrorCode::NotFound, "patient not found: " + std::string(id));
    return *p;
}

std::optional<PatientRecord> Registry::find_patient(std::string_view id) const {
    std::shared_lock lock(mutex_);
    auto it = patients_.find(id);
    if (it == patients_.end())
        return std::nullopt;
    return it->second.row;
}

PatientRecord Registry::update_patient(std::string_view id, const PatientUpdate& update) {
    std::unique_lock lock(mutex_);
    auto it = patients_.find(id);
    if (it == patients_.end())
        fail(ErrorCode::NotFound, "patient not found: " + std::string(id));
    PatientRecord rec = it->second.row;
    if (update.first_name) rec.first_name = *update.first_name;
    if (update.last_name) rec.last_name = *update.last_name;
    if (update.emergency_contact1) rec.emergency_contact1 = *update.emergency_contact1;
    if (update.emergency_contact2) rec.emergency_contact2 = *update.emergency_contact2;
    if (update.disease_name) rec.disease_name = *update.disease_name;
    validate_patient(rec);
    const auto record = json{{"op", "update_patient"}, {"patient", encode(rec)}}.dump();
    journal(record);
    apply(record);
    return rec;
}

std::vector<PatientRecord> Registry::list_patients() const {
    std::shared_lock lock(mutex_);
    return in_order<PatientRecord>(patients_);
}

// --- ESCs ----------------------------------------------------------------

bool Registry::upsert_esc(const EscRecord& rec) {
    check_esc_id(rec.id);
    if (!rec.location.point.valid())
        fail(ErrorCode::Validation, "ESC location out of range");
    // Re-derive from text so a hand-built Location cannot disagree with itself.
    const auto loc = Location::from_text(rec.location.lat_text, rec.location.lon_text);
    std::unique_lock lock(mutex_);
    const bool created = !escs_.contains(rec.id);
    const auto record =
        json{{"op", "upsert_esc"}, {"id", rec.id}, {"location", encode(loc)}}.dump();
    journal(record);
    apply(record);
    return created;
}

std::vector<EscRecord> Registry::list_escs() const {
    std::shared_lock lock(mutex_);
    return in_order<EscRecord>(escs_);
}

std::optional<EscRecord> Registry::find_esc(std::string_view id) const {
    std::shared_lock lock(mutex_);
    auto it = escs_.find(id);
    if (it == escs_.end())
        return std::nullopt;
    return it->second.row;
}

// --- CSV -----------------------------------------------------------------

std::string Registry::export_table(Table t) const {
    std::shared_lock lock(mutex_);
    std::string out;
    csv::append_row(out, header_of(t));
    switch (t) {
    case Table::Registration:
        for (const auto& r : in_order<PatientRecord>(patients_))
            csv::append_row(out, to_row(r));
        break;
    case Table::Esc:
        for (const auto& r : in_order<EscRecord>(escs_))
            csv::append_row(out, to_row(r));
        break;
    case Table::NewRequest:
        for (const auto& r : in_order<HelpRequest>(live_))
            csv::append_row(out, to_row(r));
        break;
    case Table::RequestInfo:
        for (const auto& r : in_order<HandledRequest>(handled_))
            csv::append_row(out, to_row(r));
        break;
    }
    return out;
}

void Registry::import_table(Table t, std::string_view csv_text) {
    std::unique_lock lock(mutex_);
    const auto record =
        json{{"op", "import"}, {"table", table_name(t)}, {"csv", std::string(csv_text)}}.dump();
    // Dry run on a copy so a bad file never reaches the journal.
    {
        auto p = patients_;
        auto e = escs_;
        auto l = live_;
        auto h = handled_;
        const auto seq = seq_;
        try {
            apply(record);
        } catch (...) {
            patients_ = std::move(p);
            escs_ = std::move(e);
            live_ = std::move(l);
            handled_ = std::move(h);
            seq_ = seq;
            throw;
        }
        patients_ = std::move(p);
        escs_ = std::move(e);
        live_ = std::move(l);
        handled_ = std::move(h);
        seq_ = seq;
    }
    journal(record);
    apply(record);
}

// --- lifecycle -----------------------------------------------------------

void Registry::insert_live(const HelpRequest& req) {
    std::unique_lock lock(mutex_);
    check_insert_live(req);
    const auto record = json{{"op", "insert_live"}, {"request", encode(req)}}.dump();
    journal(record);
    apply(record);
}

void Registry::reserve(const RequestKey& key, const std::string& esc_id, Timestamp assigned_at) {
    std::unique_lock lock(mutex_);
    auto& row = live_row(key);
    auto esc = escs_.find(esc_id);
    if (esc == escs_.end())
        fail(ErrorCode::UnknownEsc, "unknown ESC: " + esc_id);
    if (row.is_reserved)
        fail(ErrorCode::BadState, "request already reserved: " + key.str());
    if (esc->second.row.status == EscStatus::Reserved)
        fail(ErrorCode::BadState, "ESC already reserved: " + esc_id);
    const auto record = json{{"op", "reserve"},
                             {"key", encode(key)},
                             {"esc_id", esc_id},
                             {"assigned_at", assigned_at.str()}}
                            .dump();
    journal(record);
    apply(record);
}

void Registry::acknowledge(const RequestKey& key, Timestamp ack_time) {
    std::unique_lock lock(mutex_);
    live_row(key);
    const auto record =
        json{{"op", "ack"}, {"key", encode(key)}, {"ack_time", ack_time.str()}}.dump();
    journal(record);
    apply(record);
}

HandledRequest Registry::complete(const RequestKey& key, Timestamp received_time2,
                                  Timestamp reply_time) {
    std::unique_lock lock(mutex_);
    const auto& row = live_row(key);
    if (!row.is_reserved || !row.terminal_id)
        fail(ErrorCode::BadState, "request is not reserved: " + key.str());
    if (handled_.contains(key))
        fail(ErrorCode::Duplicate, "request already handled: " + key.str());
    if (received_time2 < row.received_time || reply_time < received_time2)
        fail(ErrorCode::Validation, "handled timestamps out of order for " + key.str());
    const auto record = json{{"op", "complete"},
                             {"key", encode(key)},
                             {"received_time2", received_time2.str()},
                             {"reply_time", reply_time.str()}}
                            .dump();
    journal(record);
    apply(record);
    return handled_.at(key).row;
}

std::optional<HelpRequest> Registry::find_live(const RequestKey& key) const {
    std::shared_lock lock(mutex_);
    auto it = live_.find(key);
    if (it == live_.end())
        return std::nullopt;
    return it->second.row;
}

std::vector<HelpRequest> Registry::live_requests() const {
    std::shared_lock lock(mutex_);
    return in_order<HelpRequest>(live_);
}

std::vector<HandledRequest> Registry::handled_requests() const {
    std::shared_lock lock(mutex_);
    return in_order<HandledRequest>(handled_);
}

bool Registry::is_handled(const RequestKey& key) const {
    std::shared_lock lock(mutex_);
    return handled_.contains(key);
}

std::optional<RequestKey> Registry::live_key_for_patient(std::string_view patient_id) const {
    std::shared_lock lock(mutex_);
    auto it = live_.lower_bound(RequestKey{std::string(patient_id), Timestamp{Timestamp::TimePoint::min()}});
    if (it != live_.end() && it->first.patient_id == patient_id)
        return it->first;
    return std::nullopt;
}

void load_fixture_dir(Registry& registry, const std::filesystem::path& dir) {
    for (Table t : {Table::Registration, Table::Esc, Table::NewRequest, Table::RequestInfo}) {
        const auto file = dir / (std::string(table_name(t)) + ".csv");
        if (!std::filesystem::exists(file))
            continue;
        std::ifstream in(file, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        registry.import_table(t, buf.str());
    }
}

}  // namespace succor
