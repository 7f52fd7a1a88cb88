#include "succor/error.hpp"
#include "succor/registry.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace succor;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Validation;
}

PatientRecord rose() {
    return {"07504401111", "Rose",       "Maher",          "07505841793", "07504662547",
            Date::parse("1989-04-09"), "Asthma", Date::parse("2013-03-01")};
}

EscRecord esc(std::string id, double lat, double lon) {
    return {std::move(id), Location::from_point({lat, lon}), EscStatus::Free};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("succor-reg-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const fs::path kFixtures = SUCCOR_FIXTURE_DIR;

}  // namespace

TEST_CASE("table names") {
    CHECK(parse_table("Registration") == Table::Registration);
    CHECK(parse_table("ESC") == Table::Esc);
    CHECK(parse_table("New_Request") == Table::NewRequest);
    CHECK(parse_table("Request_Info") == Table::RequestInfo);
    CHECK(code_of([] { parse_table("Foo"); }) == ErrorCode::UnknownTable);
    Registry reg;
    CHECK(code_of([&] { reg.export_table("Foo"); }) == ErrorCode::UnknownTable);
}

TEST_CASE("register, duplicate, get, update") {
    Registry reg;
    CHECK(reg.register_patient(rose()) == "07504401111");
    CHECK(code_of([&] { reg.register_patient(rose()); }) == ErrorCode::DuplicateId);

    auto empty = rose();
    empty.id = "";
    CHECK(code_of([&] { reg.register_patient(empty); }) == ErrorCode::Validation);

    CHECK(reg.get_patient("07504401111") == rose());
    CHECK(code_of([&] { reg.get_patient("00000000000"); }) == ErrorCode::NotFound);

    PatientUpdate up;
    up.disease_name = "Diabetes Mellitus";
    reg.update_patient("07504401111", up);
    CHECK(reg.get_patient("07504401111").disease_name == "Diabetes Mellitus");
    CHECK(reg.get_patient("07504401111").first_name == "Rose");
    CHECK(code_of([&] { reg.update_patient("00000000000", up); }) == ErrorCode::NotFound);

    PatientUpdate clear_required;
    clear_required.emergency_contact1 = "";
    CHECK(code_of([&] { reg.update_patient("07504401111", clear_required); }) ==
          ErrorCode::Validation);
}

TEST_CASE("patient field validation") {
    auto bad = rose();
    bad.id = std::string(33, '1');
    CHECK_THROWS_AS(validate_patient(bad), Error);
    bad = rose();
    bad.emergency_contact1 = "";
    CHECK_THROWS_AS(validate_patient(bad), Error);
    bad = rose();
    bad.first_name = std::string(51, 'a');
    CHECK_THROWS_AS(validate_patient(bad), Error);
    bad = rose();
    bad.birth_date = Date::parse("2014-01-01");
    CHECK_THROWS_AS(validate_patient(bad), Error);
    bad = rose();
    bad.reg_date = Date::parse("2099-01-01");
    CHECK_THROWS_AS(validate_patient(bad, Date::parse("2026-01-01")), Error);
    auto single = rose();
    single.emergency_contact2 = "";
    CHECK_NOTHROW(validate_patient(single));
}

TEST_CASE("fixture load") {
    Registry reg;
    load_fixture_dir(reg, kFixtures);
    CHECK(reg.list_patients().size() == 27);
    CHECK(reg.get_patient("07504401111") == rose());
    CHECK(reg.get_patient("07604586954").emergency_contact2.empty());
    CHECK(reg.list_escs().size() == 4);
    CHECK(reg.live_requests().size() == 3);
    CHECK(reg.handled_requests().size() == 4);

    const auto csv = reg.export_table(Table::NewRequest);
    std::istringstream lines(csv);
    std::string line;
    std::vector<std::string> flags;
    std::getline(lines, line);
    while (std::getline(lines, line))
        flags.push_back(line.substr(line.rfind(',', line.size() - 1) - 1, 1));
    CHECK(flags == std::vector<std::string>{"t", "t", "f"});
}

TEST_CASE("fleet without live requests is all FREE") {
    Registry reg;
    reg.import_table(Table::Esc, slurp(kFixtures / "ESC.csv"));
    const auto escs = reg.list_escs();
    REQUIRE(escs.size() == 4);
    for (const auto& e : escs)
        CHECK(e.status == EscStatus::Free);
    CHECK(escs[0].id == "Amb1");
    CHECK(escs[0].location.lat_text == "36.849723");
}

TEST_CASE("upsert_esc") {
    Registry reg;
    CHECK(reg.upsert_esc(esc("Amb1", 36.849723, 43.003630)));
    CHECK_FALSE(reg.upsert_esc(esc("Amb1", 36.9, 43.1)));
    REQUIRE(reg.list_escs().size() == 1);
    CHECK(reg.list_escs()[0].location.point == geo::GeoPoint{36.9, 43.1});
    CHECK(code_of([&] { reg.upsert_esc(esc("Amb9", 95, 0)); }) == ErrorCode::Validation);
    CHECK(code_of([&] { reg.upsert_esc(esc("", 0, 0)); }) == ErrorCode::Validation);
}

TEST_CASE("empty store exports header only") {
    Registry reg;
    CHECK(reg.export_table(Table::Registration) ==
          "ID,F_Name,L_Name,Emergency_Contact1,Emergency_Contact2,BirthDate,Disease_Name,Reg_Date\n");
    CHECK(reg.export_table(Table::Esc) == "ID,Latitude,Longitude\n");
    CHECK(reg.export_table(Table::NewRequest) ==
          "ID,request_time,received_time,latitude,longitude,isReserved,Terminal_ID\n");
    CHECK(reg.export_table(Table::RequestInfo) ==
          "ID,request_time,received_time,received_time2,latitude,longitude,reply_time,Esc_ID\n");
}

TEST_CASE("fixture CSVs round trip byte for byte") {
    Registry reg;
    load_fixture_dir(reg, kFixtures);
    for (const char* name : {"Registration", "ESC", "New_Request", "Request_Info"}) {
        CAPTURE(name);
        CHECK(reg.export_table(name) == slurp(kFixtures / (std::string(name) + ".csv")));
    }
}

TEST_CASE("import rejects malformed files without side effects") {
    Registry reg;
    load_fixture_dir(reg, kFixtures);
    const auto before = reg.export_table(Table::Esc);
    CHECK_THROWS_AS(reg.import_table(Table::Esc, "ID,Lat,Lon\nA,1,2\n"), Error);
    CHECK_THROWS_AS(reg.import_table(Table::Esc, "ID,Latitude,Longitude\nA,95,2\n"), Error);
    CHECK_THROWS_AS(reg.import_table(Table::Esc, "ID,Latitude,Longitude\nA,1,2\nA,3,4\n"), Error);
    CHECK_THROWS_AS(reg.import_table(Table::NewRequest,
                                     "ID,request_time,received_time,latitude,longitude,isReserved,Terminal_ID\n"
                                     "1,2013-03-05 16:33:36.000,2013-03-03 16:33:37.180,1,2,x,\n"),
                    Error);
    CHECK(reg.export_table(Table::Esc) == before);
}

TEST_CASE("lifecycle writes enforce integrity") {
    Registry reg;
    reg.register_patient(rose());
    reg.upsert_esc(esc("Amb1", 36.849723, 43.003630));
    const auto t0 = Timestamp::parse("2013-03-04 16:33:36.000");
    HelpRequest req{rose().id, t0, t0, Location::from_point({36.85126, 42.99551}), false, {}, {}, {}};
    reg.insert_live(req);
    CHECK(code_of([&] { reg.insert_live(req); }) == ErrorCode::Duplicate);

    auto stranger = req;
    stranger.patient_id = "999";
    CHECK(code_of([&] { reg.insert_live(stranger); }) == ErrorCode::UnknownPatient);

    auto ghost = req;
    ghost.request_time = Timestamp::from_millis(t0.millis() + 1);
    ghost.is_reserved = true;
    ghost.terminal_id = "Amb2";
    CHECK(code_of([&] { reg.insert_live(ghost); }) == ErrorCode::UnknownEsc);

    const auto key = req.key();
    CHECK(code_of([&] { reg.reserve(key, "Amb2", t0); }) == ErrorCode::UnknownEsc);
    CHECK(code_of([&] { reg.complete(key, t0, t0); }) == ErrorCode::BadState);
    reg.reserve(key, "Amb1", t0);
    CHECK(reg.find_esc("Amb1")->status == EscStatus::Reserved);
    CHECK(code_of([&] { reg.reserve(key, "Amb1", t0); }) == ErrorCode::BadState);

    const auto t1 = Timestamp::from_millis(t0.millis() + 1000);
    reg.acknowledge(key, t1);
    CHECK(code_of([&] { reg.complete(key, t1, t0); }) == ErrorCode::Validation);
    const auto done = reg.complete(key, t1, Timestamp::from_millis(t1.millis() + 500));
    CHECK(done.esc_id == "Amb1");
    CHECK(done.received_time2 == t1);
    CHECK(reg.find_esc("Amb1")->status == EscStatus::Free);
    CHECK_FALSE(reg.find_live(key));
    CHECK(reg.is_handled(key));
    CHECK(code_of([&] { reg.insert_live(req); }) == ErrorCode::Duplicate);
}

TEST_CASE("file journal survives restart") {
    TempDir dir;
    const auto path = dir.path / "journal.log";
    std::string exported[4];
    {
        Registry reg(std::make_unique<JournalFileBackend>(path));
        load_fixture_dir(reg, kFixtures);
        reg.register_patient([] {
            auto p = rose();
            p.id = "07500000001";
            return p;
        }());
        PatientUpdate up;
        up.last_name = "Maher-Fars";
        reg.update_patient("07504401111", up);
        reg.upsert_esc(esc("Amb6", 36.86, 42.98));
        for (int t = 0; t < 4; ++t)
            exported[t] = reg.export_table(static_cast<Table>(t));
    }
    Registry again(std::make_unique<JournalFileBackend>(path));
    for (int t = 0; t < 4; ++t)
        CHECK(again.export_table(static_cast<Table>(t)) == exported[t]);
    CHECK(again.get_patient("07504401111").last_name == "Maher-Fars");
}

TEST_CASE("torn journal tail is dropped and repaired") {
    TempDir dir;
    const auto path = dir.path / "journal.log";
    {
        Registry reg(std::make_unique<JournalFileBackend>(path));
        reg.register_patient(rose());
    }
    {
        std::ofstream out(path, std::ios::app | std::ios::binary);
        out << R"({"op":"register","patient":{"id":"0750)";
    }
    {
        Registry reg(std::make_unique<JournalFileBackend>(path));
        CHECK(reg.list_patients().size() == 1);
        reg.upsert_esc(esc("Amb1", 36.849723, 43.003630));
    }
    Registry reg(std::make_unique<JournalFileBackend>(path));
    CHECK(reg.list_patients().size() == 1);
    CHECK(reg.list_escs().size() == 1);
}

TEST_CASE("storage backend selection") {
    CHECK(open_backend("memory"));
    CHECK_THROWS_AS(open_backend("file:/nonexistent-dir/x/y/journal.log"), Error);
    try {
        open_backend("file:/nonexistent-dir/x/y/journal.log");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StorageFailure);
    }
    CHECK_THROWS_AS(open_backend("sqlite"), Error);
}

TEST_CASE("random registries round trip through export and import") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> count(0, 20), digit(0, 9), coin(0, 1);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
    for (int trial = 0; trial < 100; ++trial) {
        Registry src;
        const int np = count(rng), ne = count(rng) % 6;
        std::vector<std::string> ids;
        for (int i = 0; i < np; ++i) {
            auto p = rose();
            p.id = "07" + std::to_string(100000000 + trial * 1000 + i);
            p.first_name = coin(rng) ? "A, \"quoted\"" : "Plain";
            p.emergency_contact2 = coin(rng) ? "" : "0750" + std::to_string(digit(rng));
            src.register_patient(p);
            ids.push_back(p.id);
        }
        for (int i = 0; i < ne; ++i)
            src.upsert_esc(esc("E" + std::to_string(ne - i), lat(rng), lon(rng)));
        auto t = Timestamp::parse("2024-01-01 00:00:00.000").millis();
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto when = Timestamp::from_millis(t += 1000 + digit(rng));
            HelpRequest req{ids[i], when, when, Location::from_point({lat(rng), lon(rng)}),
                            false, {}, {}, {}};
            src.insert_live(req);
            auto escs = src.list_escs();
            auto free = std::find_if(escs.begin(), escs.end(),
                                     [](auto& e) { return e.status == EscStatus::Free; });
            if (free == escs.end() || coin(rng))
                continue;
            src.reserve(req.key(), free->id, when);
            if (coin(rng))
                src.complete(req.key(), Timestamp::from_millis(t + 5),
                             Timestamp::from_millis(t + 9));
        }

        Registry dst;
        std::string out[4];
        for (int k = 0; k < 4; ++k) {
            out[k] = src.export_table(static_cast<Table>(k));
            dst.import_table(static_cast<Table>(k), out[k]);
        }
        for (int k = 0; k < 4; ++k)
            REQUIRE(dst.export_table(static_cast<Table>(k)) == out[k]);

        // Reserved ESC count matches reserved live rows, in both registries.
        for (auto* r : {&src, &dst}) {
            std::size_t reserved_escs = 0, reserved_rows = 0;
            for (const auto& e : r->list_escs())
                reserved_escs += e.status == EscStatus::Reserved;
            for (const auto& l : r->live_requests())
                reserved_rows += l.is_reserved;
            REQUIRE(reserved_escs == reserved_rows);
            for (const auto& l : r->live_requests())
                REQUIRE_FALSE(r->is_handled(l.key()));
        }
    }
}
