#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "biphoton/io.hpp"
#include "biphoton/spdc.hpp"
#include "support.hpp"

using namespace biphoton;
using namespace biphoton::testing;

namespace {

std::filesystem::path io_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "biphoton_io_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string path_for(const std::string& name) {
    return (io_dir() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(bool(out));
    out << text;
}

}  // namespace

TEST_CASE("density matrices round-trip bit-exactly") {
    Engine eng = make_engine(8080);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::Matrix4cd rho = random_density(eng).matrix();
        const std::string path = path_for("rho_roundtrip.json");
        write_density_matrix(path, rho);
        const Eigen::Matrix4cd back = read_density_matrix(path);
        CHECK(max_abs_diff(rho, back) == 0.0);
    }
}

TEST_CASE("writers emit full double precision and are byte-deterministic") {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = cd(1.0 / 3.0, 0.0);
    m(3, 3) = cd(2.0 / 3.0, 0.0);
    const std::string path_a = path_for("rho_digits_a.json");
    const std::string path_b = path_for("rho_digits_b.json");
    write_density_matrix(path_a, m);
    write_density_matrix(path_b, m);
    const std::string text = slurp(path_a);
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    CHECK(text.find("0.66666666666666663") != std::string::npos);
    CHECK(text == slurp(path_b));
}

TEST_CASE("density matrix reader rejects malformed input") {
    const std::string path = path_for("rho_bad.json");

    CHECK_THROWS_AS(read_density_matrix(path_for("does_not_exist.json")), IoError);

    spit(path, "this is not json");
    CHECK_THROWS_AS(read_density_matrix(path), IoError);

    spit(path, "[1, 2, 3]");
    CHECK_THROWS_AS(read_density_matrix(path), IoError);

    // Valid reference text to mutate.
    const std::string good = path_for("rho_good.json");
    write_density_matrix(good, Eigen::Matrix4cd::Identity() * cd(0.25, 0.0));
    const std::string good_text = slurp(good);

    spit(path, good_text.substr(0, good_text.size() / 2));
    CHECK_THROWS_AS(read_density_matrix(path), IoError);

    nlohmann::json j = nlohmann::json::parse(good_text);
    j["basis"] = "VV,VH,HV,HH";
    spit(path, j.dump());
    CHECK_THROWS_AS(read_density_matrix(path), IoError);

    j = nlohmann::json::parse(good_text);
    j["re"].erase(3);  // only 3 rows left
    spit(path, j.dump());
    CHECK_THROWS_AS(read_density_matrix(path), IoError);

    j = nlohmann::json::parse(good_text);
    j["re"][1].push_back(0.0);  // a 5-entry row
    spit(path, j.dump());
    CHECK_THROWS_AS(read_density_matrix(path), IoError);

    j = nlohmann::json::parse(good_text);
    j["im"][0][0] = "x";
    spit(path, j.dump());
    CHECK_THROWS_AS(read_density_matrix(path), IoError);

    j = nlohmann::json::parse(good_text);
    j.erase("im");
    spit(path, j.dump());
    CHECK_THROWS_AS(read_density_matrix(path), IoError);

    // A missing basis field is fine: the default ordering is assumed.
    j = nlohmann::json::parse(good_text);
    j.erase("basis");
    spit(path, j.dump());
    CHECK_NOTHROW(read_density_matrix(path));
}

TEST_CASE("count records round-trip with integral counts kept as integers") {
    std::vector<TomographyRecord> records;
    records.push_back({{parse_polarization_token("H"), parse_polarization_token("V"), "H", "V"},
                       42.0, 1000.0});
    records.push_back({{parse_polarization_token("22.5"), parse_polarization_token("D"),
                        "22.5", "D"},
                       2.5, 1000.0});
    const std::string path = path_for("counts_roundtrip.json");
    write_counts(path, records);

    const std::string text = slurp(path);
    CHECK(text.find("\"coincidences\": 42,") != std::string::npos);
    CHECK(text.find("\"coincidences\": 2.5,") != std::string::npos);
    CHECK(text.find("42.0") == std::string::npos);

    const auto back = read_counts(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].setting.alice_token == "H");
    CHECK(back[0].setting.bob_token == "V");
    CHECK(back[0].coincidences == 42.0);
    CHECK(back[0].exposure == 1000.0);
    CHECK(back[1].setting.alice_token == "22.5");
    CHECK(back[1].coincidences == 2.5);
    // The parsed angle token must rebuild the same projector.
    const Ket2 expected = linear_ket(22.5);
    CHECK(std::abs(back[1].setting.alice.amplitudes()[0] - expected.amplitudes()[0]) < 1e-15);
    CHECK(std::abs(back[1].setting.alice.amplitudes()[1] - expected.amplitudes()[1]) < 1e-15);
}

TEST_CASE("simulated counts survive a file round trip") {
    const auto records = simulate_counts(rho_from_coherence(cd(0.74, 0.0)),
                                         standard_tomography_set(), 1e4, 99);
    const std::string path = path_for("counts_sim.json");
    write_counts(path, records);
    const auto back = read_counts(path);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].coincidences == records[i].coincidences);
        CHECK(back[i].exposure == records[i].exposure);
        CHECK(back[i].setting.label() == records[i].setting.label());
    }
}

TEST_CASE("count reader rejects malformed input") {
    const std::string path = path_for("counts_bad.json");

    spit(path, "{}");
    CHECK_THROWS_AS(read_counts(path), IoError);

    spit(path, R"([{"alice": "H", "coincidences": 1, "exposure": 10}])");
    CHECK_THROWS_AS(read_counts(path), IoError);  // no bob

    spit(path, R"([{"alice": "Q", "bob": "H", "coincidences": 1, "exposure": 10}])");
    CHECK_THROWS_AS(read_counts(path), IoError);  // unknown token

    spit(path, R"([{"alice": "H", "bob": "H", "coincidences": "many", "exposure": 10}])");
    CHECK_THROWS_AS(read_counts(path), IoError);

    spit(path, R"([{"alice": "H", "bob": "H", "coincidences": 1}])");
    CHECK_THROWS_AS(read_counts(path), IoError);  // no exposure
}

TEST_CASE("entanglement reports serialize every field") {
    const EntanglementReport rep = report(rho_from_coherence(cd(0.74, 0.0)));
    const std::string path = path_for("report.json");
    write_entanglement_report(path, rep);

    const nlohmann::json j = nlohmann::json::parse(slurp(path));
    CHECK(j.at("concurrence").get<double>() == rep.concurrence);
    CHECK(j.at("entropy_nats").get<double>() == rep.entropy_nats);
    CHECK(j.at("entropy_bits").get<double>() == rep.entropy_bits);
    REQUIRE(j.at("eigenvalues").size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(j.at("eigenvalues").at(i).get<double>() == rep.eigenvalues[i]);
    }
    CHECK(j.at("s_fixed").get<double>() == rep.s_fixed);
    CHECK(j.at("s_max").get<double>() == rep.s_max);
    REQUIRE(j.at("violates_chsh").is_boolean());
    CHECK(j.at("violates_chsh").get<bool>() == rep.violates_chsh);
    CHECK(rep.violates_chsh);
}

TEST_CASE("reconstruction summaries serialize with integral iteration counts") {
    ReconstructionSummary s;
    s.objective = 3.25;
    s.iterations = 12345;
    s.converged = true;
    s.min_eigenvalue_raw = -0.0023;
    const std::string path = path_for("reconstruction.json");
    write_reconstruction_summary(path, s);

    const nlohmann::json j = nlohmann::json::parse(slurp(path));
    CHECK(j.at("objective").get<double>() == 3.25);
    REQUIRE(j.at("iterations").is_number_integer());
    CHECK(j.at("iterations").get<long long>() == 12345);
    CHECK(j.at("converged").get<bool>() == true);
    CHECK(j.at("min_eigenvalue_raw").get<double>() == -0.0023);
}

TEST_CASE("coherence summaries include the bandwidth only when known") {
    CoherenceSummary s;
    s.value = cd(0.6, -0.15);
    s.sigma_t_fs = 73.5;
    s.tau_fs = 100.0;
    const std::string path = path_for("coherence.json");
    write_coherence(path, s);
    nlohmann::json j = nlohmann::json::parse(slurp(path));
    CHECK(j.at("re").get<double>() == 0.6);
    CHECK(j.at("im").get<double>() == -0.15);
    CHECK(j.at("magnitude").get<double>() == std::abs(cd(0.6, -0.15)));
    CHECK(j.at("sigma_t_fs").get<double>() == 73.5);
    CHECK(j.at("tau_fs").get<double>() == 100.0);
    CHECK_FALSE(j.contains("bandwidth_nm"));

    s.bandwidth_nm = 8.0;
    write_coherence(path, s);
    j = nlohmann::json::parse(slurp(path));
    CHECK(j.at("bandwidth_nm").get<double>() == 8.0);
}

TEST_CASE("scenario files fill defaults and demand a width source") {
    const std::string path = path_for("scenario.json");

    spit(path, R"({"bandwidth_nm": 8.0})");
    FilterScenario s = read_scenario(path);
    CHECK(s.bandwidth_nm == 8.0);
    CHECK(s.center_nm == 532.0);
    CHECK(s.tau_fs == 100.0);
    CHECK_FALSE(s.sigma_t_fs.has_value());

    spit(path, R"({"sigma_t_fs": 50.0, "tau_fs": 25.0, "center_nm": 800.0})");
    s = read_scenario(path);
    CHECK(s.sigma_t_fs.has_value());
    CHECK(*s.sigma_t_fs == 50.0);
    CHECK(s.tau_fs == 25.0);
    CHECK(s.center_nm == 800.0);

    spit(path, "{}");
    CHECK_THROWS_AS(read_scenario(path), IoError);

    spit(path, "[1]");
    CHECK_THROWS_AS(read_scenario(path), IoError);

    spit(path, R"({"bandwidth_nm": "wide"})");
    CHECK_THROWS_AS(read_scenario(path), IoError);
}

TEST_CASE("fringe tables tabulate rates and correlations over bob's angle") {
    const std::string path = path_for("fringes.csv");
    write_fringes(path, DensityMatrix::pure(bell_phi_plus()));

    std::istringstream in(slurp(path));
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "bob_angle_deg,rate_alice45,rate_alice135,E_alice45,E_alice135");

    int rows = 0;
    const double deg = std::numbers::pi / 180.0;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(cells, cell, ',')) {
            v.push_back(std::stod(cell));
        }
        REQUIRE(v.size() == 5);
        const double theta = v[0];
        CHECK(theta == 5.0 * rows);
        const double c45 = std::cos((45.0 - theta) * deg);
        const double c135 = std::cos((135.0 - theta) * deg);
        CHECK(std::abs(v[1] - 0.5 * c45 * c45) < 1e-9);
        CHECK(std::abs(v[2] - 0.5 * c135 * c135) < 1e-9);
        CHECK(std::abs(v[3] - std::sin(2.0 * theta * deg)) < 1e-9);
        CHECK(std::abs(v[4] + std::sin(2.0 * theta * deg)) < 1e-9);
        ++rows;
    }
    CHECK(rows == 37);
}

TEST_CASE("fringe rates reproduce the analytic diagonal point") {
    const double c = 0.21;
    const std::string path = path_for("fringes_c.csv");
    write_fringes(path, rho_from_coherence(cd(c, 0.0)));

    std::istringstream in(slurp(path));
    std::string line;
    std::getline(in, line);  // header
    bool seen = false;
    while (std::getline(in, line)) {
        if (line.rfind("45,", 0) == 0) {
            std::istringstream cells(line);
            std::string cell;
            std::vector<double> v;
            while (std::getline(cells, cell, ',')) {
                v.push_back(std::stod(cell));
            }
            REQUIRE(v.size() == 5);
            CHECK(std::abs(v[1] - (1.0 + c) / 4.0) < 1e-12);
            CHECK(std::abs(v[2] - (1.0 - c) / 4.0) < 1e-12);
            CHECK(std::abs(v[3] - c) < 1e-12);
            CHECK(std::abs(v[4] + c) < 1e-12);
            seen = true;
        }
    }
    CHECK(seen);
}
