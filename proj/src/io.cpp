#include "biphoton/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace biphoton {

namespace {

using nlohmann::json;

constexpr const char* kBasisLabel = "HH,HV,VH,VV";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << text;
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

double number_at(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw IoError(path + ": missing numeric field '" + key + "'");
    }
    return j.at(key).get<double>();
}

}  // namespace

void write_density_matrix(const std::string& path, const Eigen::Matrix4cd& rho) {
    std::ostringstream out;
    out << "{\n  \"basis\": \"" << kBasisLabel << "\",\n";
    for (int part = 0; part < 2; ++part) {
        out << "  \"" << (part == 0 ? "re" : "im") << "\": [\n";
        for (int i = 0; i < 4; ++i) {
            out << "    [";
            for (int j = 0; j < 4; ++j) {
                const double v = part == 0 ? rho(i, j).real() : rho(i, j).imag();
                out << fmt(v) << (j < 3 ? ", " : "");
            }
            out << (i < 3 ? "],\n" : "]\n");
        }
        out << (part == 0 ? "  ],\n" : "  ]\n");
    }
    out << "}\n";
    write_text(path, out.str());
}

Eigen::Matrix4cd read_density_matrix(const std::string& path) {
    const json j = load_json(path);
    if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
        throw IoError(path + ": expected an object with 're' and 'im' 4x4 arrays");
    }
    if (j.contains("basis") && j.at("basis") != kBasisLabel) {
        throw IoError(path + ": unsupported basis ordering");
    }
    Eigen::Matrix4cd rho;
    for (int part = 0; part < 2; ++part) {
        const json& block = j.at(part == 0 ? "re" : "im");
        if (!block.is_array() || block.size() != 4) {
            throw IoError(path + ": matrix blocks must be 4 rows");
        }
        for (int r = 0; r < 4; ++r) {
            const json& row = block.at(r);
            if (!row.is_array() || row.size() != 4) {
                throw IoError(path + ": matrix rows must have 4 entries");
            }
            for (int c = 0; c < 4; ++c) {
                if (!row.at(c).is_number()) {
                    throw IoError(path + ": matrix entries must be numbers");
                }
                const double v = row.at(c).get<double>();
                if (part == 0) {
                    rho(r, c) = cd(v, 0.0);
                } else {
                    rho(r, c) += cd(0.0, v);
                }
            }
        }
    }
    return rho;
}

void write_counts(const std::string& path, const std::vector<TomographyRecord>& records) {
    std::ostringstream out;
    out << "[\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        out << "  {\"alice\": \"" << escape(r.setting.alice_token) << "\", \"bob\": \""
            << escape(r.setting.bob_token) << "\", \"coincidences\": ";
        if (r.coincidences == std::floor(r.coincidences)
            && std::abs(r.coincidences) < 9e15) {
            out << static_cast<long long>(r.coincidences);
        } else {
            out << fmt(r.coincidences);
        }
        out << ", \"exposure\": " << fmt(r.exposure) << "}"
            << (i + 1 < records.size() ? "," : "") << "\n";
    }
    out << "]\n";
    write_text(path, out.str());
}

std::vector<TomographyRecord> read_counts(const std::string& path) {
    const json j = load_json(path);
    if (!j.is_array()) {
        throw IoError(path + ": expected a JSON array of count records");
    }
    std::vector<TomographyRecord> records;
    records.reserve(j.size());
    for (const json& item : j) {
        if (!item.is_object() || !item.contains("alice") || !item.contains("bob")
            || !item.at("alice").is_string() || !item.at("bob").is_string()) {
            throw IoError(path + ": each record needs string 'alice' and 'bob' fields");
        }
        const std::string a_tok = item.at("alice").get<std::string>();
        const std::string b_tok = item.at("bob").get<std::string>();
        Ket2 a = ket_h();
        Ket2 b = ket_h();
        try {
            a = parse_polarization_token(a_tok);
            b = parse_polarization_token(b_tok);
        } catch (const std::invalid_argument& e) {
            throw IoError(path + ": " + e.what());
        }
        const double n = number_at(item, "coincidences", path);
        const double exposure = number_at(item, "exposure", path);
        records.push_back({{a, b, a_tok, b_tok}, n, exposure});
    }
    return records;
}

void write_entanglement_report(const std::string& path, const EntanglementReport& report) {
    std::ostringstream out;
    out << "{\n"
        << "  \"concurrence\": " << fmt(report.concurrence) << ",\n"
        << "  \"entropy_nats\": " << fmt(report.entropy_nats) << ",\n"
        << "  \"entropy_bits\": " << fmt(report.entropy_bits) << ",\n"
        << "  \"eigenvalues\": [" << fmt(report.eigenvalues[0]) << ", "
        << fmt(report.eigenvalues[1]) << ", " << fmt(report.eigenvalues[2]) << ", "
        << fmt(report.eigenvalues[3]) << "],\n"
        << "  \"s_fixed\": " << fmt(report.s_fixed) << ",\n"
        << "  \"s_max\": " << fmt(report.s_max) << ",\n"
        << "  \"violates_chsh\": " << (report.violates_chsh ? "true" : "false") << "\n"
        << "}\n";
    write_text(path, out.str());
}

void write_reconstruction_summary(const std::string& path, const ReconstructionSummary& s) {
    std::ostringstream out;
    out << "{\n"
        << "  \"objective\": " << fmt(s.objective) << ",\n"
        << "  \"iterations\": " << s.iterations << ",\n"
        << "  \"converged\": " << (s.converged ? "true" : "false") << ",\n"
        << "  \"min_eigenvalue_raw\": " << fmt(s.min_eigenvalue_raw) << "\n"
        << "}\n";
    write_text(path, out.str());
}

void write_coherence(const std::string& path, const CoherenceSummary& s) {
    std::ostringstream out;
    out << "{\n"
        << "  \"re\": " << fmt(s.value.real()) << ",\n"
        << "  \"im\": " << fmt(s.value.imag()) << ",\n"
        << "  \"magnitude\": " << fmt(std::abs(s.value)) << ",\n"
        << "  \"sigma_t_fs\": " << fmt(s.sigma_t_fs) << ",\n"
        << "  \"tau_fs\": " << fmt(s.tau_fs);
    if (s.bandwidth_nm) {
        out << ",\n  \"bandwidth_nm\": " << fmt(*s.bandwidth_nm);
    }
    out << "\n}\n";
    write_text(path, out.str());
}

FilterScenario read_scenario(const std::string& path) {
    const json j = load_json(path);
    if (!j.is_object()) {
        throw IoError(path + ": expected a scenario object");
    }
    FilterScenario s;
    if (j.contains("bandwidth_nm")) {
        s.bandwidth_nm = number_at(j, "bandwidth_nm", path);
    }
    if (j.contains("center_nm")) {
        s.center_nm = number_at(j, "center_nm", path);
    }
    if (j.contains("tau_fs")) {
        s.tau_fs = number_at(j, "tau_fs", path);
    }
    if (j.contains("sigma_t_fs")) {
        s.sigma_t_fs = number_at(j, "sigma_t_fs", path);
    }
    if (!j.contains("bandwidth_nm") && !s.sigma_t_fs) {
        throw IoError(path + ": scenario needs bandwidth_nm or sigma_t_fs");
    }
    return s;
}

void write_fringes(const std::string& path, const DensityMatrix& rho) {
    std::ostringstream out;
    out << "bob_angle_deg,rate_alice45,rate_alice135,E_alice45,E_alice135\n";
    for (int b = 0; b <= 180; b += 5) {
        const double angle = static_cast<double>(b);
        const double rate45 =
            born_probability(rho, {linear_ket(45.0), linear_ket(angle), "", ""});
        const double rate135 =
            born_probability(rho, {linear_ket(135.0), linear_ket(angle), "", ""});
        out << b << "," << fmt(rate45) << "," << fmt(rate135) << ","
            << fmt(correlation(rho, 45.0, angle)) << ","
            << fmt(correlation(rho, 135.0, angle)) << "\n";
    }
    write_text(path, out.str());
}

}  // namespace biphoton
