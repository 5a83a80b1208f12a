#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "potential.hpp"

namespace ruelle {

// Fixed 17-significant-digit rendering: round-trip exact and byte-stable.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string kind_name(PotentialKind k) {
    switch (k) {
        case PotentialKind::IsingType: return "IsingType";
        case PotentialKind::ProductType: return "ProductType";
        case PotentialKind::Binary: return "Binary";
    }
    return "IsingType";
}

inline PotentialKind kind_from_name(const std::string& s) {
    if (s == "IsingType") return PotentialKind::IsingType;
    if (s == "ProductType") return PotentialKind::ProductType;
    if (s == "Binary") return PotentialKind::Binary;
    throw std::invalid_argument("unknown potential kind: " + s);
}

inline nlohmann::ordered_json to_json(const CouplingSpec& s) {
    nlohmann::ordered_json j;
    j["kind"] = kind_name(s.kind);
    j["h"] = s.h;
    j["beta"] = s.beta;
    nlohmann::ordered_json c;
    switch (s.rule.kind) {
        case CouplingRule::Kind::PowerLaw:
            c["rule"] = "PowerLaw";
            c["params"] = {{"gamma", s.rule.gamma}};
            break;
        case CouplingRule::Kind::Geometric:
            c["rule"] = "Geometric";
            c["params"] = {{"lambda", s.rule.lambda}};
            break;
        case CouplingRule::Kind::Explicit:
            c["rule"] = "Explicit";
            c["params"] = {{"list", s.rule.list}};
            break;
    }
    j["couplings"] = c;
    j["truncation_K"] = s.truncation_K;
    j["spin_scale"] = s.spin_scale;
    return j;
}

inline CouplingSpec coupling_spec_from_json(const nlohmann::json& j) {
    CouplingSpec s;
    s.kind = kind_from_name(j.at("kind").get<std::string>());
    s.h = j.value("h", 0.0);
    s.beta = j.value("beta", 1.0);
    const auto& c = j.at("couplings");
    std::string rule = c.at("rule").get<std::string>();
    if (rule == "PowerLaw")
        s.rule = CouplingRule::power_law(c.at("params").at("gamma").get<double>());
    else if (rule == "Geometric")
        s.rule = CouplingRule::geometric(c.at("params").at("lambda").get<double>());
    else if (rule == "Explicit")
        s.rule = CouplingRule::explicit_list(c.at("params").at("list").get<std::vector<double>>());
    else
        throw std::invalid_argument("unknown coupling rule: " + rule);
    s.truncation_K = j.value("truncation_K", 64);
    s.spin_scale = j.value("spin_scale", 1.0);
    if (s.kind == PotentialKind::Binary) s.spin_scale = 0.5;
    s.validate();
    return s;
}

// RFC 4180: CRLF line endings, '.' decimal separator, header mandatory.
struct CsvWriter {
    std::ofstream out;

    explicit CsvWriter(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw std::runtime_error("cannot open output file: " + path);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << "\r\n";
    }
};

inline void write_json_file(const nlohmann::ordered_json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace ruelle
