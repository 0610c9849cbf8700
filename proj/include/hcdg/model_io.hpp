#pragma once

#include "chart.hpp"

#include <fstream>
#include <json.hpp>

namespace hcdg {

namespace detail {

inline MultiPoly parse_coeff(const nlohmann::ordered_json& v, const Names& nm, bool complex) {
    std::string s;
    if (v.is_string()) s = v.get<std::string>();
    else if (v.is_number_integer()) s = std::to_string(v.get<long>());
    else throw model_error("polynomial entries must be strings or integers");
    MultiPoly p = parse_poly(s, nm);
    if (!complex)
        for (auto& [e, c] : p)
            if (!c.is_real()) throw model_error("imaginary coefficient in a real model: '" + s + "'");
    return p;
}

inline std::vector<int> parse_index_key(const std::string& key, size_t expect) {
    std::vector<int> out;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit))
            throw model_error("bad index key '" + key + "'");
        out.push_back(std::stoi(part) - 1);
    }
    if (out.size() != expect) throw model_error("index key '" + key + "' needs " + std::to_string(expect) + " entries");
    return out;
}

} // namespace detail

// Schema:
//   name, coords, complex, perfect,
//   F_frame: [[component per coord]...], B_lift: [[...]...],
//   connections: {name: {gamma_tilde: {"c,a,b": poly}, gamma_B: {"k,beta,gamma": poly}}}
//   weights: {name: {token: int}}
// gamma_B entries with k among the F-directions default to the Bott connection.
inline ChartModel parse_model_json(const nlohmann::ordered_json& j) {
    using detail::parse_coeff;
    ChartModel m;
    try {
        m.name = j.value("name", std::string("model"));
        m.complex = j.value("complex", false);
        m.perfect = j.value("perfect", false);
        m.names.coords = j.at("coords").get<std::vector<std::string>>();
        const auto& F = j.at("F_frame");
        const auto& B = j.contains("B_lift") ? j.at("B_lift") : nlohmann::ordered_json::array();
        m.names.r = int(F.size());
        int n = m.names.n();
        if (n < 1 || n > kMaxVars) throw model_error("coordinate count must be in 1..6");
        if (int(F.size() + B.size()) != n) throw model_error("F_frame and B_lift must together have n fields");
        auto read_field = [&](const nlohmann::ordered_json& row) {
            if (!row.is_array() || int(row.size()) != n) throw model_error("frame entry must list one polynomial per coordinate");
            VField v(n);
            for (int i = 0; i < n; ++i) v[i] = parse_coeff(row[i], m.names, m.complex);
            return v;
        };
        for (auto& row : F) m.U.push_back(read_field(row));
        for (auto& row : B) m.J.push_back(read_field(row));
    } catch (const nlohmann::json::exception& e) {
        throw model_error(std::string("model file schema: ") + e.what());
    } catch (const parse_error& e) {
        throw model_error(std::string("model file: ") + e.what());
    }
    // structure functions need the frame before connections are read
    std::vector<ConnectionData> pending;
    m.finalize();
    int n = m.n(), r = m.r(), nb = m.nB();
    try {
        if (j.contains("connections")) {
            for (auto& [cname, cj] : j.at("connections").items()) {
                ConnectionData cd;
                cd.name = cname;
                cd.gt = tensor3(r, r, r);
                cd.gb = tensor3(n, nb, nb);
                std::vector<std::vector<std::vector<bool>>> given(
                    n, std::vector<std::vector<bool>>(nb, std::vector<bool>(nb, false)));
                if (cj.contains("gamma_tilde"))
                    for (auto& [k, v] : cj.at("gamma_tilde").items()) {
                        auto idx = detail::parse_index_key(k, 3);
                        for (int t : idx)
                            if (t < 0 || t >= r) throw model_error("gamma_tilde index out of range in '" + k + "'");
                        cd.gt[idx[0]][idx[1]][idx[2]] = parse_coeff(v, m.names, m.complex);
                    }
                if (cj.contains("gamma_B"))
                    for (auto& [k, v] : cj.at("gamma_B").items()) {
                        auto idx = detail::parse_index_key(k, 3);
                        if (idx[0] < 0 || idx[0] >= n || idx[1] < 0 || idx[1] >= nb || idx[2] < 0 || idx[2] >= nb)
                            throw model_error("gamma_B index out of range in '" + k + "'");
                        cd.gb[idx[0]][idx[1]][idx[2]] = parse_coeff(v, m.names, m.complex);
                        given[idx[0]][idx[1]][idx[2]] = true;
                    }
                for (int a = 0; a < r; ++a)
                    for (int be = 0; be < nb; ++be)
                        for (int ga = 0; ga < nb; ++ga)
                            if (!given[a][be][ga]) cd.gb[a][be][ga] = m.C[a][r + be][r + ga];
                pending.push_back(std::move(cd));
            }
        }
        if (j.contains("weights"))
            for (auto& [wn, wj] : j.at("weights").items()) {
                std::map<std::string, int> w;
                for (auto& [tok, v] : wj.items()) w[tok] = v.get<int>();
                m.weights.emplace_back(wn, std::move(w));
            }
    } catch (const nlohmann::json::exception& e) {
        throw model_error(std::string("model file schema: ") + e.what());
    } catch (const parse_error& e) {
        throw model_error(std::string("model file: ") + e.what());
    }
    if (pending.empty()) {
        ConnectionData cd;
        cd.name = "default";
        cd.gt = tensor3(r, r, r);
        cd.gb = tensor3(n, nb, nb);
        for (int a = 0; a < r; ++a)
            for (int be = 0; be < nb; ++be)
                for (int ga = 0; ga < nb; ++ga) cd.gb[a][be][ga] = m.C[a][r + be][r + ga];
        pending.push_back(std::move(cd));
    }
    for (auto& cd : pending) m.check_connection(cd);
    m.connections = std::move(pending);
    return m;
}

inline ChartModel parse_model_text(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw model_error(std::string("model file is not valid JSON: ") + e.what());
    }
    return parse_model_json(j);
}

inline ChartModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw model_error("cannot open model file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model_text(ss.str());
}

} // namespace hcdg
