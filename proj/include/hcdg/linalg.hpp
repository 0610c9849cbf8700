#pragma once

#include "scalar.hpp"

#include <map>
#include <optional>
#include <vector>

namespace hcdg {

using SVec = std::map<int, Scalar>;

inline void axpy(SVec& y, const Scalar& a, const SVec& x) {
    if (a.is_zero()) return;
    for (const auto& [k, v] : x) {
        auto it = y.find(k);
        if (it == y.end()) {
            y.emplace(k, a * v);
        } else {
            it->second += a * v;
            if (it->second.is_zero()) y.erase(it);
        }
    }
}

// Incremental row echelon basis of sparse vectors with provenance tracking:
// every stored vector remembers which input combination produced it.
class Echelon {
public:
    struct Row {
        SVec v;
        SVec prov;
    };

    // Reduce v (and its provenance) against the stored pivots.
    void reduce(SVec& v, SVec& prov) const {
        auto it = v.begin();
        while (it != v.end()) {
            auto p = rows_.find(it->first);
            if (p == rows_.end()) {
                ++it;
                continue;
            }
            int k = it->first;
            Scalar c = -it->second;
            axpy(v, c, p->second.v);
            axpy(prov, c, p->second.prov);
            it = v.upper_bound(k);
        }
    }
    void reduce(SVec& v) const {
        auto it = v.begin();
        while (it != v.end()) {
            auto p = rows_.find(it->first);
            if (p == rows_.end()) {
                ++it;
                continue;
            }
            int k = it->first;
            axpy(v, -it->second, p->second.v);
            it = v.upper_bound(k);
        }
    }

    // Returns true when v is independent of the stored rows; otherwise prov holds
    // the dependency (v_input - sum = 0 expressed through provenance).
    bool insert(SVec v, SVec& prov) {
        reduce(v, prov);
        if (v.empty()) return false;
        int k = v.begin()->first;
        Scalar inv = Scalar(1) / v.begin()->second;
        for (auto& kv : v) kv.second *= inv;
        for (auto& kv : prov) kv.second *= inv;
        rows_.emplace(k, Row{std::move(v), prov});
        return true;
    }
    bool insert(SVec v) {
        SVec p;
        return insert(std::move(v), p);
    }

    size_t rank() const { return rows_.size(); }
    bool contains(SVec v) const {
        reduce(v);
        return v.empty();
    }

private:
    std::map<int, Row> rows_;
};

// Solve sum_j x_j col_j = rhs. Returns x (sparse over column indices) or nullopt.
inline std::optional<SVec> solve_columns(const std::vector<SVec>& cols, const SVec& rhs) {
    Echelon e;
    for (size_t j = 0; j < cols.size(); ++j) {
        SVec p{{int(j), Scalar(1)}};
        e.insert(cols[j], p);
    }
    SVec v = rhs, prov;
    e.reduce(v, prov);
    if (!v.empty()) return std::nullopt;
    // rhs - sum prov_j col_j ... reduce subtracts, so rhs + sum prov_j col_j = 0
    SVec x;
    for (auto& [j, c] : prov) x.emplace(j, -c);
    return x;
}

struct RankData {
    size_t rank = 0;
    std::vector<SVec> kernel;  // over column indices
};

inline RankData rank_and_kernel(const std::vector<SVec>& cols) {
    Echelon e;
    RankData out;
    for (size_t j = 0; j < cols.size(); ++j) {
        SVec p{{int(j), Scalar(1)}};
        if (!e.insert(cols[j], p)) out.kernel.push_back(p);
    }
    out.rank = e.rank();
    return out;
}

} // namespace hcdg
