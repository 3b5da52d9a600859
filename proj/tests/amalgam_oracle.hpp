#pragma once

// Test-only brute-force oracle for the amalgam normal form: explores every
// admissible rewrite order (merge adjacent same-factor syllables, absorb a
// core power into either neighbor) and puts each terminal word into
// canonical coset form with a local reimplementation of the representative
// rule. Lives beside the tests and stays independent of normalize().

#include "folia/amalgam.hpp"

#include <set>
#include <string>
#include <vector>

namespace folia_oracle {

using namespace folia;

struct RawWord {
    std::vector<std::pair<Factor, MoebiusMap>> sylls;
    bool operator<(const RawWord& o) const {
        if (sylls.size() != o.sylls.size()) return sylls.size() < o.sylls.size();
        for (size_t i = 0; i < sylls.size(); ++i) {
            if (sylls[i].first != o.sylls[i].first) return sylls[i].first < o.sylls[i].first;
            if (sylls[i].second != o.sylls[i].second) return sylls[i].second < o.sylls[i].second;
        }
        return false;
    }
};

inline bool is_core(const AmalgamContext& ctx, const MoebiusMap& m) {
    return ctx.core_exponent(m).has_value();
}

inline std::vector<RawWord> rewrite_steps(const AmalgamContext& ctx, const RawWord& w) {
    std::vector<RawWord> out;
    const size_t n = w.sylls.size();
    for (size_t i = 0; i + 1 < n; ++i) {
        if (w.sylls[i].first == w.sylls[i + 1].first) {
            RawWord next = w;
            next.sylls[i].second = compose(w.sylls[i].second, w.sylls[i + 1].second);
            next.sylls.erase(next.sylls.begin() + static_cast<long>(i) + 1);
            out.push_back(std::move(next));
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (!is_core(ctx, w.sylls[i].second)) continue;
        if (i > 0) {
            RawWord next = w;
            next.sylls[i - 1].second = compose(w.sylls[i - 1].second, w.sylls[i].second);
            next.sylls.erase(next.sylls.begin() + static_cast<long>(i));
            out.push_back(std::move(next));
        }
        if (i + 1 < n) {
            RawWord next = w;
            next.sylls[i + 1].second = compose(w.sylls[i].second, w.sylls[i + 1].second);
            next.sylls.erase(next.sylls.begin() + static_cast<long>(i));
            out.push_back(std::move(next));
        }
    }
    return out;
}

// Canonical (sides, matrices, tail) encoding of a terminal word.
inline std::string canonical_terminal(const AmalgamContext& ctx, const RawWord& w) {
    if (w.sylls.size() == 1 && is_core(ctx, w.sylls[0].second))
        return "tail:" + ctx.core_exponent(w.sylls[0].second)->get_str();
    Int lead = 0;
    std::string out;
    for (const auto& [side, m] : w.sylls) {
        MoebiusMap u = lead == 0 ? m : compose(ctx.ell_power(lead), m);
        CirclePoint anchor_pt = u.inverse()(CirclePoint(0l));
        if (anchor_pt.is_infinity()) anchor_pt = u.inverse()(CirclePoint(1l));
        const Int k = reduce(ctx.anchor(), anchor_pt).k;
        const MoebiusMap rep = k == 0 ? u : compose(u, ctx.ell_power(-k));
        lead = k;
        out += std::string(factor_prefix(side)) + rep.str() + "|";
    }
    out += "tail:" + lead.get_str();
    return out;
}

inline std::string canonical_of(const NormalForm& nf) {
    std::string out;
    for (const auto& s : nf.syllables) out += std::string(factor_prefix(s.side)) + s.matrix.str() + "|";
    out += "tail:" + nf.tail.get_str();
    return out;
}

// All canonical forms reachable by complete reduction, across every rewrite
// order. Confluence means the returned set is a singleton.
inline std::set<std::string> brute_force_reduce(const AmalgamContext& ctx, const RawWord& start) {
    std::set<RawWord> seen;
    std::set<std::string> terminals;
    std::vector<RawWord> stack{start};
    while (!stack.empty()) {
        RawWord cur = stack.back();
        stack.pop_back();
        if (!seen.insert(cur).second) continue;
        if (cur.sylls.empty()) {
            terminals.insert("tail:0");
            continue;
        }
        auto steps = rewrite_steps(ctx, cur);
        if (steps.empty()) {
            terminals.insert(canonical_terminal(ctx, cur));
            continue;
        }
        for (auto& nw : steps) stack.push_back(std::move(nw));
    }
    return terminals;
}

}  // namespace folia_oracle
