#include "folia/amalgam.hpp"

#include <sstream>

namespace folia {

void FactorGroup::register_generator(const std::string& name, const MoebiusMap& m) {
    if (name.empty() || name == "ell")
        throw std::invalid_argument("generator name reserved or empty: " + name);
    if (!generators_.emplace(name, m).second)
        throw std::invalid_argument("generator already registered: " + name);
}

const MoebiusMap& FactorGroup::generator(const std::string& name) const {
    const auto it = generators_.find(name);
    if (it == generators_.end())
        throw UnregisteredFactor(std::string("unregistered generator ") + factor_prefix(side_) + ":" + name);
    return it->second;
}

std::vector<std::string> FactorGroup::names() const {
    std::vector<std::string> out;
    for (const auto& [name, m] : generators_) out.push_back(name);
    return out;
}

std::string FactorElement::str() const {
    std::ostringstream os;
    os << factor_prefix(side) << ":[";
    for (size_t i = 0; i < witness.size(); ++i) {
        if (i) os << " ";
        os << witness[i].name;
        if (witness[i].exp != 1) os << "^" << witness[i].exp;
    }
    os << "]";
    return os.str();
}

bool NormalForm::operator==(const NormalForm& o) const {
    if (tail != o.tail || syllables.size() != o.syllables.size()) return false;
    for (size_t i = 0; i < syllables.size(); ++i) {
        if (syllables[i].side != o.syllables[i].side) return false;
        if (syllables[i].matrix != o.syllables[i].matrix) return false;
    }
    return true;
}

bool NormalForm::operator<(const NormalForm& o) const {
    if (syllables.size() != o.syllables.size()) return syllables.size() < o.syllables.size();
    for (size_t i = 0; i < syllables.size(); ++i) {
        if (syllables[i].side != o.syllables[i].side) return syllables[i].side < o.syllables[i].side;
        if (syllables[i].matrix != o.syllables[i].matrix) return syllables[i].matrix < o.syllables[i].matrix;
    }
    return tail < o.tail;
}

std::string NormalForm::str() const {
    if (is_identity()) return "id";
    std::ostringstream os;
    for (size_t i = 0; i < syllables.size(); ++i) {
        if (i) os << " ";
        os << syllables[i].str();
    }
    if (tail != 0) {
        if (!syllables.empty()) os << " ";
        os << "ell^" << tail.get_str();
    }
    return os.str();
}

std::string NormalForm::key() const {
    std::string out;
    for (const auto& s : syllables) {
        out += factor_prefix(s.side);
        out += s.matrix.str();
        out += "|";
    }
    out += "t" + tail.get_str();
    return out;
}

AmalgamContext::AmalgamContext(FactorGroup right, FactorGroup left, ParabolicAnchor anchor)
    : right_(std::move(right)), left_(std::move(left)), anchor_(std::move(anchor)) {
    if (right_.side() != Factor::Right || left_.side() != Factor::Left)
        throw std::invalid_argument("factor sides are swapped");
}

MoebiusMap AmalgamContext::ell_power(const Int& k) const {
    return MoebiusMap::translation(Rat(k) * anchor_.translation());
}

std::optional<Int> AmalgamContext::core_exponent(const MoebiusMap& m) const {
    if (m.c() != 0 || m.a() != m.d()) return std::nullopt;
    const Rat shift = Rat(m.b()) / Rat(m.a());
    const Rat ratio = shift / anchor_.translation();
    if (ratio.get_den() != 1) return std::nullopt;
    return Int(ratio.get_num());
}

FactorElement AmalgamContext::letter(Factor side, const std::string& name, long exp) const {
    FactorElement out;
    out.side = side;
    out.matrix = factor(side).generator(name).pow(exp);
    out.witness.push_back({name, exp});
    return out;
}

FactorElement AmalgamContext::element(Factor side, const std::vector<WitnessLetter>& word) const {
    FactorElement out;
    out.side = side;
    out.matrix = MoebiusMap::identity();
    for (const auto& letter : word) {
        const MoebiusMap base = letter.name == "ell" ? anchor_.ell() : factor(side).generator(letter.name);
        out.matrix = compose(out.matrix, base.pow(letter.exp));
    }
    out.witness = word;
    return out;
}

namespace {

std::vector<WitnessLetter> merged_witness(std::vector<WitnessLetter> a,
                                          const std::vector<WitnessLetter>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

NormalForm normalize(const AmalgamContext& ctx, const AmalgamWord& w) {
    // Pass 1: merge adjacent same-factor syllables and push core powers right.
    std::vector<FactorElement> items;
    Int carry = 0;  // pending ell power multiplying the next syllable on the left
    for (const FactorElement& s : w.syllables) {
        FactorElement cur = s;
        if (carry != 0) {
            cur.matrix = compose(ctx.ell_power(carry), cur.matrix);
            cur.witness = merged_witness({{std::string("ell"), carry.get_si()}}, cur.witness);
            carry = 0;
        }
        for (;;) {
            if (auto k = ctx.core_exponent(cur.matrix)) {
                carry = *k;
                break;
            }
            if (!items.empty() && items.back().side == cur.side) {
                cur.matrix = compose(items.back().matrix, cur.matrix);
                cur.witness = merged_witness(items.back().witness, cur.witness);
                items.pop_back();
                continue;
            }
            items.push_back(cur);
            break;
        }
    }
    // Pass 2: canonical left-coset representatives; exponents migrate right.
    NormalForm out;
    Int e = carry + w.tail;  // trailing exponent so far, seen from the right end
    // Rebuild from the left while carrying the correction exponent.
    std::vector<FactorElement> canon;
    Int lead = 0;
    for (FactorElement& s : items) {
        if (lead != 0) {
            s.matrix = compose(ctx.ell_power(lead), s.matrix);
            s.witness = merged_witness({{std::string("ell"), lead.get_si()}}, s.witness);
        }
        // Canonical representative of s<ell>: anchor at s^-1(0), fallback s^-1(1).
        CirclePoint wpt = s.matrix.inverse()(CirclePoint(0l));
        if (wpt.is_infinity()) wpt = s.matrix.inverse()(CirclePoint(1l));
        const Int k = reduce(ctx.anchor(), wpt).k;
        if (k != 0) {
            s.matrix = compose(s.matrix, ctx.ell_power(-k));
            s.witness = merged_witness(s.witness, {{std::string("ell"), Int(-k).get_si()}});
        }
        lead = k;
        canon.push_back(std::move(s));
    }
    out.syllables = std::move(canon);
    out.tail = lead + e;
    return out;
}

NormalForm multiply(const AmalgamContext& ctx, const NormalForm& u, const NormalForm& v) {
    AmalgamWord joined;
    joined.syllables = u.syllables;
    if (u.tail != 0) {
        FactorElement core;
        core.side = Factor::Right;
        core.matrix = ctx.ell_power(u.tail);
        core.witness.push_back({std::string("ell"), u.tail.get_si()});
        joined.syllables.push_back(core);
    }
    joined.syllables.insert(joined.syllables.end(), v.syllables.begin(), v.syllables.end());
    joined.tail = v.tail;
    return normalize(ctx, joined);
}

NormalForm invert(const AmalgamContext& ctx, const NormalForm& u) {
    AmalgamWord rev;
    if (u.tail != 0) {
        FactorElement core;
        core.side = Factor::Right;
        core.matrix = ctx.ell_power(-u.tail);
        core.witness.push_back({std::string("ell"), Int(-u.tail).get_si()});
        rev.syllables.push_back(core);
    }
    for (auto it = u.syllables.rbegin(); it != u.syllables.rend(); ++it) {
        FactorElement inv;
        inv.side = it->side;
        inv.matrix = it->matrix.inverse();
        for (auto wit = it->witness.rbegin(); wit != it->witness.rend(); ++wit)
            inv.witness.push_back({wit->name, -wit->exp});
        rev.syllables.push_back(inv);
    }
    return normalize(ctx, rev);
}

MoebiusMap word_matrix(const AmalgamContext& ctx, const AmalgamWord& w) {
    MoebiusMap m;
    for (const auto& s : w.syllables) m = compose(m, s.matrix);
    if (w.tail != 0) m = compose(m, ctx.ell_power(w.tail));
    return m;
}

AmalgamWord parse_word(const AmalgamContext& ctx, const std::string& text) {
    AmalgamWord out;
    std::istringstream is(text);
    std::string token;
    bool saw_tail = false;
    while (is >> token) {
        long exp = 1;
        const auto caret = token.find('^');
        std::string head = token;
        if (caret != std::string::npos) {
            head = token.substr(0, caret);
            try {
                exp = std::stol(token.substr(caret + 1));
            } catch (...) {
                throw std::invalid_argument("bad exponent in word token: " + token);
            }
        }
        if (saw_tail)
            throw std::invalid_argument("ell tail must be the last token: " + text);
        if (head == "ell") {
            if (exp == 0) continue;
            FactorElement core;
            core.side = Factor::Right;
            core.matrix = ctx.ell_power(exp);
            core.witness.push_back({std::string("ell"), exp});
            out.syllables.push_back(core);
            continue;
        }
        if (head.size() < 3 || head[1] != ':' || (head[0] != 'R' && head[0] != 'L'))
            throw std::invalid_argument("word token must be R:name, L:name or ell: " + token);
        const Factor side = head[0] == 'R' ? Factor::Right : Factor::Left;
        if (exp == 0) continue;
        out.syllables.push_back(ctx.letter(side, head.substr(2), exp));
    }
    return out;
}

std::string word_str(const AmalgamWord& w) {
    std::ostringstream os;
    for (size_t i = 0; i < w.syllables.size(); ++i) {
        if (i) os << " ";
        os << w.syllables[i].str();
    }
    if (w.tail != 0) os << (w.syllables.empty() ? "" : " ") << "ell^" << w.tail.get_str();
    return os.str();
}

}  // namespace folia
