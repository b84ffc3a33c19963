#include "rlcu/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace rlcu {

int QubitMask::count() const { return std::popcount(w[0]) + std::popcount(w[1]); }

static void check_qubits(int n) {
    if (n < 1 || n > kMaxQubits)
        throw std::invalid_argument("qubit count out of range: " + std::to_string(n));
}

PauliString PauliString::identity(int n) {
    check_qubits(n);
    PauliString p;
    p.n = n;
    return p;
}

PauliString PauliString::single(int n, int q, char c) {
    PauliString p = identity(n);
    if (q < 0 || q >= n) throw std::invalid_argument("qubit index out of range");
    switch (c) {
        case 'I': break;
        case 'X': p.x.set(q); break;
        case 'Z': p.z.set(q); break;
        case 'Y': p.x.set(q); p.z.set(q); break;
        default: throw std::invalid_argument(std::string("bad Pauli letter '") + c + "'");
    }
    return p;
}

PauliString PauliString::from_label(std::string_view label) {
    PauliString p = identity(static_cast<int>(label.size()));
    for (int q = 0; q < p.n; ++q) {
        switch (label[q]) {
            case 'I': break;
            case 'X': p.x.set(q); break;
            case 'Z': p.z.set(q); break;
            case 'Y': p.x.set(q); p.z.set(q); break;
            default: throw std::invalid_argument("bad Pauli label '" + std::string(label) + "'");
        }
    }
    return p;
}

char PauliString::at(int q) const {
    bool bx = x.test(q), bz = z.test(q);
    return bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
}

std::string PauliString::label() const {
    std::string s(n, 'I');
    for (int q = 0; q < n; ++q) s[q] = at(q);
    return s;
}

std::size_t PauliStringHash::operator()(const PauliString& p) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(p.n + 1);
    for (std::uint64_t v : {p.x.w[0], p.x.w[1], p.z.w[0], p.z.w[1]}) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

// P(x,z) = (-i)^{|x&z|} Z^z X^x, and X^a Z^b = (-1)^{|a&b|} Z^b X^a.
PhasedPauli multiply(const PauliString& a, const PauliString& b) {
    if (a.n != b.n) throw std::invalid_argument("Pauli multiply: qubit count mismatch");
    PhasedPauli r;
    r.string.n = a.n;
    r.string.x = a.x ^ b.x;
    r.string.z = a.z ^ b.z;
    int ya = (a.x & a.z).count();
    int yb = (b.x & b.z).count();
    int yr = (r.string.x & r.string.z).count();
    int swaps = (a.x & b.z).count();
    // (-i)^{ya+yb} (-1)^{swaps} Z X = (-i)^{ya+yb-yr} (-1)^{swaps} P_r
    int ph = (3 * (ya + yb) + yr + 2 * swaps) % 4;
    r.phase = ph;
    return r;
}

bool commutes(const PauliString& a, const PauliString& b) {
    if (a.n != b.n) throw std::invalid_argument("Pauli commutes: qubit count mismatch");
    return (((a.x & b.z).count() + (a.z & b.x).count()) & 1) == 0;
}

HamiltonianStats hamiltonian_stats(const std::vector<PauliTerm>& terms) {
    if (terms.empty()) throw std::invalid_argument("empty Hamiltonian");
    HamiltonianStats s;
    int n = terms.front().string.n;
    for (const auto& t : terms) {
        if (t.string.n != n) throw std::invalid_argument("inconsistent qubit counts in Hamiltonian");
        if (!std::isfinite(t.coeff)) throw std::invalid_argument("non-finite Hamiltonian coefficient");
        double a = std::abs(t.coeff);
        int w = t.string.weight();
        s.lambda += a;
        s.Lambda = std::max(s.Lambda, a);
        s.wt += w;
        s.wt_m = std::max(s.wt_m, w);
    }
    s.L = static_cast<int>(terms.size());
    s.n_L = s.L <= 1 ? 0 : static_cast<int>(std::bit_width(static_cast<unsigned>(s.L - 1)));
    return s;
}

Hamiltonian::Hamiltonian(int n, std::vector<PauliTerm> terms) : n_(n) {
    check_qubits(n);
    std::unordered_map<PauliString, std::size_t, PauliStringHash> index;
    for (auto& t : terms) {
        if (t.string.n != n) throw std::invalid_argument("inconsistent qubit counts in Hamiltonian");
        if (!std::isfinite(t.coeff)) throw std::invalid_argument("non-finite Hamiltonian coefficient");
        auto [it, fresh] = index.emplace(t.string, terms_.size());
        if (fresh)
            terms_.push_back(t);
        else
            terms_[it->second].coeff += t.coeff;
    }
    std::erase_if(terms_, [](const PauliTerm& t) { return t.coeff == 0.0; });
    if (terms_.empty()) throw std::invalid_argument("empty Hamiltonian");
    stats_ = hamiltonian_stats(terms_);
}

namespace {

PauliString two_site(int n, int i, int j, char p) {
    PauliString s = PauliString::single(n, i, p);
    PauliString t = PauliString::single(n, j, p);
    s.x = s.x ^ t.x;
    s.z = s.z ^ t.z;
    return s;
}

std::vector<std::pair<int, int>> chain_bonds(int n, bool periodic) {
    std::vector<std::pair<int, int>> b;
    for (int i = 0; i + 1 < n; ++i) b.emplace_back(i, i + 1);
    if (periodic && n > 2) b.emplace_back(n - 1, 0);
    return b;
}

void require_finite(std::initializer_list<double> xs) {
    for (double v : xs)
        if (!std::isfinite(v)) throw std::invalid_argument("invalid coupling: non-finite parameter");
}

}  // namespace

Hamiltonian build_model(std::string_view name, int n, const ModelParams& p) {
    if (n < 2) throw std::invalid_argument("model needs n >= 2");
    std::vector<PauliTerm> terms;
    if (name == "tfim") {
        require_finite({p.J, p.h});
        for (auto [i, j] : chain_bonds(n, p.periodic)) terms.push_back({-p.J, two_site(n, i, j, 'Z')});
        for (int i = 0; i < n; ++i) terms.push_back({-p.h, PauliString::single(n, i, 'X')});
    } else if (name == "heisenberg_xxz" || name == "heisenberg") {
        require_finite({p.Jx, p.Jy, p.Jz, p.hx, p.c});
        if (p.c < 1.0) throw std::invalid_argument("invalid coupling: xxz needs c >= 1");
        for (auto [i, j] : chain_bonds(n, p.periodic)) {
            terms.push_back({-p.Jx, two_site(n, i, j, 'X')});
            terms.push_back({-p.Jy, two_site(n, i, j, 'Y')});
            terms.push_back({-p.Jz, two_site(n, i, j, 'Z')});
        }
        for (int i = 0; i < n; ++i) terms.push_back({p.hx, PauliString::single(n, i, 'X')});
        double b = std::sqrt(p.c * p.c - 1.0);
        terms.push_back({b, PauliString::single(n, 0, 'Z')});
        terms.push_back({-b, PauliString::single(n, n - 1, 'Z')});
    } else if (name == "two_local") {
        require_finite({p.J, p.h});
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) terms.push_back({p.J, two_site(n, i, j, 'X')});
        for (int i = 0; i < n; ++i) terms.push_back({p.h, PauliString::single(n, i, 'Z')});
    } else {
        throw std::invalid_argument("unknown model '" + std::string(name) + "'");
    }
    return Hamiltonian(n, std::move(terms));
}

Hamiltonian parse_hamiltonian(std::istream& in) {
    std::string line;
    std::vector<PauliTerm> terms;
    int n = -1;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ss(line);
        std::string coeff_s, label;
        if (!(ss >> coeff_s)) continue;
        if (!(ss >> label)) throw ParseError(lineno, "expected 'coeff pauli_string'");
        std::string extra;
        if (ss >> extra) throw ParseError(lineno, "trailing token '" + extra + "'");
        double coeff;
        try {
            std::size_t used = 0;
            coeff = std::stod(coeff_s, &used);
            if (used != coeff_s.size()) throw std::invalid_argument("junk");
        } catch (const std::exception&) {
            throw ParseError(lineno, "bad coefficient '" + coeff_s + "'");
        }
        if (!std::isfinite(coeff)) throw ParseError(lineno, "non-finite coefficient");
        PauliString p;
        try {
            p = PauliString::from_label(label);
        } catch (const std::exception& e) {
            throw ParseError(lineno, e.what());
        }
        if (n < 0) n = p.n;
        if (p.n != n) throw ParseError(lineno, "string length differs from earlier lines");
        terms.push_back({coeff, p});
    }
    if (terms.empty()) throw ParseError(lineno, "no terms");
    try {
        return Hamiltonian(n, std::move(terms));
    } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
    }
}

Hamiltonian load_hamiltonian(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError(0, "cannot open '" + path + "'");
    return parse_hamiltonian(f);
}

std::string to_string(const SymmetryTerm& t) {
    switch (t.kind) {
        case SymmetryTerm::Kind::Swap:
            return "SWAP(" + std::to_string(t.i) + "," + std::to_string(t.j) + ")";
        case SymmetryTerm::Kind::ZString: {
            std::string s = "Z(";
            bool first = true;
            for (int q = 0; q < kMaxQubits; ++q)
                if (t.support.test(q)) {
                    if (!first) s += ",";
                    s += std::to_string(q);
                    first = false;
                }
            return s + ")";
        }
        case SymmetryTerm::Kind::Identity: return "I";
    }
    return "?";
}

// XX + YY = 2 SWAP - I - ZZ on each pair.
std::vector<SymmetryTerm> to_symmetry_basis(const Hamiltonian& H) {
    const int n = H.n();
    std::map<std::pair<int, int>, double> xx, yy;
    std::vector<std::pair<QubitMask, double>> zs;
    double id = 0.0;
    auto add_z = [&](const QubitMask& m, double c) {
        for (auto& [mask, v] : zs)
            if (mask == m) { v += c; return; }
        zs.emplace_back(m, c);
    };
    for (const auto& t : H.terms()) {
        const auto& p = t.string;
        if (p.x.none()) {
            if (p.z.none())
                id += t.coeff;
            else
                add_z(p.z, t.coeff);
            continue;
        }
        int i = -1, j = -1, cnt = 0;
        for (int q = 0; q < n; ++q)
            if (p.x.test(q) || p.z.test(q)) {
                (cnt == 0 ? i : j) = q;
                ++cnt;
            }
        char a = cnt == 2 ? p.at(i) : 'I';
        if (cnt != 2 || a != p.at(j) || (a != 'X' && a != 'Y'))
            throw std::invalid_argument("term " + p.label() + " has no SWAP/Z-string form");
        (a == 'X' ? xx : yy)[{i, j}] += t.coeff;
    }
    std::vector<SymmetryTerm> out;
    for (const auto& [ij, cx] : xx) {
        auto it = yy.find(ij);
        double cy = it == yy.end() ? 0.0 : it->second;
        if (std::abs(cx - cy) > 1e-12 * std::max(1.0, std::abs(cx)))
            throw std::invalid_argument("XX and YY coefficients differ on a pair; not number conserving");
        SymmetryTerm s;
        s.kind = SymmetryTerm::Kind::Swap;
        s.i = ij.first;
        s.j = ij.second;
        s.coeff = 2.0 * cx;
        out.push_back(s);
        QubitMask m;
        m.set(ij.first);
        m.set(ij.second);
        // XX + YY = 2 SWAP - ZZ - I
        add_z(m, -cx);
        id -= cx;
        if (it != yy.end()) yy.erase(it);
    }
    if (!yy.empty()) throw std::invalid_argument("YY term without matching XX; not number conserving");
    for (const auto& [mask, c] : zs) {
        if (std::abs(c) < 1e-14) continue;
        SymmetryTerm s;
        s.kind = SymmetryTerm::Kind::ZString;
        s.support = mask;
        s.coeff = c;
        out.push_back(s);
    }
    if (std::abs(id) >= 1e-14) {
        SymmetryTerm s;
        s.kind = SymmetryTerm::Kind::Identity;
        s.coeff = id;
        out.push_back(s);
    }
    return out;
}

}  // namespace rlcu
