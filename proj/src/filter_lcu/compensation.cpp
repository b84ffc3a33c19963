#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "rlcu/filter_lcu.hpp"

namespace rlcu {

namespace {

using Poly = std::vector<std::unordered_map<BasisOp, cplx, BasisOpHash>>;

constexpr double kPrune = 1e-15;

double factorial(int s) {
    double f = 1;
    for (int i = 2; i <= s; ++i) f *= i;
    return f;
}

void prune(Poly& p, const std::vector<double>& ref, std::vector<double>& pruned) {
    for (std::size_t s = 0; s < p.size(); ++s) {
        const double cut = kPrune * ref[s];
        for (auto it = p[s].begin(); it != p[s].end();) {
            if (std::abs(it->second) < cut) {
                pruned[s] += std::abs(it->second);
                it = p[s].erase(it);
            } else {
                ++it;
            }
        }
    }
}

OrderBlock make_block(int s, std::vector<OpCoeff> terms) {
    OrderBlock b;
    b.s = s;
    std::sort(terms.begin(), terms.end(), [](const OpCoeff& a, const OpCoeff& c) {
        double x = std::abs(a.c), y = std::abs(c.c);
        if (x != y) return x > y;
        return a.op < c.op;
    });
    b.terms = std::move(terms);
    for (const auto& t : b.terms) b.norm1 += std::abs(t.c);
    double acc = 0;
    for (const auto& t : b.terms) {
        acc += std::abs(t.c);
        b.cdf.push_back(acc / b.norm1);
    }
    if (!b.cdf.empty()) b.cdf.back() = 1.0;
    return b;
}

std::size_t pick(const std::vector<double>& cdf, double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
}

Eigen::MatrixXcd op_matrix(const BasisOp& o, int n) {
    const std::uint64_t d = std::uint64_t{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (std::uint64_t b = 0; b < d; ++b) {
        std::uint64_t c = o.x ^ o.permute(b, n);
        m(c, b) = (std::popcount(o.z & c) & 1) ? -1.0 : 1.0;
    }
    return m;
}

}  // namespace

CompensationTable::CompensationTable(int n, const std::vector<TrotterTerm>& terms, const TrotterSchedule& schedule,
                                     int k, int s_c, bool pair_leading)
    : n_(n), k_(k), s_c_(s_c) {
    if (k < 0 || k > 2) throw std::invalid_argument("Trotter half-order k must be 0, 1 or 2");
    const int q = 2 * k + 1;
    if (s_c < q) throw std::invalid_argument("truncation order must be at least 2k+1");
    if (terms.empty()) throw std::invalid_argument("empty term list");
    if (k > 0 && schedule.empty()) throw std::invalid_argument("missing Trotter schedule");

    for (const auto& t : terms) lambda_ += std::abs(t.coeff);
    double rate = lambda_;
    for (auto [idx, frac] : schedule) rate += std::abs(terms[idx].coeff * frac);
    gamma_ = rate / lambda_ - 1;

    std::vector<double> ref(s_c + 1);
    for (int s = 0; s <= s_c; ++s) ref[s] = std::pow(rate, s) / factorial(s);
    pruned_.assign(s_c + 1, 0.0);

    // U(m) = sum_s m^s (-iH)^s / s!
    Poly V(s_c + 1);
    V[0][BasisOp{}] = 1.0;
    for (int s = 1; s <= s_c; ++s) {
        for (const auto& [op, c] : V[s - 1])
            for (const auto& t : terms) {
                SignedOp r = multiply(op, t.op);
                V[s][r.op] += c * double(r.sign) * t.coeff * t.h * cplx(0, -1) / double(s);
            }
        prune(V, ref, pruned_);
    }

    // right-multiply by F_j^dag = exp(+i beta m h op), F_1 first
    std::vector<cplx> powc(s_c + 1);
    for (auto [idx, frac] : schedule) {
        const auto& t = terms[idx];
        const double beta = t.coeff * frac;
        for (int r = 0; r <= s_c; ++r) powc[r] = std::pow(cplx(0, beta), r) / factorial(r);
        Poly next(s_c + 1);
        for (int s = 0; s <= s_c; ++s) {
            for (const auto& [op, c] : V[s]) {
                SignedOp odd = multiply(op, t.op);
                const cplx oc = c * double(odd.sign) * t.h;
                for (int r = 0; s + r <= s_c; ++r) {
                    if (r % 2 == 0)
                        next[s + r][op] += c * powc[r];
                    else
                        next[s + r][odd.op] += oc * powc[r];
                }
            }
        }
        V.swap(next);
        prune(V, ref, pruned_);
    }

    auto id = V[0].find(BasisOp{});
    if (V[0].size() != 1 || id == V[0].end() || std::abs(id->second - 1.0) > 1e-12)
        throw std::logic_error("zeroth order of the compensation series is not the identity");

    vanishing_.assign(2 * k, 0.0);
    for (int s = 1; s <= 2 * k; ++s)
        for (const auto& [op, c] : V[s]) vanishing_[s - 1] += std::abs(c);

    std::vector<OpCoeff> leftover;
    if (pair_leading) {
        paired_.enabled = true;
        paired_.q = q;
        identity_weight_ = 0.0;
        std::vector<std::pair<OpCoeff, cplx>> rot;
        for (const auto& [op, c] : V[q]) {
            SignedOp adj = adjoint(op);
            if (adj.op == op) {
                const cplx h = adj.sign == 1 ? cplx(1, 0) : cplx(0, 1);
                const double theta = (c / (cplx(0, 1) * h)).real();
                const cplx residual = c - cplx(0, theta) * h;
                if (theta != 0) rot.push_back({{op, theta}, h});
                if (std::abs(residual) >= kPrune * ref[q]) leftover.push_back({op, residual});
            } else {
                leftover.push_back({op, c});
            }
        }
        std::sort(rot.begin(), rot.end(), [](const auto& a, const auto& b) {
            double x = std::abs(a.first.c.real()), y = std::abs(b.first.c.real());
            if (x != y) return x > y;
            return a.first.op < b.first.op;
        });
        double acc = 0;
        for (const auto& [oc, h] : rot) paired_.Theta += std::abs(oc.c.real());
        for (const auto& [oc, h] : rot) {
            paired_.rot.push_back(oc);
            paired_.h.push_back(h);
            acc += std::abs(oc.c.real());
            paired_.cdf.push_back(acc / paired_.Theta);
        }
        if (!paired_.cdf.empty()) paired_.cdf.back() = 1.0;
    } else {
        for (const auto& [op, c] : V[q]) leftover.push_back({op, c});
    }
    if (!leftover.empty()) orders_.push_back(make_block(q, std::move(leftover)));
    for (int s = q + 1; s <= s_c; ++s) {
        std::vector<OpCoeff> ts;
        for (const auto& [op, c] : V[s]) ts.push_back({op, c});
        if (!ts.empty()) orders_.push_back(make_block(s, std::move(ts)));
    }
}

static double pair_weight(const PairedBlock& p, double am) {
    if (!p.enabled) return 0.0;
    const double x = p.Theta * std::pow(am, p.q);
    return std::sqrt(1 + x * x);
}

double CompensationTable::mu(double m) const {
    const double am = std::abs(m);
    double total = pair_weight(paired_, am) + identity_weight_;
    for (const auto& b : orders_) total += b.norm1 * std::pow(am, b.s);
    if (!std::isfinite(total) || total > 1e12) throw std::overflow_error("compensation series 1-norm overflow");
    return total;
}

double CompensationTable::eps_segment(double m) const {
    const double am = std::abs(m);
    const double x = (1 + gamma_) * lambda_ * am;
    // tail of exp(x) beyond order s_c
    double term = 1;
    for (int s = 1; s <= s_c_; ++s) term *= x / s;
    double tail = 0;
    for (int s = s_c_ + 1; s < s_c_ + 2000; ++s) {
        term *= x / s;
        tail += term;
        if (s > x && term < 1e-18 * tail) break;
    }
    double extra = 0;
    for (int s = 0; s <= s_c_; ++s) extra += pruned_[s] * std::pow(am, s);
    extra *= std::exp(x);
    for (int s = 1; s <= 2 * k_; ++s) extra += vanishing_[s - 1] * std::pow(am, s);
    return tail + extra;
}

Compensation CompensationTable::sample(double m, Rng& rng, cplx& phase) const {
    const double am = std::abs(m);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double u = u01(rng) * mu(m);
    Compensation w;
    phase = 1.0;
    const double wp = pair_weight(paired_, am);
    if (u < wp) {
        if (paired_.rot.empty()) return w;
        std::size_t r = pick(paired_.cdf, u01(rng));
        const double theta = paired_.rot[r].c.real();
        const double sgn = ((theta < 0) != (m < 0 && paired_.q % 2 == 1)) ? -1.0 : 1.0;
        w.kind = Compensation::Kind::rotation;
        w.op = paired_.rot[r].op;
        w.h = paired_.h[r];
        w.phi = sgn * std::atan(paired_.Theta * std::pow(am, paired_.q));
        return w;
    }
    u -= wp;
    if (u < identity_weight_) return w;
    u -= identity_weight_;
    const OrderBlock* chosen = nullptr;
    for (const auto& b : orders_) {
        chosen = &b;
        const double wb = b.norm1 * std::pow(am, b.s);
        if (u < wb) break;
        u -= wb;
    }
    if (!chosen) return w;
    std::size_t i = pick(chosen->cdf, u01(rng));
    const cplx c = chosen->terms[i].c;
    phase = c / std::abs(c);
    if (m < 0 && chosen->s % 2 == 1) phase = -phase;
    w.kind = Compensation::Kind::op;
    w.op = chosen->terms[i].op;
    return w;
}

std::vector<CompensationTable::Summand> CompensationTable::summands(double m) const {
    const double am = std::abs(m), total = mu(m);
    std::vector<Summand> out;
    const double wp = pair_weight(paired_, am);
    if (paired_.enabled) {
        if (paired_.rot.empty()) out.push_back({wp / total, Compensation{}, 1.0});
        for (std::size_t r = 0; r < paired_.rot.size(); ++r) {
            const double theta = paired_.rot[r].c.real();
            const double sgn = ((theta < 0) != (m < 0 && paired_.q % 2 == 1)) ? -1.0 : 1.0;
            Compensation w;
            w.kind = Compensation::Kind::rotation;
            w.op = paired_.rot[r].op;
            w.h = paired_.h[r];
            w.phi = sgn * std::atan(paired_.Theta * std::pow(am, paired_.q));
            out.push_back({wp * std::abs(theta) / paired_.Theta / total, w, 1.0});
        }
    }
    if (identity_weight_ > 0) out.push_back({identity_weight_ / total, Compensation{}, 1.0});
    for (const auto& b : orders_)
        for (const auto& t : b.terms) {
            Compensation w;
            w.kind = Compensation::Kind::op;
            w.op = t.op;
            cplx ph = t.c / std::abs(t.c);
            if (m < 0 && b.s % 2 == 1) ph = -ph;
            out.push_back({std::abs(t.c) * std::pow(am, b.s) / total, w, ph});
        }
    return out;
}

Eigen::MatrixXcd CompensationTable::dense_truncated(double m) const {
    const int d = 1 << n_;
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Identity(d, d);
    if (paired_.enabled) {
        const double mq = std::pow(m, paired_.q);
        for (std::size_t r = 0; r < paired_.rot.size(); ++r)
            V += cplx(0, paired_.rot[r].c.real() * mq) * paired_.h[r] * op_matrix(paired_.rot[r].op, n_);
    }
    for (const auto& b : orders_) {
        const double ms = std::pow(m, b.s);
        for (const auto& t : b.terms) V += t.c * ms * op_matrix(t.op, n_);
    }
    return V;
}

std::string CompensationTable::dump(int top) const {
    std::ostringstream os;
    os << fmt::format("compensation table k={} s_c={} lambda={:.6g} rate={:.6g}\n", k_, s_c_, lambda_,
                      (1 + gamma_) * lambda_);
    for (int s = 1; s <= 2 * k_; ++s) os << fmt::format("order {} norm1 {:.3e} (vanishing)\n", s, vanishing_[s - 1]);
    if (paired_.enabled) {
        os << fmt::format("paired order {} Theta {:.10g} rotations {}\n", paired_.q, paired_.Theta, paired_.rot.size());
        for (std::size_t r = 0; r < paired_.rot.size() && int(r) < top; ++r)
            os << fmt::format("  theta {:+.10g} {}{}\n", paired_.rot[r].c.real(),
                              paired_.h[r] == cplx(1, 0) ? "" : "i*", paired_.rot[r].op.str(n_));
    }
    for (const auto& b : orders_) {
        os << fmt::format("order {} norm1 {:.10g} terms {}\n", b.s, b.norm1, b.terms.size());
        for (std::size_t i = 0; i < b.terms.size() && int(i) < top; ++i)
            os << fmt::format("  ({:+.6e},{:+.6e}) {}\n", b.terms[i].c.real(), b.terms[i].c.imag(),
                              b.terms[i].op.str(n_));
    }
    return os.str();
}

}  // namespace rlcu
