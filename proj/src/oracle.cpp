#include "odlab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "odlab/errors.hpp"
#include "odlab/kernel.hpp"

namespace odlab {

namespace {

struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double term) {
        const double y = term - comp;
        const double next = sum + y;
        comp = (next - sum) - y;
        sum = next;
    }
};

void check_budget(const Configuration& config) {
    if (config.n > kOracleMaxN || config.k() > kOracleMaxK)
        throw BudgetExceeded("oracle: instance n=" + std::to_string(config.n) + ", k=" + std::to_string(config.k()) +
                             " exceeds the enumeration budget (n <= " + std::to_string(kOracleMaxN) +
                             ", k <= " + std::to_string(kOracleMaxK) + ")");
}

// Destination distribution of one vertex, enumerated from the sampling rule
// itself (ordered neighbor triples / pairs weighted by the fractions).
std::vector<double> vertex_law_3majority(const std::vector<double>& alpha) {
    const int k = static_cast<int>(alpha.size());
    std::vector<double> law(k, 0.0);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            for (int c = 0; c < k; ++c)
                law[a == b ? a : c] += alpha[a] * alpha[b] * alpha[c];
    return law;
}

std::vector<double> vertex_law_2choices(const std::vector<double>& alpha, int origin) {
    const int k = static_cast<int>(alpha.size());
    std::vector<double> law(k, 0.0);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            law[a == b ? a : origin] += alpha[a] * alpha[b];
    return law;
}

using Pmf = std::map<std::vector<std::int64_t>, double>;

// Adds `vertices` independent draws from `law` to every support point.
Pmf convolve_vertices(const Pmf& base, const std::vector<double>& law, std::int64_t vertices) {
    Pmf current = base;
    for (std::int64_t v = 0; v < vertices; ++v) {
        Pmf next;
        for (const auto& [vec, prob] : current) {
            for (std::size_t d = 0; d < law.size(); ++d) {
                if (law[d] <= 0.0) continue;
                std::vector<std::int64_t> bumped = vec;
                bumped[d] += 1;
                next[bumped] += prob * law[d];
            }
        }
        current = std::move(next);
    }
    return current;
}

Pmf convolve_pmfs(const Pmf& a, const Pmf& b) {
    Pmf out;
    for (const auto& [va, pa] : a) {
        for (const auto& [vb, pb] : b) {
            std::vector<std::int64_t> sum = va;
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += vb[i];
            out[sum] += pa * pb;
        }
    }
    return out;
}

double binomial_pmf(std::int64_t m, double p, std::int64_t c) {
    if (c < 0 || c > m) return 0.0;
    if (p <= 0.0) return c == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return c == m ? 1.0 : 0.0;
    double coeff = 1.0;
    for (std::int64_t i = 0; i < c; ++i) coeff = coeff * static_cast<double>(m - i) / static_cast<double>(i + 1);
    return coeff * std::pow(p, static_cast<double>(c)) * std::pow(1.0 - p, static_cast<double>(m - c));
}

// Law of the sequential conditional-binomial split used by the fast
// samplers: `remaining` trials distributed over `cells` with weights
// `weight`, last cell taking the remainder. Accumulates probability into
// `out` on top of `offset`.
void expand_split(const std::vector<int>& cells,
                  const std::vector<double>& weight,
                  std::size_t idx,
                  std::int64_t remaining,
                  double mass_left,
                  double prob,
                  std::vector<std::int64_t>& offset,
                  Pmf& out) {
    if (remaining == 0 || idx == cells.size()) {
        if (remaining == 0) out[offset] += prob;
        return;
    }
    const int cell = cells[idx];
    if (idx + 1 == cells.size()) {
        offset[cell] += remaining;
        out[offset] += prob;
        offset[cell] -= remaining;
        return;
    }
    const double p = std::clamp(weight[cell] / mass_left, 0.0, 1.0);
    for (std::int64_t c = 0; c <= remaining; ++c) {
        const double bp = binomial_pmf(remaining, p, c);
        if (bp <= 0.0) continue;
        offset[cell] += c;
        expand_split(cells, weight, idx + 1, remaining - c, mass_left - weight[cell], prob * bp, offset, out);
        offset[cell] -= c;
    }
}

}  // namespace

double CountDistribution::total_mass() const {
    KahanSum total;
    for (const auto& [vec, prob] : pmf) total.add(prob);
    return total.sum;
}

CountDistribution enumerate_step_pmf(const Configuration& config, ProtocolKind protocol) {
    config.validate();
    check_budget(config);
    if (!is_synchronous(protocol)) throw SpecError("enumerate_step_pmf: synchronous protocols only");

    const auto alpha = fractions(config);
    CountDistribution dist;
    dist.n = config.n;
    dist.k = config.k();

    Pmf acc;
    acc[std::vector<std::int64_t>(config.k(), 0)] = 1.0;
    if (protocol == ProtocolKind::Sync3Majority) {
        acc = convolve_vertices(acc, vertex_law_3majority(alpha), config.n);
    } else {
        for (int j = 0; j < config.k(); ++j) {
            if (config.counts[j] == 0) continue;
            acc = convolve_vertices(acc, vertex_law_2choices(alpha, j), config.counts[j]);
        }
    }
    dist.pmf = std::move(acc);
    return dist;
}

CountDistribution fast_target_pmf(const Configuration& config, ProtocolKind protocol) {
    config.validate();
    check_budget(config);
    if (!is_synchronous(protocol)) throw SpecError("fast_target_pmf: synchronous protocols only");

    CountDistribution dist;
    dist.n = config.n;
    dist.k = config.k();

    std::vector<int> occupied;
    for (int i = 0; i < config.k(); ++i)
        if (config.counts[i] > 0) occupied.push_back(i);

    if (protocol == ProtocolKind::Sync3Majority) {
        const StepKernel kernel = kernel_3majority(config);
        std::vector<std::int64_t> offset(config.k(), 0);
        expand_split(occupied, kernel.dest, 0, config.n, 1.0, 1.0, offset, dist.pmf);
        return dist;
    }

    const StepKernel kernel = kernel_2choices(config);
    Pmf acc;
    acc[std::vector<std::int64_t>(config.k(), 0)] = 1.0;
    for (const int j : occupied) {
        const std::int64_t holders = config.counts[j];
        const double switch_mass = kernel.gamma - kernel.dest_sq[j];
        Pmf class_law;
        std::vector<std::int64_t> offset(config.k(), 0);
        if (switch_mass <= 0.0 || occupied.size() == 1) {
            offset[j] = holders;
            class_law[offset] = 1.0;
        } else {
            std::vector<int> targets;
            for (const int i : occupied)
                if (i != j) targets.push_back(i);
            for (std::int64_t s = 0; s <= holders; ++s) {
                const double bp = binomial_pmf(holders, std::clamp(switch_mass, 0.0, 1.0), s);
                if (bp <= 0.0) continue;
                offset[j] = holders - s;
                expand_split(targets, kernel.dest_sq, 0, s, switch_mass, bp, offset, class_law);
            }
        }
        acc = convolve_pmfs(acc, class_law);
    }
    dist.pmf = std::move(acc);
    return dist;
}

double tv_distance(const CountDistribution& p, const CountDistribution& q) {
    if (p.n != q.n || p.k != q.k)
        throw ShapeMismatch("tv_distance: distributions disagree on (n, k)");
    KahanSum total;
    auto it_p = p.pmf.begin();
    auto it_q = q.pmf.begin();
    while (it_p != p.pmf.end() || it_q != q.pmf.end()) {
        if (it_q == q.pmf.end() || (it_p != p.pmf.end() && it_p->first < it_q->first)) {
            total.add(std::abs(it_p->second));
            ++it_p;
        } else if (it_p == p.pmf.end() || it_q->first < it_p->first) {
            total.add(std::abs(it_q->second));
            ++it_q;
        } else {
            total.add(std::abs(it_p->second - it_q->second));
            ++it_p;
            ++it_q;
        }
    }
    return 0.5 * total.sum;
}

ExactMoments exact_moments(const Configuration& config, ProtocolKind protocol) {
    const CountDistribution dist = enumerate_step_pmf(config, protocol);
    const int k = dist.k;
    const double n = static_cast<double>(dist.n);

    std::vector<KahanSum> first(k);
    std::vector<std::vector<KahanSum>> second(k, std::vector<KahanSum>(k));
    KahanSum gamma;
    for (const auto& [vec, prob] : dist.pmf) {
        for (int i = 0; i < k; ++i) {
            const double ai = static_cast<double>(vec[i]) / n;
            first[i].add(prob * ai);
            gamma.add(prob * ai * ai);
            for (int j = 0; j < k; ++j) second[i][j].add(prob * ai * (static_cast<double>(vec[j]) / n));
        }
    }

    ExactMoments moments;
    moments.e_alpha.resize(k);
    moments.var_alpha.resize(k);
    moments.second_moment.assign(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i) {
        moments.e_alpha[i] = first[i].sum;
        for (int j = 0; j < k; ++j) moments.second_moment[i][j] = second[i][j].sum;
        moments.var_alpha[i] = moments.second_moment[i][i] - moments.e_alpha[i] * moments.e_alpha[i];
    }
    moments.e_gamma = gamma.sum;
    return moments;
}

double ExactMoments::delta_mean(int i, int j) const {
    return e_alpha.at(i) - e_alpha.at(j);
}

double ExactMoments::delta_var(int i, int j) const {
    const double cov = second_moment.at(i).at(j) - e_alpha.at(i) * e_alpha.at(j);
    return var_alpha.at(i) + var_alpha.at(j) - 2.0 * cov;
}

double exact_mgf_alpha_3maj(const Configuration& config, int opinion, double lambda) {
    config.validate();
    if (opinion < 0 || opinion >= config.k()) throw SpecError("exact_mgf_alpha_3maj: opinion index out of range");
    const StepKernel kernel = kernel_3majority(config);
    const double f = kernel.dest[opinion];
    if (f <= 0.0 || f >= 1.0) return 1.0;  // degenerate coordinate

    const double n = static_cast<double>(config.n);
    const double scaled = lambda / n;
    if (std::abs(scaled) > 700.0)
        throw MgfOverflow("exact_mgf_alpha_3maj: lambda/n = " + std::to_string(scaled) + " exceeds the floating range");
    const double log_value = n * (std::log1p(f * std::expm1(scaled)) - scaled * f);
    if (log_value > 709.0)
        throw MgfOverflow("exact_mgf_alpha_3maj: result exceeds the floating range");
    return std::exp(log_value);
}

}  // namespace odlab
