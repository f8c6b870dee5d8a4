#include "fbl/homs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbl {

EvalHom::EvalHom(std::vector<GeneratorId> generators, std::vector<EvalTarget> targets, std::string codomain)
    : generators_(std::move(generators)), targets_(std::move(targets)), codomain_(std::move(codomain)) {
    for (const auto& t : targets_) {
        if (!(t.weight >= 0.0)) throw std::invalid_argument("evaluation weight must be nonnegative");
        if (t.point.size() != generators_.size()) throw std::invalid_argument("evaluation point has wrong dimension");
        for (double x : t.point)
            if (!(x >= -1.0 && x <= 1.0)) throw std::invalid_argument("evaluation point lies outside the cube");
    }
}

std::vector<double> apply_hom(const EvalHom& h, const LatticeExpr& e) {
    for (const auto& g : support(e))
        if (std::find(h.generators().begin(), h.generators().end(), g) == h.generators().end())
            throw std::invalid_argument("generator '" + g + "' is outside the homomorphism's domain");
    CompiledExpr c(e, h.generators());
    std::vector<double> out;
    out.reserve(h.rank());
    for (const auto& t : h.targets()) out.push_back(t.weight * c(t.point));
    return out;
}

GeneratorId subset_generator(const std::vector<int>& subset) {
    if (subset.empty()) throw std::invalid_argument("empty subset has no generator");
    std::string name = "s";
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i) name += '_';
        name += std::to_string(subset[i]);
    }
    return name;
}

std::size_t subset_index(const std::vector<int>& subset) {
    if (subset.empty()) throw std::invalid_argument("empty subset is not in L_N");
    std::size_t mask = 0;
    for (int n : subset) {
        if (n < 1 || n > 62) throw std::invalid_argument("subset element out of range");
        mask |= std::size_t{1} << (n - 1);
    }
    return mask - 1;
}

PhiInstance build_phi(int N) {
    if (N < 1 || N > kMaxPhiN)
        throw std::invalid_argument("truncation level must lie in [1, " + std::to_string(kMaxPhiN) + "]");
    const std::size_t count = (std::size_t{1} << N) - 1;
    std::vector<std::vector<int>> subsets;
    std::vector<GeneratorId> generators;
    subsets.reserve(count);
    for (std::size_t mask = 1; mask <= count; ++mask) {
        std::vector<int> s;
        for (int n = 1; n <= N; ++n)
            if (mask & (std::size_t{1} << (n - 1))) s.push_back(n);
        generators.push_back(subset_generator(s));
        subsets.push_back(std::move(s));
    }
    std::vector<std::vector<double>> chi(static_cast<std::size_t>(N), std::vector<double>(count, 0.0));
    std::vector<EvalTarget> targets;
    for (int n = 1; n <= N; ++n) {
        for (std::size_t a = 0; a < count; ++a)
            if ((a + 1) & (std::size_t{1} << (n - 1))) chi[static_cast<std::size_t>(n - 1)][a] = 1.0;
        targets.push_back(EvalTarget{1.0, chi[static_cast<std::size_t>(n - 1)]});
    }
    EvalHom hom(generators, std::move(targets), "c0-truncation(" + std::to_string(N) + ")");
    return PhiInstance{N, std::move(subsets), std::move(generators), std::move(chi), std::move(hom)};
}

namespace {

void compare(HomLawReport& rep, const char* law, std::size_t pair, const std::vector<double>& got,
             const std::vector<double>& want) {
    for (std::size_t j = 0; j < got.size(); ++j) {
        ++rep.checks;
        const double r = std::fabs(got[j] - want[j]);
        rep.worst_residual = std::max(rep.worst_residual, r);
        if (r > 1e-12 * std::max(1.0, std::fabs(want[j])))
            rep.failures.push_back(std::string(law) + " pair " + std::to_string(pair) + " component " +
                                   std::to_string(j) + ": residual " + std::to_string(r));
    }
}

}  // namespace

HomLawReport check_hom_laws(const EvalHom& h, const std::vector<std::pair<LatticeExpr, LatticeExpr>>& pairs) {
    HomLawReport rep;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [e, g] = pairs[i];
        const auto he = apply_hom(h, e), hg = apply_hom(h, g);
        std::vector<double> join(he.size()), meet(he.size()), sum(he.size());
        for (std::size_t j = 0; j < he.size(); ++j) {
            join[j] = std::max(he[j], hg[j]);
            meet[j] = std::min(he[j], hg[j]);
            sum[j] = he[j] + hg[j];
        }
        compare(rep, "join", i, apply_hom(h, LatticeExpr::join(e, g)), join);
        compare(rep, "meet", i, apply_hom(h, LatticeExpr::meet(e, g)), meet);
        compare(rep, "sum", i, apply_hom(h, e + g), sum);
        for (double l : {-1.5, 0.25, 3.0}) {
            std::vector<double> scaled(he.size());
            for (std::size_t j = 0; j < he.size(); ++j) scaled[j] = l * he[j];
            compare(rep, "scale", i, apply_hom(h, LatticeExpr::scale(l, e)), scaled);
        }
    }
    return rep;
}

}  // namespace fbl
