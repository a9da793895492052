#include "ellfrob/rootsys.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace ellfrob {

CartanType parse_type(const std::string& s, std::optional<int> rank)
{
    if (s.empty()) throw std::invalid_argument("empty type label");
    CartanType t;
    t.letter = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    std::string digits = s.substr(1);
    if (!digits.empty()) {
        for (char c : digits)
            if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("bad type label '" + s + "'");
        t.rank = std::stoi(digits);
        if (rank && *rank != t.rank) throw std::invalid_argument("rank conflicts with type label '" + s + "'");
    } else if (rank) {
        t.rank = *rank;
    } else {
        throw std::invalid_argument("type '" + s + "' needs a rank");
    }
    if (!supported(t)) throw std::invalid_argument("unsupported type " + t.label());
    return t;
}

bool supported(const CartanType& t)
{
    switch (t.letter) {
    case 'A': return t.rank >= 1 && t.rank <= 12;
    case 'B': return t.rank >= 2 && t.rank <= 12;
    case 'C': return t.rank >= 2 && t.rank <= 12;
    case 'D': return t.rank >= 4 && t.rank <= 12;
    case 'E': return t.rank >= 6 && t.rank <= 8;
    case 'F': return t.rank == 4;
    case 'G': return t.rank == 2;
    default: return false;
    }
}

QMatrix finite_gram(const CartanType& t)
{
    if (!supported(t)) throw std::invalid_argument("unsupported type " + t.label());
    size_t l = static_cast<size_t>(t.rank);
    QMatrix b(l, l, Rational(0));
    auto edge = [&](size_t i, size_t j, Rational v) { b(i, j) = b(j, i) = v; };
    Rational half = make_rational(1, 2);
    switch (t.letter) {
    case 'A':
        for (size_t i = 0; i < l; ++i) b(i, i) = 2;
        for (size_t i = 0; i + 1 < l; ++i) edge(i, i + 1, -1);
        break;
    case 'B':  // α_l short
        for (size_t i = 0; i < l; ++i) b(i, i) = 2;
        b(l - 1, l - 1) = 1;
        for (size_t i = 0; i + 1 < l; ++i) edge(i, i + 1, -1);
        break;
    case 'C':  // α_l long
        for (size_t i = 0; i < l; ++i) b(i, i) = 1;
        b(l - 1, l - 1) = 2;
        for (size_t i = 0; i + 2 < l; ++i) edge(i, i + 1, -half);
        edge(l - 2, l - 1, -1);
        break;
    case 'D':
        for (size_t i = 0; i < l; ++i) b(i, i) = 2;
        for (size_t i = 0; i + 2 < l; ++i) edge(i, i + 1, -1);
        edge(l - 3, l - 1, -1);
        break;
    case 'E':
        for (size_t i = 0; i < l; ++i) b(i, i) = 2;
        edge(0, 2, -1);
        edge(2, 3, -1);
        edge(3, 4, -1);
        edge(1, 3, -1);
        for (size_t i = 4; i + 1 < l; ++i) edge(i, i + 1, -1);
        break;
    case 'F':
        b(0, 0) = b(1, 1) = 2;
        b(2, 2) = b(3, 3) = 1;
        edge(0, 1, -1);
        edge(1, 2, -1);
        edge(2, 3, -half);
        break;
    case 'G':  // α_1 short
        b(0, 0) = make_rational(2, 3);
        b(1, 1) = 2;
        edge(0, 1, -1);
        break;
    }
    return b;
}

namespace {

// ⟨β, α_i^∨⟩ for β in simple-root coordinates
Rational pairing(const QMatrix& g, const IVec& beta, size_t i)
{
    Rational s = 0;
    for (size_t j = 0; j < beta.size(); ++j) s += beta[j] * g(j, i);
    return 2 * s / g(i, i);
}

std::vector<IVec> generate_roots(const QMatrix& g)
{
    size_t l = g.rows();
    std::set<IVec> seen;
    std::deque<IVec> queue;
    for (size_t i = 0; i < l; ++i) {
        IVec e(l, 0);
        e[i] = 1;
        seen.insert(e);
        queue.push_back(e);
        e[i] = -1;
        seen.insert(e);
        queue.push_back(e);
    }
    while (!queue.empty()) {
        IVec b = queue.front();
        queue.pop_front();
        for (size_t i = 0; i < l; ++i) {
            Rational p = pairing(g, b, i);
            if (p.get_den() != 1) throw std::invalid_argument("root closure produced a non-integral pairing");
            IVec c = b;
            c[i] -= p.get_num().get_si();
            if (seen.insert(c).second) {
                if (seen.size() > 5000) throw std::invalid_argument("root closure does not terminate");
                queue.push_back(c);
            }
        }
    }
    std::vector<IVec> roots(seen.begin(), seen.end());
    std::sort(roots.begin(), roots.end(), [](const IVec& x, const IVec& y) {
        long hx = std::accumulate(x.begin(), x.end(), 0L), hy = std::accumulate(y.begin(), y.end(), 0L);
        if (hx != hy) return hx < hy;
        return x < y;
    });
    return roots;
}

Rational rational_gcd(const std::vector<Rational>& xs)
{
    mpz_class num = 0, den = 1;
    for (const auto& x : xs) {
        if (sgn(x) == 0) continue;
        mpz_class a = abs(x.get_num()), g;
        mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), a.get_mpz_t());
        num = g;
        mpz_lcm(g.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
        den = g;
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// least positive c with c·q(x,x) ∈ 2ℤ on the lattice spanned by the given Gram
Rational evenness_constant(const QMatrix& g)
{
    std::vector<Rational> s;
    for (size_t i = 0; i < g.rows(); ++i) {
        s.push_back(g(i, i) / 2);
        for (size_t j = 0; j < i; ++j) s.push_back(g(i, j));
    }
    return 1 / rational_gcd(s);
}

void finalize(MarkedEllipticRootSystem& sys)
{
    size_t l = static_cast<size_t>(sys.l);
    sys.n = sys.l + 1;
    sys.gram = QMatrix(l + 3, l + 3, Rational(0));
    for (size_t i = 0; i < l; ++i)
        for (size_t j = 0; j < l; ++j) sys.gram(i, j) = sys.gramFin(i, j);
    sys.gram(l + 1, l + 2) = sys.gram(l + 2, l + 1) = 1;

    // highest root: largest height among positive roots
    sys.highestRoot = sys.finiteRoots.back();
    Rational th2 = 0;
    for (size_t i = 0; i < l; ++i)
        for (size_t j = 0; j < l; ++j) th2 += sys.highestRoot[i] * sys.gramFin(i, j) * sys.highestRoot[j];
    sys.marks.assign(1, 1);
    for (size_t i = 0; i < l; ++i) {
        Rational m = sys.highestRoot[i] * sys.gramFin(i, i) / th2;
        sys.marks.push_back(m.get_den() == 1 ? static_cast<int>(m.get_num().get_si()) : 0);
    }
    QMatrix cog(l, l);
    for (size_t i = 0; i < l; ++i)
        for (size_t j = 0; j < l; ++j) cog(i, j) = 4 * sys.gramFin(i, j) / (sys.gramFin(i, i) * sys.gramFin(j, j));
    sys.c0 = evenness_constant(cog);
    sys.c0RootLattice = evenness_constant(sys.gramFin);
}

}  // namespace

RVec MarkedEllipticRootSystem::basis_vector(size_t i) const
{
    RVec v(dim(), Rational(0));
    v.at(i) = 1;
    return v;
}

RVec MarkedEllipticRootSystem::embed(const IVec& fin, long aShift, long deltaShift) const
{
    RVec v(dim(), Rational(0));
    for (size_t i = 0; i < fin.size(); ++i) v[i] = fin[i];
    v[ia()] = aShift;
    v[idelta()] = deltaShift;
    return v;
}

long MarkedEllipticRootSystem::find_root(const IVec& fin) const
{
    auto it = std::find(finiteRoots.begin(), finiteRoots.end(), fin);
    return it == finiteRoots.end() ? -1 : static_cast<long>(it - finiteRoots.begin());
}

std::vector<size_t> MarkedEllipticRootSystem::positive_roots() const
{
    std::vector<size_t> r;
    for (size_t i = 0; i < finiteRoots.size(); ++i)
        if (std::all_of(finiteRoots[i].begin(), finiteRoots[i].end(), [](long x) { return x >= 0; })) r.push_back(i);
    return r;
}

MarkedEllipticRootSystem build(const CartanType& t)
{
    MarkedEllipticRootSystem sys;
    sys.type = t;
    sys.l = t.rank;
    sys.gramFin = finite_gram(t);
    sys.finiteRoots = generate_roots(sys.gramFin);
    finalize(sys);
    return sys;
}

MarkedEllipticRootSystem build_from_gram(const QMatrix& gramFin, const std::string& label)
{
    MarkedEllipticRootSystem sys;
    sys.type = CartanType{label.empty() ? '?' : label[0], static_cast<int>(gramFin.rows())};
    sys.l = static_cast<int>(gramFin.rows());
    sys.gramFin = gramFin;
    sys.finiteRoots = generate_roots(gramFin);
    finalize(sys);
    return sys;
}

LinearAuto reflection(const MarkedEllipticRootSystem& sys, const RVec& root)
{
    Rational n2 = sys.form(root, root);
    if (sgn(n2) == 0) throw std::invalid_argument("reflection in an isotropic vector");
    size_t d = sys.dim();
    RVec gr(d, Rational(0));  // rowᵀ = rootᵀ·Ĩ
    for (size_t j = 0; j < d; ++j)
        for (size_t k = 0; k < d; ++k) gr[j] += root[k] * sys.gram(k, j);
    QMatrix m = QMatrix::identity(d);
    for (size_t i = 0; i < d; ++i) {
        if (sgn(root[i]) == 0) continue;
        for (size_t j = 0; j < d; ++j) m(i, j) -= 2 * root[i] * gr[j] / n2;
    }
    return LinearAuto(std::move(m), sys.gram, sys.l);
}

AxiomReport axioms_check(const MarkedEllipticRootSystem& sys)
{
    AxiomReport rep;
    size_t l = static_cast<size_t>(sys.l);

    // (i) Q(R) is a full lattice in F, meeting rad I in ℤa ⊕ ℤδ
    {
        std::vector<RVec> gens;
        for (const auto& r : sys.finiteRoots) gens.push_back(sys.embed(r));
        gens.push_back(sys.basis_vector(sys.ia()));
        gens.push_back(sys.basis_vector(sys.idelta()));
        rep.fullLattice = span_rank(gens) == l + 2;
        for (size_t i = 0; i < l; ++i) {
            IVec e(l, 0);
            e[i] = 1;
            if (sys.find_root(e) < 0) rep.fullLattice = false;
        }
        if (!rep.fullLattice) rep.violations.push_back("(i) Q(R) is not a full lattice of F");
    }
    // (ii) Ĩ(α, β^∨) ∈ ℤ and roots non-isotropic
    {
        rep.integrality = true;
        std::vector<RVec> emb;
        for (const auto& r : sys.finiteRoots) emb.push_back(sys.embed(r));
        for (const auto& b : emb) {
            Rational bb = sys.form(b, b);
            if (sgn(bb) == 0) {
                rep.integrality = false;
                continue;
            }
            for (const auto& a : emb) {
                Rational p = 2 * sys.form(a, b) / bb;
                if (p.get_den() != 1) rep.integrality = false;
            }
        }
        if (!rep.integrality) rep.violations.push_back("(ii) Ĩ(α,β^∨) not integral");
    }
    // (iii) every reflection w_{α+ma+kδ} maps R into R; translates m,k ∈ {0,1} generate the rest
    {
        rep.reflectionClosed = true;
        for (size_t i = 0; i < sys.finiteRoots.size() && rep.reflectionClosed; ++i) {
            for (long m : {0L, 1L})
                for (long k : {0L, 1L}) {
                    RVec a = sys.embed(sys.finiteRoots[i], m, k);
                    if (sgn(sys.form(a, a)) == 0) {
                        rep.reflectionClosed = false;
                        continue;
                    }
                    LinearAuto w = reflection(sys, a);
                    for (const auto& b : sys.finiteRoots) {
                        RVec img = w(sys.embed(b));
                        IVec fin(l);
                        bool integral = true;
                        for (size_t j = 0; j < l; ++j) {
                            if (img[j].get_den() != 1) integral = false;
                            fin[j] = img[j].get_num().get_si();
                        }
                        if (!integral || img[sys.ia()].get_den() != 1 || img[sys.idelta()].get_den() != 1 ||
                            sgn(img[sys.iLambda()]) != 0 || sys.find_root(fin) < 0)
                            rep.reflectionClosed = false;
                    }
                }
        }
        if (!rep.reflectionClosed) rep.violations.push_back("(iii) R not stable under its reflections");
    }
    // (iv) connected Dynkin graph
    {
        std::vector<bool> seen(l, false);
        std::vector<size_t> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            size_t u = stack.back();
            stack.pop_back();
            for (size_t v = 0; v < l; ++v)
                if (!seen[v] && sgn(sys.gramFin(u, v)) != 0) {
                    seen[v] = true;
                    stack.push_back(v);
                }
        }
        rep.irreducible = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
        if (!rep.irreducible) rep.violations.push_back("(iv) Dynkin graph is disconnected");
    }
    // radical of Ĩ is exactly ℝa; Λ0 pairing
    {
        auto ker = kernel(sys.gram);
        rep.radicalIsA = ker.size() == 1 && span_rank({ker[0], sys.basis_vector(sys.ia())}) == 1;
        if (!rep.radicalIsA) rep.violations.push_back("rad Ĩ is not ℝa");
        RVec L = sys.basis_vector(sys.iLambda()), d = sys.basis_vector(sys.idelta());
        rep.lambdaPairing = sys.form(L, d) == 1 && sgn(sys.form(L, L)) == 0;
        if (!rep.lambdaPairing) rep.violations.push_back("Ĩ(Λ0,δ) ≠ 1 or Ĩ(Λ0,Λ0) ≠ 0");
        rep.signature = signature(sys.gram);
        if (!(rep.signature == Signature{sys.n, 1, 1})) rep.violations.push_back("signature is not (n,1,1)");
    }
    return rep;
}

Splitting make_splitting(const MarkedEllipticRootSystem& sys, const std::vector<RVec>& L)
{
    std::vector<RVec> cols = L;
    cols.push_back(sys.basis_vector(sys.ia()));
    cols.push_back(sys.basis_vector(sys.idelta()));
    if (cols.size() != sys.dim()) throw std::invalid_argument("subspace does not split rad I (wrong dimension)");
    auto inv = inverse(QMatrix::from_columns(cols));
    if (!inv) throw std::invalid_argument("subspace does not split rad I");
    return Splitting{L, *inv};
}

RVec Splitting::lcoords(const RVec& x) const
{
    RVec c = inv * x;
    c.resize(L.size());
    return c;
}

std::pair<Rational, Rational> Splitting::rad(const RVec& x) const
{
    RVec c = inv * x;
    return {c[L.size()], c[L.size() + 1]};
}

bool root_in_subspace(const MarkedEllipticRootSystem& sys, const std::vector<RVec>& L)
{
    Splitting sp = make_splitting(sys, L);
    for (const auto& r : sys.finiteRoots) {
        auto [u, v] = sp.rad(sys.embed(r));
        if (u.get_den() == 1 && v.get_den() == 1) return true;
    }
    return false;
}

std::string serialize(const MarkedEllipticRootSystem& sys)
{
    std::ostringstream os;
    os << "type " << sys.type.letter << "\n";
    os << "rank " << sys.l << "\n";
    os << "gram " << sys.dim() << "\n" << to_string(sys.gram);
    os << "roots " << sys.finiteRoots.size() << "\n";
    for (const auto& r : sys.finiteRoots) {
        for (size_t j = 0; j < r.size(); ++j) os << (j ? " " : "") << r[j];
        os << "\n";
    }
    return os.str();
}

MarkedEllipticRootSystem deserialize(const std::string& text)
{
    std::istringstream is(text);
    std::string key;
    char letter = 0;
    int rank = 0;
    size_t dim = 0, nroots = 0;
    is >> key >> letter;
    if (key != "type") throw std::invalid_argument("expected 'type'");
    is >> key >> rank;
    if (key != "rank") throw std::invalid_argument("expected 'rank'");
    is >> key >> dim;
    if (key != "gram" || dim != static_cast<size_t>(rank) + 3) throw std::invalid_argument("bad gram header");
    QMatrix g(dim, dim);
    for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j) {
            std::string tok;
            is >> tok;
            g(i, j) = parse_rational(tok);
        }
    is >> key >> nroots;
    if (key != "roots") throw std::invalid_argument("expected 'roots'");
    MarkedEllipticRootSystem sys;
    sys.type = CartanType{letter, rank};
    sys.l = rank;
    sys.gramFin = g.block(0, 0, rank, rank);
    for (size_t k = 0; k < nroots; ++k) {
        IVec r(rank);
        for (auto& x : r) is >> x;
        sys.finiteRoots.push_back(r);
    }
    if (!is) throw std::invalid_argument("truncated root system file");
    finalize(sys);
    // keep the stored Gram verbatim (it may differ from the canonical one)
    sys.gram = g;
    return sys;
}

}  // namespace ellfrob
