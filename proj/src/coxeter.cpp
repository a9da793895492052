#include "ellfrob/coxeter.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace ellfrob {

std::vector<DiagramVertex> elliptic_diagram(const MarkedEllipticRootSystem& sys)
{
    std::vector<DiagramVertex> v;
    IVec theta = sys.highestRoot;
    IVec negTheta(theta.size());
    std::transform(theta.begin(), theta.end(), negTheta.begin(), [](long x) { return -x; });
    v.push_back({"0", sys.embed(negTheta, 0, 1), sys.marks[0]});
    for (int i = 0; i < sys.l; ++i) {
        IVec e(sys.l, 0);
        e[i] = 1;
        v.push_back({std::to_string(i + 1), sys.embed(e), sys.marks[i + 1]});
    }
    int mx = *std::max_element(sys.marks.begin(), sys.marks.end());
    size_t affine = v.size();
    for (size_t i = 0; i < affine; ++i) {
        if (v[i].mark != mx) continue;
        RVec w = v[i].vec;
        w[sys.ia()] += 1;
        v.push_back({v[i].name + "*", w, mx});
    }
    return v;
}

LinearAuto coxeter_product(const MarkedEllipticRootSystem& sys, const std::vector<DiagramVertex>& word)
{
    QMatrix c = QMatrix::identity(sys.dim());
    for (const auto& v : word) c = c * reflection(sys, v.vec).matrix();
    return LinearAuto(std::move(c), sys.gram, sys.l);
}

int order_on_F(const QMatrix& cF, int limit)
{
    QMatrix id = QMatrix::identity(cF.rows());
    QMatrix p = cF;
    for (int k = 1; k <= limit; ++k) {
        if (p == id) return k;
        p = p * cF;
    }
    return 0;
}

EigenStructureReport eigen_structure_check(const MarkedEllipticRootSystem& sys, const QMatrix& cF, int dn)
{
    EigenStructureReport rep;
    rep.semisimpleOfOrder = order_on_F(cF, dn) == dn;
    if (!rep.semisimpleOfOrder) return rep;
    CMatrix c = embed(cF, dn);
    int total = 0;
    for (int k = 0; k < dn; ++k) {
        int m = static_cast<int>(eigenspace(c, Cyclotomic::zeta_power(dn, k)).size());
        rep.eigenMultiplicity.push_back(m);
        total += m;
    }
    // c^{dn} = id forces diagonalizability; the eigenspaces must fill F
    if (total != static_cast<int>(cF.rows()) || rep.eigenMultiplicity[0] < 1) {
        rep.semisimpleOfOrder = false;
        return rep;
    }
    for (int k = 1; k < dn; ++k)
        for (int j = 0; j < rep.eigenMultiplicity[k]; ++j) rep.degrees.push_back(k);
    for (int j = 1; j < rep.eigenMultiplicity[0]; ++j) rep.degrees.push_back(dn);
    std::sort(rep.degrees.begin(), rep.degrees.end());
    if (static_cast<int>(rep.degrees.size()) != sys.n) rep.semisimpleOfOrder = false;
    return rep;
}

namespace {

QMatrix restrict_to_F(const MarkedEllipticRootSystem& sys, const QMatrix& c)
{
    size_t f = sys.dim() - 1;
    return c.block(0, 0, f, f);
}

RVec pad(const RVec& v, size_t n)
{
    RVec r = v;
    r.resize(n, Rational(0));
    return r;
}

// basis of the image of (c - id) and of its kernel on F, embedded in F̃
void eigen_split(const MarkedEllipticRootSystem& sys, CoxeterData& d)
{
    QMatrix m = d.cF - QMatrix::identity(d.cF.rows());
    d.Feq1.clear();
    d.Fne1.clear();
    for (auto& v : kernel(m)) d.Feq1.push_back(pad(v, sys.dim()));
    QMatrix mt = m.transpose();
    rref(mt);
    for (size_t i = 0; i < mt.rows(); ++i) {
        RVec r = mt.row(i);
        if (!is_zero(r)) d.Fne1.push_back(pad(r, sys.dim()));
    }
}

}  // namespace

bool root_avoidance_check(const MarkedEllipticRootSystem& sys, const CoxeterData& data)
{
    std::vector<RVec> cols = data.Fne1;
    cols.insert(cols.end(), data.Feq1.begin(), data.Feq1.end());
    size_t f = sys.dim() - 1;
    std::vector<RVec> colsF;
    for (auto& c : cols) colsF.push_back(RVec(c.begin(), c.begin() + static_cast<long>(f)));
    auto inv = inverse(QMatrix::from_columns(colsF));
    if (!inv) return false;
    for (const auto& r : sys.finiteRoots) {
        RVec full = sys.embed(r);
        RVec x(full.begin(), full.begin() + static_cast<long>(f));
        RVec coef = *inv * x;
        // r-part = Σ coef_j Feq1_j; test whether it lies in ℤa + ℤδ
        RVec rp(f, Rational(0));
        for (size_t j = 0; j < data.Feq1.size(); ++j)
            for (size_t i = 0; i < f; ++i) rp[i] += coef[data.Fne1.size() + j] * data.Feq1[j][i];
        bool radial = true;
        for (int i = 0; i < sys.l; ++i)
            if (sgn(rp[i]) != 0) radial = false;
        if (radial && rp[sys.ia()].get_den() == 1 && rp[sys.idelta()].get_den() == 1) return false;
    }
    return true;
}

bool lambda_shift_check(const MarkedEllipticRootSystem& sys, const CoxeterData& data)
{
    if (data.Fne1.empty() && data.dn > 1) return false;
    const QMatrix& c = data.c.matrix();
    RVec delta = sys.basis_vector(sys.idelta());
    for (size_t i = 0; i < sys.dim(); ++i) {
        RVec xi = sys.basis_vector(i);
        RVec v = c * xi - xi;
        v[sys.ia()] += sys.c0 * sys.form(xi, delta) / data.dn;
        if (sgn(v[sys.iLambda()]) != 0) return false;
        if (is_zero(v)) continue;
        std::vector<RVec> span = data.Fne1;
        size_t r0 = span_rank(span);
        span.push_back(v);
        if (span_rank(span) != r0) return false;
    }
    // c̃^{dn} is a generator of K_ℤ: identity on F, Λ0 ↦ Λ0 ± c0·a
    QMatrix p = power(c, static_cast<unsigned>(data.dn));
    RVec L = sys.basis_vector(sys.iLambda());
    RVec img = p * L;
    RVec expect = L;
    Rational s = img[sys.ia()];
    expect[sys.ia()] = s;
    if (img != expect) return false;
    if (abs(s) != sys.c0) return false;
    for (size_t j = 0; j + 1 < sys.dim(); ++j)
        for (size_t i = 0; i < sys.dim(); ++i)
            if (p(i, j) != (i == j ? 1 : 0)) return false;
    return true;
}

void jordan(const MarkedEllipticRootSystem& sys, CoxeterData& d)
{
    const QMatrix& c = d.c.matrix();
    size_t dim = sys.dim();
    RVec L = sys.basis_vector(sys.iLambda());
    // λ = Λ0 + f with f ∈ F^{≠1}: (c - 1) f = -(c̃ - 1)Λ0 - (c0/dn)·a
    RVec rhs = L - c * L;
    rhs[sys.ia()] -= sys.c0 / d.dn;
    QMatrix A(dim, d.Fne1.size());
    for (size_t j = 0; j < d.Fne1.size(); ++j) {
        RVec col = c * d.Fne1[j] - d.Fne1[j];
        for (size_t i = 0; i < dim; ++i) A(i, j) = col[i];
    }
    RVec f(dim, Rational(0));
    if (!d.Fne1.empty()) {
        auto x = solve(A, rhs);
        if (!x) throw std::runtime_error("Jordan decomposition: λ-system unsolvable (Λ0 shift condition fails)");
        for (size_t j = 0; j < d.Fne1.size(); ++j) f = f + (*x)[j] * d.Fne1[j];
    } else if (!is_zero(rhs)) {
        throw std::runtime_error("Jordan decomposition: λ-system unsolvable (Λ0 shift condition fails)");
    }
    d.lambda = L + f;

    std::vector<RVec> basis = d.Fne1, image;
    for (const auto& v : d.Fne1) image.push_back(c * v);
    for (const auto& v : d.Feq1) {
        basis.push_back(v);
        image.push_back(v);
    }
    basis.push_back(d.lambda);
    image.push_back(d.lambda);
    auto binv = inverse(QMatrix::from_columns(basis));
    if (!binv) throw std::runtime_error("Jordan decomposition: F^{≠1} ⊕ F^{=1} ⊕ ℝλ is not F̃");
    QMatrix ss = QMatrix::from_columns(image) * *binv;
    auto ssinv = inverse(ss);
    QMatrix unip = *ssinv * c;
    d.ss = LinearAuto(ss, sys.gram, sys.l);
    d.unip = LinearAuto(unip, sys.gram, sys.l);
    RVec u = unip * L;
    d.unipShift = u[sys.ia()];
    // ζ = exp(2πi s), s = k/dn
    Rational k = d.unipShift * d.dn;
    if (k.get_den() != 1) throw std::runtime_error("Jordan decomposition: unipotent shift not in (1/dn)ℤ");
    long e = k.get_num().get_si() % d.dn;
    d.zetaExponent = static_cast<int>((e + d.dn) % d.dn);
}

namespace {

// bipartite default: colour-0 ordinary vertices, then each maximal vertex and its translate, then colour 1
std::vector<size_t> default_order(const MarkedEllipticRootSystem& sys, const std::vector<DiagramVertex>& v)
{
    size_t affine = static_cast<size_t>(sys.l) + 1;
    std::vector<int> colour(affine, -1);
    colour[0] = 0;
    std::vector<size_t> stack{0};
    while (!stack.empty()) {
        size_t u = stack.back();
        stack.pop_back();
        for (size_t w = 0; w < affine; ++w)
            if (w != u && colour[w] < 0 && sgn(sys.form(v[u].vec, v[w].vec)) != 0) {
                colour[w] = 1 - colour[u];
                stack.push_back(w);
            }
    }
    int mx = *std::max_element(sys.marks.begin(), sys.marks.end());
    std::vector<size_t> order;
    for (size_t i = 0; i < affine; ++i)
        if (v[i].mark != mx && colour[i] == 0) order.push_back(i);
    for (size_t i = 0; i < affine; ++i) {
        if (v[i].mark != mx) continue;
        order.push_back(i);
        for (size_t j = affine; j < v.size(); ++j)
            if (v[j].name == v[i].name + "*") order.push_back(j);
    }
    for (size_t i = 0; i < affine; ++i)
        if (v[i].mark != mx && colour[i] != 0) order.push_back(i);
    return order;
}

// builds data for a word; returns false if any check fails
bool try_word(const MarkedEllipticRootSystem& sys, const std::vector<DiagramVertex>& verts,
              const std::vector<size_t>& order, CoxeterData& out)
{
    std::vector<DiagramVertex> word;
    for (size_t i : order) word.push_back(verts[i]);
    CoxeterData d;
    d.c = coxeter_product(sys, word);
    if (!d.c.in_group()) return false;
    for (auto& w : word) d.ordering.push_back(w.name);
    d.dn = *std::max_element(sys.marks.begin(), sys.marks.end());
    d.cF = restrict_to_F(sys, d.c.matrix());
    auto ra = eigen_structure_check(sys, d.cF, d.dn);
    if (!ra.ok()) return false;
    d.degrees = ra.degrees;
    d.codim = static_cast<int>(std::count(d.degrees.begin(), d.degrees.end(), d.dn));
    eigen_split(sys, d);
    if (!root_avoidance_check(sys, d) || !lambda_shift_check(sys, d)) return false;
    QMatrix p = power(d.c.matrix(), static_cast<unsigned>(d.dn));
    d.kzShift = (p * sys.basis_vector(sys.iLambda()))[sys.ia()];
    jordan(sys, d);
    out = std::move(d);
    return true;
}

}  // namespace

CoxeterData hyperbolic_coxeter(const MarkedEllipticRootSystem& sys)
{
    auto verts = elliptic_diagram(sys);
    CoxeterData d;
    if (try_word(sys, verts, default_order(sys, verts), d)) return d;
    std::vector<size_t> perm(verts.size());
    std::iota(perm.begin(), perm.end(), 0);
    long budget = 200000;
    do {
        if (try_word(sys, verts, perm, d)) return d;
    } while (--budget > 0 && std::next_permutation(perm.begin(), perm.end()));
    throw std::runtime_error("no vertex ordering of the elliptic diagram passes the eigenvalue, root-avoidance and Λ0-shift checks for " +
                             sys.type.label());
}

CoxeterData coxeter_from_ordering(const MarkedEllipticRootSystem& sys, const std::vector<std::string>& names,
                                  bool requireChecks)
{
    auto verts = elliptic_diagram(sys);
    std::vector<size_t> order;
    for (const auto& nm : names) {
        auto it = std::find_if(verts.begin(), verts.end(), [&](const DiagramVertex& v) { return v.name == nm; });
        if (it == verts.end()) throw std::invalid_argument("unknown diagram vertex '" + nm + "'");
        order.push_back(static_cast<size_t>(it - verts.begin()));
    }
    CoxeterData d;
    if (try_word(sys, verts, order, d)) return d;
    if (requireChecks) throw std::runtime_error("ordering fails the hyperbolic Coxeter checks");
    std::vector<DiagramVertex> word;
    for (size_t i : order) word.push_back(verts[i]);
    d.c = coxeter_product(sys, word);
    d.ordering = names;
    d.dn = *std::max_element(sys.marks.begin(), sys.marks.end());
    d.cF = restrict_to_F(sys, d.c.matrix());
    eigen_split(sys, d);
    return d;
}

int fixed_locus_dim(const CoxeterData& data)
{
    int dim = static_cast<int>(data.Feq1.size()) - 1;
    if (dim != data.codim) throw std::logic_error("dim F^{=1} - 1 differs from the codimension");
    return dim;
}

MarkedEllipticRootSystem with_degrees(MarkedEllipticRootSystem sys, const CoxeterData& data)
{
    sys.degrees = data.degrees;
    return sys;
}

}  // namespace ellfrob
