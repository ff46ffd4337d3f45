// SPDX-License-Identifier: Apache-2.0

#include "dstm/stbc.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dstm/errors.hpp"

namespace dstm {

namespace {

ComplexMat mat2(cplx a, cplx b, cplx c, cplx d) {
    ComplexMat m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

DispersionSet alamouti_set() {
    // Codeword [[c1, -c2*], [c2, c1*]]; A_1 = I by this choice.
    DispersionSet set;
    set.kind = CodeKind::ostbc;
    set.n_t = 2;
    set.t_len = 2;
    set.k = 2;
    set.gram_scale = 1.0;
    set.a_mats = {mat2(1, 0, 0, 1), mat2(0, -1, 1, 0)};
    set.b_mats = {mat2(1, 0, 0, -1), mat2(0, 1, 1, 0)};
    return set;
}

DispersionSet ostbc_rate34_4tx() {
    // Square rate-3/4 design
    //   [[ c1,   c2,  c3, 0  ],
    //    [-c2*,  c1*, 0,  c3 ],
    //    [-c3*,   0,   c1*,-c2],
    //    [ 0,   -c3*, c2*, c1]]
    // pinned only through the amicability conditions plus unitarity.
    DispersionSet set;
    set.kind = CodeKind::ostbc;
    set.n_t = 4;
    set.t_len = 4;
    set.k = 3;
    set.gram_scale = 1.0;

    ComplexMat a1 = ComplexMat::Identity(4, 4);
    ComplexMat b1 = ComplexMat::Zero(4, 4);
    b1(0, 0) = 1;
    b1(1, 1) = -1;
    b1(2, 2) = -1;
    b1(3, 3) = 1;

    ComplexMat a2 = ComplexMat::Zero(4, 4);
    a2(0, 1) = 1;
    a2(1, 0) = -1;
    a2(2, 3) = -1;
    a2(3, 2) = 1;
    ComplexMat b2 = ComplexMat::Zero(4, 4);
    b2(0, 1) = 1;
    b2(1, 0) = 1;
    b2(2, 3) = -1;
    b2(3, 2) = -1;

    ComplexMat a3 = ComplexMat::Zero(4, 4);
    a3(0, 2) = 1;
    a3(1, 3) = 1;
    a3(2, 0) = -1;
    a3(3, 1) = -1;
    ComplexMat b3 = ComplexMat::Zero(4, 4);
    b3(0, 2) = 1;
    b3(1, 3) = 1;
    b3(2, 0) = 1;
    b3(3, 1) = 1;

    set.a_mats = {a1, a2, a3};
    set.b_mats = {b1, b2, b3};
    return set;
}

DispersionSet mdc_map(const DispersionSet& seed) {
    if (seed.kind != CodeKind::ostbc)
        throw ConfigError("mdc_map: seed must be an O-STBC dispersion set");

    const int k_out = 2 * seed.k;
    const double f = 1.0 / std::sqrt(static_cast<double>(k_out));
    const int t = seed.t_len;
    const int n = seed.n_t;
    const cplx j(0.0, 1.0);

    DispersionSet out;
    out.kind = CodeKind::mdc_qostbc;
    out.n_t = 2 * n;
    out.t_len = 2 * t;
    out.k = k_out;
    out.gram_scale = seed.gram_scale / k_out;
    out.a_mats.resize(k_out);
    out.b_mats.resize(k_out);

    auto blockdiag = [&](const ComplexMat& m) {
        ComplexMat r = ComplexMat::Zero(2 * t, 2 * n);
        r.topLeftCorner(t, n) = m;
        r.bottomRightCorner(t, n) = m;
        return r;
    };
    auto antidiag = [&](const ComplexMat& m) {
        ComplexMat r = ComplexMat::Zero(2 * t, 2 * n);
        r.topRightCorner(t, n) = m;
        r.bottomLeftCorner(t, n) = m;
        return r;
    };

    for (int i = 0; i < seed.k; ++i) {
        out.a_mats[i] = f * blockdiag(seed.a_mats[i]);                    // Rule #1
        out.b_mats[i] = f * antidiag(j * seed.a_mats[i]);                 // Rule #2
        out.a_mats[seed.k + i] = f * blockdiag(j * seed.b_mats[i]);      // Rule #3
        out.b_mats[seed.k + i] = f * antidiag(seed.b_mats[i]);           // Rule #4
    }
    return out;
}

ComplexMat assemble(const DispersionSet& set, const SymbolVector& s) {
    if (static_cast<int>(s.size()) != set.k)
        throw DimensionError("assemble: symbol count " + std::to_string(s.size()) +
                             " != K = " + std::to_string(set.k));
    const cplx j(0.0, 1.0);
    ComplexMat c = ComplexMat::Zero(set.t_len, set.n_t);
    for (int i = 0; i < set.k; ++i)
        c += s[i].real() * set.a_mats[i] + j * s[i].imag() * set.b_mats[i];
    return c;
}

AmicabilityReport check_amicability(const DispersionSet& set, double tol) {
    AmicabilityReport rep;
    if (set.k == 0) return rep;
    const int n = set.n_t;

    // Common scale from A_1 A_1^H.
    const ComplexMat g0 = set.a_mats[0] * set.a_mats[0].adjoint();
    rep.scale = g0.real().trace() / n;

    double worst = 0.0;
    auto track = [&](const ComplexMat& m) {
        worst = std::max(worst, m.cwiseAbs().maxCoeff());
    };

    const ComplexMat scaled_i = rep.scale * ComplexMat::Identity(n, n);
    for (int i = 0; i < set.k; ++i) {
        track(set.a_mats[i] * set.a_mats[i].adjoint() - scaled_i);
        track(set.b_mats[i] * set.b_mats[i].adjoint() - scaled_i);
        for (int l = 0; l < set.k; ++l) {
            if (l != i) {
                track(set.a_mats[i] * set.a_mats[l].adjoint() +
                      set.a_mats[l] * set.a_mats[i].adjoint());
                track(set.b_mats[i] * set.b_mats[l].adjoint() +
                      set.b_mats[l] * set.b_mats[i].adjoint());
            }
            track(set.a_mats[i] * set.b_mats[l].adjoint() -
                  set.b_mats[l] * set.a_mats[i].adjoint());
        }
    }
    rep.max_residual = worst;
    rep.pass = worst <= tol && rep.scale > 0.0;
    return rep;
}

GramDecomposition gram_decompose(const ComplexMat& codeword, int k) {
    if (codeword.rows() != codeword.cols())
        throw DimensionError("gram_decompose: codeword must be square");
    if (codeword.rows() % 2 != 0)
        throw DimensionError("gram_decompose: dimension must be even");

    const int n = static_cast<int>(codeword.rows());
    const ComplexMat g = codeword * codeword.adjoint();
    const ComplexMat jx = exchange_blocks(n);

    // I and [[0,I],[I,0]] are Frobenius-orthogonal, each with norm^2 = n.
    const double coef_i = g.real().trace() / n;
    const double coef_j = (jx.adjoint() * g).real().trace() / n;

    GramDecomposition dec;
    dec.alpha = k * coef_i;
    dec.beta = k * coef_j;
    dec.residual = (g - coef_i * ComplexMat::Identity(n, n) - coef_j * jx).norm();
    return dec;
}

double symbol_alpha(const SymbolVector& s) {
    double a = 0.0;
    for (const cplx& c : s) a += std::norm(c);
    return a;
}

double symbol_beta(const SymbolVector& s) {
    if (s.size() % 2 != 0)
        throw DimensionError("symbol_beta: K must be even");
    const std::size_t h = s.size() / 2;
    double b = 0.0;
    for (std::size_t i = 0; i < h; ++i)
        b += -s[i].real() * s[i].imag() + s[h + i].real() * s[h + i].imag();
    return 2.0 * b;
}

namespace {

// Enumerate all |M|^K codewords; throws per the all-pairs guards.
std::vector<ComplexMat> enumerate_codewords(const DispersionSet& set,
                                            const ConstellationSet& constellation) {
    const int m = constellation.size();
    if (m < 1) throw ConfigError("all-pairs enumeration: empty constellation");

    double total_d = 1.0;
    for (int i = 0; i < set.k; ++i) total_d *= m;
    if (total_d > static_cast<double>(kEnumerationGuard))
        throw EnumerationGuardError("all-pairs enumeration: " + std::to_string(total_d) +
                                    " codewords exceed the guard of " +
                                    std::to_string(kEnumerationGuard));
    const long total = static_cast<long>(total_d);
    if (total < 2)
        throw ConfigError("all-pairs enumeration: degenerate (fewer than two codewords)");

    std::vector<ComplexMat> cws;
    cws.reserve(total);
    std::vector<int> idx(set.k, 0);
    SymbolVector sym(set.k);
    for (long w = 0; w < total; ++w) {
        long rem = w;
        for (int i = set.k - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(rem % m);
            rem /= m;
        }
        for (int i = 0; i < set.k; ++i) sym[i] = constellation.points[idx[i]];
        cws.push_back(assemble(set, sym));
    }
    return cws;
}

}  // namespace

int min_rank_all_pairs(const DispersionSet& set, const ConstellationSet& constellation) {
    const auto cws = enumerate_codewords(set, constellation);
    int min_rank = set.n_t;
    for (std::size_t a = 0; a < cws.size(); ++a) {
        for (std::size_t b = a + 1; b < cws.size(); ++b) {
            const int r = numeric_rank(cws[a] - cws[b]);
            if (r < min_rank) {
                min_rank = r;
                if (min_rank == 0) return 0;
            }
        }
    }
    return min_rank;
}

double coding_gain_bruteforce(const DispersionSet& set, const ConstellationSet& constellation) {
    const auto cws = enumerate_codewords(set, constellation);
    const int n = set.n_t;

    double min_det = 0.0;
    ComplexMat min_diff;
    bool first = true;
    for (std::size_t a = 0; a < cws.size(); ++a) {
        for (std::size_t b = a + 1; b < cws.size(); ++b) {
            const ComplexMat d = cws[a] - cws[b];
            const double det = (d * d.adjoint()).determinant().real();
            if (first || det < min_det) {
                min_det = det;
                min_diff = d;
                first = false;
            }
        }
    }

    if (numeric_rank(min_diff) < n)
        throw RankDeficiencyError("coding gain undefined: a codeword difference is rank deficient");
    return n * std::pow(min_det, 1.0 / n);
}

double coding_gain_closed_form(const DispersionSet& set, const ConstellationSet& constellation) {
    if (constellation.size() < 2)
        throw ConfigError("coding gain: need at least two constellation points");
    if (set.kind == CodeKind::mdc_qostbc) {
        // Pairwise determinant is (min |dx^2-dy^2| / K)^{n_t}, minimized on
        // single-symbol differences.
        return (static_cast<double>(set.n_t) / set.k) * min_delta_metric(constellation);
    }
    // O-STBC: Gram of a difference is (sum |d_i|^2) gram_scale I.
    double dmin2 = 0.0;
    bool first = true;
    for (int a = 0; a < constellation.size(); ++a)
        for (int b = a + 1; b < constellation.size(); ++b) {
            const double d2 = std::norm(constellation.points[a] - constellation.points[b]);
            if (first || d2 < dmin2) {
                dmin2 = d2;
                first = false;
            }
        }
    return set.n_t * set.gram_scale * dmin2;
}

std::string dump_dispersion(const DispersionSet& set) {
    std::ostringstream os;
    char buf[64];
    os << "dstm-dispersion-set v1\n";
    os << "kind " << (set.kind == CodeKind::ostbc ? "ostbc" : "mdc_qostbc") << "\n";
    os << "n_t " << set.n_t << "\n";
    os << "t_len " << set.t_len << "\n";
    os << "k " << set.k << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", set.gram_scale);
    os << "gram_scale " << buf << "\n";
    auto dump_mat = [&](const char* tag, int index, const ComplexMat& m) {
        os << tag << " " << index + 1 << "\n";
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%.17g %.17g", m(r, c).real(), m(r, c).imag());
                os << (c ? " " : "") << buf;
            }
            os << "\n";
        }
    };
    for (int i = 0; i < set.k; ++i) dump_mat("A", i, set.a_mats[i]);
    for (int i = 0; i < set.k; ++i) dump_mat("B", i, set.b_mats[i]);
    return os.str();
}

void write_dispersion_file(const std::string& path, const DispersionSet& set) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for write: " + path);
    f << dump_dispersion(set);
}

DispersionSet parse_dispersion(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "dstm-dispersion-set v1")
        throw IoError("dispersion dump: bad magic line");

    DispersionSet set;
    std::string key, value;
    for (int i = 0; i < 5; ++i) {
        if (!(is >> key >> value)) throw IoError("dispersion dump: truncated header");
        if (key == "kind") {
            if (value == "ostbc")
                set.kind = CodeKind::ostbc;
            else if (value == "mdc_qostbc")
                set.kind = CodeKind::mdc_qostbc;
            else
                throw IoError("dispersion dump: unknown kind " + value);
        } else if (key == "n_t") {
            set.n_t = std::stoi(value);
        } else if (key == "t_len") {
            set.t_len = std::stoi(value);
        } else if (key == "k") {
            set.k = std::stoi(value);
        } else if (key == "gram_scale") {
            set.gram_scale = std::stod(value);
        } else {
            throw IoError("dispersion dump: unexpected header key " + key);
        }
    }
    if (set.n_t < 1 || set.t_len < 1 || set.k < 1)
        throw IoError("dispersion dump: invalid dimensions");

    auto read_mat = [&](const char* tag, int index) {
        std::string t;
        int n = 0;
        if (!(is >> t >> n) || t != tag || n != index + 1)
            throw IoError("dispersion dump: expected block " + std::string(tag) + " " +
                          std::to_string(index + 1));
        ComplexMat m(set.t_len, set.n_t);
        for (int r = 0; r < set.t_len; ++r)
            for (int c = 0; c < set.n_t; ++c) {
                double re = 0, im = 0;
                if (!(is >> re >> im)) throw IoError("dispersion dump: truncated matrix block");
                m(r, c) = cplx(re, im);
            }
        return m;
    };
    set.a_mats.resize(set.k);
    set.b_mats.resize(set.k);
    for (int i = 0; i < set.k; ++i) set.a_mats[i] = read_mat("A", i);
    for (int i = 0; i < set.k; ++i) set.b_mats[i] = read_mat("B", i);
    return set;
}

DispersionSet parse_dispersion_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    return parse_dispersion(f);
}

}  // namespace dstm
