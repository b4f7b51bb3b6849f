#include "bessellab/classchar.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bessellab::classchar {

namespace {

// deterministic double in [-1,1) from a raw 64-bit draw; avoids the
// implementation-defined std::uniform_real_distribution
double det_unit(std::mt19937_64& rng) {
    return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace

uint32_t ConjClasses::position_of(const Mat& g) const {
    auto it = pos.find(g);
    if (it == pos.end()) throw std::invalid_argument("element not in the enumerated group");
    return it->second;
}

uint32_t ConjClasses::index_of(const Mat& g) const { return class_of[position_of(g)]; }

uint32_t TwistedClasses::index_of(const Mat& g) const {
    auto it = pos.find(g);
    if (it == pos.end()) throw std::invalid_argument("element not in the enumerated group");
    return class_of[it->second];
}

ConjClasses conj_classes(const GaloisDatum& d, std::vector<Mat> elements) {
    std::sort(elements.begin(), elements.end());
    ConjClasses c;
    c.elements = std::move(elements);
    const uint32_t N = static_cast<uint32_t>(c.elements.size());
    c.pos.reserve(2 * N);
    for (uint32_t i = 0; i < N; ++i) c.pos.emplace(c.elements[i], i);
    if (c.pos.size() != N) throw std::invalid_argument("conj_classes: duplicate elements");

    c.inv_pos.resize(N);
    for (uint32_t i = 0; i < N; ++i) c.inv_pos[i] = c.position_of(d.minv(c.elements[i]));

    // closure spot-check on a deterministic sample
    for (uint32_t i = 0; i < std::min<uint32_t>(N, 64); ++i) {
        const Mat& x = c.elements[(i * 2654435761u) % N];
        const Mat& y = c.elements[(i * 40503u + 7) % N];
        if (c.pos.find(d.mmul(x, y)) == c.pos.end())
            throw std::invalid_argument("conj_classes: input is not closed under multiplication");
    }

    c.class_of.assign(N, UINT32_MAX);
    for (uint32_t i = 0; i < N; ++i) {
        if (c.class_of[i] != UINT32_MAX) continue;
        uint32_t idx = static_cast<uint32_t>(c.reps.size());
        uint64_t size = 0;
        // elements are sorted, so the first unvisited member is the least of
        // its class: deterministic representative choice
        for (uint32_t x = 0; x < N; ++x) {
            Mat conj = d.mmul(d.mmul(c.elements[x], c.elements[i]), c.elements[c.inv_pos[x]]);
            uint32_t p = c.position_of(conj);
            if (c.class_of[p] == UINT32_MAX) {
                c.class_of[p] = idx;
                ++size;
            }
        }
        c.reps.push_back(c.elements[i]);
        c.sizes.push_back(size);
    }

    uint64_t total = 0;
    for (uint64_t s : c.sizes) {
        if (N % s != 0) throw std::logic_error("conj_classes: class size does not divide order");
        total += s;
    }
    if (total != N) throw std::logic_error("conj_classes: sizes do not sum to order");
    return c;
}

TwistedClasses twisted_classes(const GaloisDatum& d, std::vector<Mat> ge) {
    std::sort(ge.begin(), ge.end());
    TwistedClasses c;
    c.elements = std::move(ge);
    const uint32_t N = static_cast<uint32_t>(c.elements.size());
    c.pos.reserve(2 * N);
    for (uint32_t i = 0; i < N; ++i) c.pos.emplace(c.elements[i], i);

    std::vector<uint32_t> sig_pos(N);
    for (uint32_t i = 0; i < N; ++i) {
        auto it = c.pos.find(d.sigma(c.elements[i]));
        if (it == c.pos.end()) throw std::invalid_argument("twisted_classes: sigma leaves the group");
        sig_pos[i] = it->second;
    }

    c.class_of.assign(N, UINT32_MAX);
    for (uint32_t i = 0; i < N; ++i) {
        if (c.class_of[i] != UINT32_MAX) continue;
        uint32_t idx = static_cast<uint32_t>(c.reps.size());
        uint64_t size = 0;
        for (uint32_t x = 0; x < N; ++x) {
            // g . x0 = g x0 sigma(g)^{-1}
            Mat img = d.mmul(d.mmul(c.elements[x], c.elements[i]),
                             d.minv(c.elements[sig_pos[x]]));
            auto it = c.pos.find(img);
            if (it == c.pos.end()) throw std::logic_error("twisted_classes: orbit leaves the group");
            if (c.class_of[it->second] == UINT32_MAX) {
                c.class_of[it->second] = idx;
                ++size;
            }
        }
        c.reps.push_back(c.elements[i]);
        c.sizes.push_back(size);
    }
    uint64_t total = 0;
    for (uint64_t s : c.sizes) total += s;
    if (total != N) throw std::logic_error("twisted_classes: sizes do not sum to order");
    return c;
}

CharacterTable character_table(const GaloisDatum& d, const ConjClasses& cls, uint64_t seed,
                               uint64_t cap) {
    const uint64_t N = cls.order();
    if (N > cap) throw std::length_error("character_table: group order exceeds the cap");
    const uint32_t r = static_cast<uint32_t>(cls.reps.size());

    // class multiplication coefficients a[i][j][k]: K_i K_j = sum_k a_ijk K_k
    std::vector<uint32_t> a(static_cast<size_t>(r) * r * r, 0);
    for (uint32_t k = 0; k < r; ++k) {
        uint32_t zk = cls.position_of(cls.reps[k]);
        for (uint32_t x = 0; x < N; ++x) {
            uint32_t i = cls.class_of[x];
            // y = x^{-1} z_k, so x * y = z_k
            Mat y = d.mmul(cls.elements[cls.inv_pos[x]], cls.elements[zk]);
            uint32_t j = cls.index_of(y);
            ++a[(static_cast<size_t>(i) * r + j) * r + k];
        }
    }

    uint32_t id_class = cls.index_of(d.ident());

    Eigen::MatrixXcd vecs;
    std::mt19937_64 rng(seed ? seed : 1);
    bool ok = false;
    for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
        // random real combination of the class matrices; common eigenvectors
        // are the central characters
        std::vector<double> coef(r);
        for (uint32_t i = 0; i < r; ++i) coef[i] = det_unit(rng);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(r, r);
        for (uint32_t i = 0; i < r; ++i)
            for (uint32_t j = 0; j < r; ++j)
                for (uint32_t k = 0; k < r; ++k)
                    B(j, k) += coef[i] * a[(static_cast<size_t>(i) * r + j) * r + k];

        Eigen::EigenSolver<Eigen::MatrixXd> es(B);
        if (es.info() != Eigen::Success) continue;
        Eigen::VectorXcd vals = es.eigenvalues();
        double scale = vals.cwiseAbs().maxCoeff() + 1.0;
        bool distinct = true;
        for (uint32_t i = 0; i < r && distinct; ++i)
            for (uint32_t j = i + 1; j < r; ++j)
                if (std::abs(vals(i) - vals(j)) < 1e-7 * scale) {
                    distinct = false;
                    break;
                }
        if (!distinct) continue;
        vecs = es.eigenvectors();
        ok = true;
    }
    if (!ok) throw std::runtime_error("character_table: degenerate eigenspaces after 8 reseeds");

    CharacterTable t;
    t.seed = seed;
    std::vector<std::pair<uint64_t, std::vector<cplx>>> rows;
    for (uint32_t c = 0; c < r; ++c) {
        Eigen::VectorXcd u = vecs.col(c);
        cplx at_id = u(id_class);
        if (std::abs(at_id) < 1e-12)
            throw std::runtime_error("character_table: eigenvector vanishes at the identity class");
        u /= at_id;  // now u_k = |C_k| chi(g_k) / chi(1)
        double s = 0;
        for (uint32_t k = 0; k < r; ++k) s += std::norm(u(k)) / cls.sizes[k];
        double deg = std::sqrt(static_cast<double>(N) / s);
        uint64_t di = static_cast<uint64_t>(std::llround(deg));
        if (std::abs(deg - static_cast<double>(di)) > 1e-6 * std::max(1.0, deg))
            throw std::runtime_error("character_table: non-integral degree");
        std::vector<cplx> row(r);
        for (uint32_t k = 0; k < r; ++k) row[k] = static_cast<double>(di) * u(k) / static_cast<double>(cls.sizes[k]);
        rows.emplace_back(di, std::move(row));
    }

    // canonical row order: by degree, then lexicographic on (re, im) pairs
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        for (size_t k = 0; k < x.second.size(); ++k) {
            if (x.second[k].real() != y.second[k].real()) return x.second[k].real() < y.second[k].real();
            if (x.second[k].imag() != y.second[k].imag()) return x.second[k].imag() < y.second[k].imag();
        }
        return false;
    });
    uint64_t degsum = 0;
    for (auto& [deg, row] : rows) {
        t.degrees.push_back(deg);
        t.chars.push_back(std::move(row));
        degsum += deg * deg;
    }
    if (degsum != N) throw std::runtime_error("character_table: sum of squared degrees mismatch");

    // orthogonality and weak integrality
    double rres = 0;
    for (uint32_t i = 0; i < r; ++i)
        for (uint32_t j = 0; j < r; ++j) {
            cplx ip = inner_product(t.chars[i], t.chars[j], cls);
            rres = std::max(rres, std::abs(ip - (i == j ? cplx{1, 0} : cplx{0, 0})));
        }
    double cres = 0;
    for (uint32_t k = 0; k < r; ++k)
        for (uint32_t l = 0; l < r; ++l) {
            cplx sum = 0;
            for (uint32_t i = 0; i < r; ++i) sum += t.chars[i][k] * std::conj(t.chars[i][l]);
            sum *= static_cast<double>(cls.sizes[k]) / static_cast<double>(N);
            cres = std::max(cres, std::abs(sum - (k == l ? cplx{1, 0} : cplx{0, 0})));
        }
    t.row_residual = rres;
    t.col_residual = cres;
    if (rres > 1e-8 || cres > 1e-8)
        throw std::runtime_error("character_table: orthogonality residual above 1e-8");
    for (uint32_t i = 0; i < r; ++i)
        for (uint32_t k = 0; k < r; ++k)
            if (std::abs(t.chars[i][k]) > static_cast<double>(t.degrees[i]) + 1e-8)
                throw std::runtime_error("character_table: value exceeds the degree bound");
    return t;
}

std::vector<uint32_t> sigma_invariant_irreps(const GaloisDatum& d, const ConjClasses& cls,
                                             const CharacterTable& table, double tol) {
    const uint32_t r = static_cast<uint32_t>(cls.reps.size());
    std::vector<uint32_t> sig_class(r);
    for (uint32_t k = 0; k < r; ++k) sig_class[k] = cls.index_of(d.sigma(cls.reps[k]));
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < table.nrows(); ++i) {
        bool inv = true;
        for (uint32_t k = 0; k < r && inv; ++k)
            if (std::abs(table.chars[i][sig_class[k]] - table.chars[i][k]) > tol) inv = false;
        if (inv) out.push_back(i);
    }
    return out;
}

cplx inner_product(std::span<const cplx> f, std::span<const cplx> g, const ConjClasses& cls) {
    if (f.size() != cls.reps.size() || g.size() != cls.reps.size())
        throw std::invalid_argument("inner_product: length mismatch");
    cplx acc = 0;
    for (size_t k = 0; k < f.size(); ++k)
        acc += static_cast<double>(cls.sizes[k]) * f[k] * std::conj(g[k]);
    return acc / static_cast<double>(cls.order());
}

namespace {
std::string fmt_double(double x) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace

std::string table_cache_key(const GaloisDatum& d, const std::string& group, uint64_t seed) {
    std::ostringstream os;
    os << "chartable-v1-" << matgrp::family_str(d.family) << "-n" << d.n << "-q" << d.q << "-"
       << group << "-s" << seed;
    return os.str();
}

std::string table_serialize(const GaloisDatum& d, const std::string& group,
                            const ConjClasses& cls, const CharacterTable& t) {
    std::ostringstream os;
    os << "bessellab chartable v1\n";
    os << "family " << matgrp::family_str(d.family) << " n " << d.n << " q " << d.q << " group "
       << group << " seed " << t.seed << "\n";
    os << "order " << cls.order() << " classes " << cls.reps.size() << "\n";
    for (size_t k = 0; k < cls.reps.size(); ++k)
        os << "class " << matgrp::encode_hex(cls.reps[k], d.n) << " " << cls.sizes[k] << "\n";
    os << "rows " << t.nrows() << "\n";
    for (uint32_t i = 0; i < t.nrows(); ++i) {
        os << "deg " << t.degrees[i] << "\n";
        for (size_t k = 0; k < t.chars[i].size(); ++k)
            os << fmt_double(t.chars[i][k].real()) << " " << fmt_double(t.chars[i][k].imag()) << "\n";
    }
    return os.str();
}

CharacterTable table_deserialize(const std::string& text, const GaloisDatum& d,
                                 const std::string& group, const ConjClasses& cls) {
    std::istringstream is(text);
    std::string line;
    auto bad = [](const std::string& why) -> std::runtime_error {
        return std::runtime_error("chartable cache: " + why);
    };
    if (!std::getline(is, line) || line != "bessellab chartable v1") throw bad("bad magic");
    std::string word, fam, grp;
    uint32_t n = 0, q = 0;
    uint64_t seed = 0;
    is >> word >> fam >> word >> n >> word >> q >> word >> grp >> word >> seed;
    if (fam != matgrp::family_str(d.family) || n != d.n || q != d.q || grp != group)
        throw bad("config mismatch");
    uint64_t order = 0, nclasses = 0;
    is >> word >> order >> word >> nclasses;
    if (order != cls.order() || nclasses != cls.reps.size()) throw bad("class data mismatch");
    for (size_t k = 0; k < nclasses; ++k) {
        std::string hex;
        uint64_t size;
        is >> word >> hex >> size;
        if (word != "class" || hex != matgrp::encode_hex(cls.reps[k], d.n) || size != cls.sizes[k])
            throw bad("class representative mismatch");
    }
    CharacterTable t;
    t.seed = seed;
    uint64_t rows = 0;
    is >> word >> rows;
    for (uint64_t i = 0; i < rows; ++i) {
        uint64_t deg;
        is >> word >> deg;
        if (word != "deg") throw bad("row header");
        std::vector<cplx> row(nclasses);
        for (size_t k = 0; k < nclasses; ++k) {
            double re, im;
            if (!(is >> re >> im)) throw bad("truncated values");
            row[k] = {re, im};
        }
        t.degrees.push_back(deg);
        t.chars.push_back(std::move(row));
    }
    // a cache hit must re-verify orthogonality before use
    double rres = 0;
    for (uint32_t i = 0; i < t.nrows(); ++i)
        for (uint32_t j = 0; j < t.nrows(); ++j) {
            cplx ip = inner_product(t.chars[i], t.chars[j], cls);
            rres = std::max(rres, std::abs(ip - (i == j ? cplx{1, 0} : cplx{0, 0})));
        }
    t.row_residual = rres;
    if (t.nrows() != cls.reps.size() || rres > 1e-8) throw bad("orthogonality check failed");
    return t;
}

CharacterTable character_table_cached(const GaloisDatum& d, const ConjClasses& cls,
                                      const std::string& group, uint64_t seed,
                                      const std::string& cache_dir, uint64_t cap,
                                      std::vector<std::string>* provenance) {
    if (cache_dir.empty()) return character_table(d, cls, seed, cap);
    namespace fs = std::filesystem;
    fs::path path = fs::path(cache_dir) / (table_cache_key(d, group, seed) + ".txt");
    if (fs::exists(path)) {
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            CharacterTable t = table_deserialize(buf.str(), d, group, cls);
            if (provenance) provenance->push_back(table_cache_key(d, group, seed) + " (hit)");
            return t;
        } catch (const std::exception&) {
            // fall through to recompute; stale caches are overwritten
        }
    }
    CharacterTable t = character_table(d, cls, seed, cap);
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << table_serialize(d, group, cls, t);
    if (provenance) provenance->push_back(table_cache_key(d, group, seed) + " (computed)");
    return t;
}

}  // namespace bessellab::classchar
