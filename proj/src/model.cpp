#include "pairloc/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "pairloc/rng.hpp"

namespace pairloc {

namespace {

constexpr double kUnitNormTol = 1e-12;
constexpr double kDegenerateDistance = 1e-12;
constexpr int kCollisionRetries = 100;

void write_double(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

}  // namespace

ComparisonFrame::ComparisonFrame(Eigen::MatrixXd normals, Eigen::VectorXd offsets,
                                 GenParams gen_params)
    : normals_(std::move(normals)), offsets_(std::move(offsets)),
      gen_params_(std::move(gen_params)) {
    if (normals_.rows() != offsets_.size())
        throw LengthMismatch("frame: normals and offsets disagree on m");
    if (normals_.rows() > 0 && normals_.cols() < 1)
        throw InvalidParameter("frame: dimension must be >= 1");
    for (Eigen::Index i = 0; i < normals_.rows(); ++i) {
        if (std::abs(normals_.row(i).norm() - 1.0) > kUnitNormTol)
            throw InvalidParameter("frame: row " + std::to_string(i) + " is not unit norm");
        if (!std::isfinite(offsets_[i]))
            throw InvalidParameter("frame: offset " + std::to_string(i) + " is not finite");
    }
}

Eigen::VectorXd ComparisonFrame::margins(const Eigen::VectorXd& x) const {
    if (x.size() != normals_.cols())
        throw DimensionMismatch("margins: point dimension does not match frame");
    return normals_ * x - offsets_;
}

std::vector<ItemPair> sample_pairs(int m, int n, const Eigen::VectorXd& mean,
                                   double variance, std::uint64_t seed) {
    if (m < 1) throw InvalidParameter("sample_pairs: m must be >= 1");
    if (n < 1) throw InvalidParameter("sample_pairs: n must be >= 1");
    if (!(variance > 0.0)) throw InvalidParameter("sample_pairs: variance must be > 0");
    Eigen::VectorXd mu = mean;
    if (mu.size() == 0) mu = Eigen::VectorXd::Zero(n);
    if (mu.size() != n) throw DimensionMismatch("sample_pairs: mean dimension != n");

    const double stddev = std::sqrt(variance);
    RandomStream rng(seed);
    std::vector<ItemPair> pairs;
    pairs.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        ItemPair pair;
        int attempts = 0;
        do {
            if (attempts++ > kCollisionRetries)
                throw DegeneratePair("sample_pairs: pair collision persisted after retries");
            pair.p = rng.gaussian_vector(mu, stddev);
            pair.q = rng.gaussian_vector(mu, stddev);
        } while ((pair.p - pair.q).norm() < kDegenerateDistance);
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

ComparisonFrame derive_frame(const std::vector<ItemPair>& pairs, GenParams gen_params) {
    const int m = static_cast<int>(pairs.size());
    const int n = m > 0 ? static_cast<int>(pairs[0].p.size()) : 0;
    Eigen::MatrixXd normals(m, n);
    Eigen::VectorXd offsets(m);
    for (int i = 0; i < m; ++i) {
        const ItemPair& pair = pairs[static_cast<std::size_t>(i)];
        if (pair.p.size() != n || pair.q.size() != n)
            throw DimensionMismatch("derive_frame: pairs have mixed dimensions");
        const Eigen::VectorXd diff = pair.p - pair.q;
        const double dist = diff.norm();
        if (dist < kDegenerateDistance)
            throw DegeneratePair("derive_frame: pair " + std::to_string(i) + " is degenerate");
        normals.row(i) = diff / dist;
        offsets[i] = (pair.p.squaredNorm() - pair.q.squaredNorm()) / (2.0 * dist);
    }
    return ComparisonFrame(std::move(normals), std::move(offsets), std::move(gen_params));
}

ComparisonFrame sample_frame(int m, int n, const Eigen::VectorXd& mean,
                             double variance, std::uint64_t seed) {
    GenParams gp;
    gp.mean = mean.size() == 0 ? Eigen::VectorXd::Zero(n) : mean;
    gp.sigma2 = variance;
    gp.seed = seed;
    gp.external = false;
    return derive_frame(sample_pairs(m, n, mean, variance, seed), std::move(gp));
}

SignVector observe(const Eigen::VectorXd& x, const ComparisonFrame& frame) {
    const Eigen::VectorXd margin = frame.margins(x);  // throws on dimension mismatch
    std::vector<int> signs(static_cast<std::size_t>(frame.count()));
    for (int i = 0; i < frame.count(); ++i)
        signs[static_cast<std::size_t>(i)] = margin[i] >= 0.0 ? 1 : -1;
    return SignVector(std::move(signs));
}

SignVector::SignVector(std::vector<int> signs) : signs_(std::move(signs)) {
    for (int s : signs_)
        if (s != 1 && s != -1) throw InvalidParameter("sign vector entries must be +1 or -1");
}

SignVector SignVector::with_flips(const std::vector<int>& indices) const {
    std::vector<int> out = signs_;
    for (int i : indices) {
        if (i < 0 || i >= size()) throw InvalidParameter("flip index out of range");
        out[static_cast<std::size_t>(i)] = -out[static_cast<std::size_t>(i)];
    }
    return SignVector(std::move(out));
}

double hamming(const SignVector& s1, const SignVector& s2) {
    if (s1.size() != s2.size()) throw LengthMismatch("hamming: sign vectors differ in length");
    if (s1.size() == 0) return 0.0;
    int differ = 0;
    for (int i = 0; i < s1.size(); ++i) differ += s1[i] != s2[i];
    return static_cast<double>(differ) / s1.size();
}

void ComparisonFrame::save_csv(std::ostream& out) const {
    out << "# n=" << dimension() << " m=" << count();
    if (gen_params_.external) {
        out << " sigma2=external seed=external\n";
    } else {
        out << " sigma2=";
        write_double(out, gen_params_.sigma2);
        out << " seed=" << gen_params_.seed << "\n";
        if (gen_params_.mean.size() > 0 && gen_params_.mean.cwiseAbs().maxCoeff() != 0.0) {
            out << "# mean=";
            for (Eigen::Index j = 0; j < gen_params_.mean.size(); ++j) {
                if (j) out << ';';
                write_double(out, gen_params_.mean[j]);
            }
            out << "\n";
        }
    }
    for (int i = 0; i < count(); ++i) {
        for (int j = 0; j < dimension(); ++j) {
            write_double(out, normals_(i, j));
            out << ',';
        }
        write_double(out, offsets_[i]);
        out << "\n";
    }
}

void ComparisonFrame::save_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    save_csv(out);
}

ComparisonFrame ComparisonFrame::load_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# n=", 0) != 0)
        throw ConfigError("frame csv: missing header line");
    int n = 0, m = 0;
    GenParams gp;
    {
        std::istringstream hdr(line.substr(1));
        std::string tok;
        while (hdr >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            if (key == "n") n = std::stoi(val);
            else if (key == "m") m = std::stoi(val);
            else if (key == "sigma2") {
                if (val == "external") gp.external = true;
                else { gp.sigma2 = std::stod(val); gp.external = false; }
            } else if (key == "seed" && val != "external") {
                gp.seed = std::stoull(val);
            }
        }
    }
    if (n < 1 || m < 0) throw ConfigError("frame csv: bad header values");
    if (!gp.external) gp.mean = Eigen::VectorXd::Zero(n);

    Eigen::MatrixXd normals(m, n);
    Eigen::VectorXd offsets(m);
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# mean=", 0) == 0 && !gp.external) {
                std::istringstream ms(line.substr(7));
                std::string piece;
                int j = 0;
                while (std::getline(ms, piece, ';') && j < n) gp.mean[j++] = std::stod(piece);
            }
            continue;
        }
        if (row >= m) throw ConfigError("frame csv: more rows than header m");
        std::istringstream ls(line);
        std::string cell;
        for (int j = 0; j < n; ++j) {
            if (!std::getline(ls, cell, ',')) throw ConfigError("frame csv: short row");
            normals(row, j) = std::stod(cell);
        }
        if (!std::getline(ls, cell, ',')) throw ConfigError("frame csv: missing offset");
        offsets[row] = std::stod(cell);
        ++row;
    }
    if (row != m) throw ConfigError("frame csv: fewer rows than header m");
    return ComparisonFrame(std::move(normals), std::move(offsets), std::move(gp));
}

ComparisonFrame ComparisonFrame::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return load_csv(in);
}

void save_signs(const SignVector& signs, std::ostream& out) {
    for (int i = 0; i < signs.size(); ++i) out << signs[i] << "\n";
}

void save_signs(const SignVector& signs, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    save_signs(signs, out);
}

SignVector load_signs(std::istream& in) {
    std::vector<int> signs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line == "1" || line == "+1") signs.push_back(1);
        else if (line == "-1") signs.push_back(-1);
        else throw ConfigError("sign file: unexpected token '" + line + "'");
    }
    return SignVector(std::move(signs));
}

SignVector load_signs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return load_signs(in);
}

}  // namespace pairloc
