#include "freelab/matrix_models.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "freelab/eigs.hpp"
#include "freelab/haar.hpp"

namespace freelab::models {

double ModelSample::unitarity_defect() const {
    double worst = 0.0;
    for (const auto& u : U) {
        MatC g = u * u.adjoint() - MatC::Identity(N, N);
        worst = std::max(worst, g.cwiseAbs().maxCoeff());
    }
    return worst;
}

MatC ModelSample::dense_generator(int i) const {
    if (i < 1 || i > 2 * d) throw std::invalid_argument("dense_generator: index");
    if (!is_permutation()) return (i <= d) ? U[i - 1] : MatC(U[i - d - 1].adjoint());
    MatC m = MatC::Zero(N, N);
    const auto& s = sigma[(i <= d) ? i - 1 : i - d - 1];
    for (int x = 0; x < N; ++x) {
        if (i <= d)
            m(x, s[x]) = 1.0;  // (U_i)_{x,y} = 1(sigma_i(x) = y)
        else
            m(s[x], x) = 1.0;
    }
    return m;
}

ModelSample sample(Kind kind, int N, int d, std::uint64_t seed) {
    if (N < 1 || d < 1) throw std::invalid_argument("sample: N >= 1, d >= 1");
    ModelSample s;
    s.kind = kind;
    s.N = N;
    s.d = d;
    s.seed = seed;
    Rng rng(seed);
    for (int i = 0; i < d; ++i) {
        Rng sub = rng.split(i);
        switch (kind) {
            case Kind::haar_unitary:
                s.U.push_back(haar::unitary(N, sub));
                break;
            case Kind::haar_orthogonal:
                s.U.push_back(haar::orthogonal(N, sub).cast<cx>());
                break;
            case Kind::uniform_permutation:
                s.sigma.push_back(haar::permutation(N, sub));
                break;
        }
    }
    return s;
}

void write_sample(const ModelSample& s, const std::string& path) {
    nlohmann::json j;
    j["kind"] = static_cast<int>(s.kind);
    j["N"] = s.N;
    j["d"] = s.d;
    j["seed"] = s.seed;
    if (s.is_permutation()) j["sigma"] = s.sigma;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_sample: cannot open " + path);
    f << j.dump() << "\n";
    for (const auto& u : s.U) {
        std::vector<double> buf(2 * s.N * s.N);
        for (int c = 0; c < s.N; ++c)
            for (int r = 0; r < s.N; ++r) {
                buf[2 * (c * s.N + r)] = u(r, c).real();
                buf[2 * (c * s.N + r) + 1] = u(r, c).imag();
            }
        f.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(double)));
    }
}

ModelSample read_sample(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_sample: cannot open " + path);
    std::string header;
    std::getline(f, header);
    nlohmann::json j = nlohmann::json::parse(header);
    ModelSample s;
    s.kind = static_cast<Kind>(j.at("kind").get<int>());
    s.N = j.at("N").get<int>();
    s.d = j.at("d").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    if (s.kind == Kind::uniform_permutation) {
        s.sigma = j.at("sigma").get<std::vector<std::vector<int>>>();
        return s;
    }
    for (int i = 0; i < s.d; ++i) {
        std::vector<double> buf(2 * s.N * s.N);
        f.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(double)));
        if (!f) throw std::runtime_error("read_sample: truncated payload");
        MatC u(s.N, s.N);
        for (int c = 0; c < s.N; ++c)
            for (int r = 0; r < s.N; ++r)
                u(r, c) = cx(buf[2 * (c * s.N + r)], buf[2 * (c * s.N + r) + 1]);
        s.U.push_back(std::move(u));
    }
    return s;
}

MatC assemble(const CoefficientFamily& c, const ModelSample& s) {
    if (c.d != s.d) throw std::invalid_argument("assemble: rank mismatch");
    const int n = c.n, N = s.N;
    MatC op = MatC::Zero(n * N, n * N);
    for (int v = 0; v < N; ++v) op.block(v * n, v * n, n, n) = c.a[0];
    for (int i = 1; i <= 2 * c.d; ++i) {
        MatC u = s.dense_generator(i);
        for (int r = 0; r < N; ++r)
            for (int cidx = 0; cidx < N; ++cidx) {
                cx w = u(r, cidx);
                if (w != cx(0.0, 0.0)) op.block(r * n, cidx * n, n, n) += w * c.a[i];
            }
    }
    return op;
}

namespace {

// apply Pi = 1_n (x) (1 - ones ones^*): subtract the mean over the N axis
void project_mean(VecC& v, int n, int N) {
    for (int r = 0; r < n; ++r) {
        cx mean = 0.0;
        for (int x = 0; x < N; ++x) mean += v(x * n + r);
        mean /= double(N);
        for (int x = 0; x < N; ++x) v(x * n + r) -= mean;
    }
}

}  // namespace

double operator_norm(const MatC& op, int n, int N, bool project) {
    if (!project) return operator_norm_dense(op);
    MatC pi = MatC::Identity(n * N, n * N);
    MatC ones = MatC::Constant(N, N, cx(1.0 / N, 0.0));
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c)
            for (int i = 0; i < n; ++i) pi(r * n + i, c * n + i) -= ones(r, c);
    return operator_norm_dense(MatC(op * pi));
}

double operator_norm_perm(const CoefficientFamily& c, const ModelSample& s,
                          bool project, double rel_tol) {
    if (!s.is_permutation()) throw std::invalid_argument("operator_norm_perm: permutation sample");
    const int n = c.n, N = s.N, d = c.d;
    // inverse maps
    std::vector<std::vector<int>> inv(d, std::vector<int>(N));
    for (int i = 0; i < d; ++i)
        for (int x = 0; x < N; ++x) inv[i][s.sigma[i][x]] = x;

    bool herm = c.selfadjoint_residual() < 1e-12;
    std::vector<cx> tmp((std::size_t)n * N);
    auto matvec = [&](const cx* in, cx* out) {
        // y(:,v) = a0 x(:,v) + sum_i a_i x(:,sigma_i(v)) + a_{i*} x(:,sigma_i^{-1}(v))
        for (int v = 0; v < N; ++v) {
            Eigen::Map<VecC> y(out + (std::size_t)v * n, n);
            y = c.a[0] * Eigen::Map<const VecC>(in + (std::size_t)v * n, n);
            for (int i = 0; i < d; ++i) {
                y.noalias() += c.a[i + 1] * Eigen::Map<const VecC>(in + (std::size_t)s.sigma[i][v] * n, n);
                y.noalias() += c.a[d + i + 1] * Eigen::Map<const VecC>(in + (std::size_t)inv[i][v] * n, n);
            }
        }
    };
    HermOp op;
    if (herm) {
        op = [&, project](const cx* in, cx* out) {
            if (!project) { matvec(in, out); return; }
            std::copy(in, in + (std::size_t)n * N, tmp.data());
            VecC v = Eigen::Map<VecC>(tmp.data(), (std::size_t)n * N);
            project_mean(v, n, N);
            matvec(v.data(), out);
            VecC o = Eigen::Map<VecC>(out, (std::size_t)n * N);
            project_mean(o, n, N);
            std::copy(o.data(), o.data() + (std::size_t)n * N, out);
        };
        return lanczos_max_abs(op, (std::ptrdiff_t)n * N, Rng(s.seed ^ 0xabc), rel_tol);
    }
    // non-selfadjoint: largest singular value of Pi A Pi via the Gram operator
    std::vector<std::vector<int>> fwd = s.sigma;
    auto matvec_adj = [&](const cx* in, cx* out) {
        for (int v = 0; v < N; ++v) {
            Eigen::Map<VecC> y(out + (std::size_t)v * n, n);
            y = c.a[0].adjoint() * Eigen::Map<const VecC>(in + (std::size_t)v * n, n);
            for (int i = 0; i < d; ++i) {
                y.noalias() += c.a[i + 1].adjoint() * Eigen::Map<const VecC>(in + (std::size_t)inv[i][v] * n, n);
                y.noalias() += c.a[d + i + 1].adjoint() * Eigen::Map<const VecC>(in + (std::size_t)fwd[i][v] * n, n);
            }
        }
    };
    std::vector<cx> mid((std::size_t)n * N);
    op = [&, project](const cx* in, cx* out) {
        VecC v = Eigen::Map<const VecC>(in, (std::size_t)n * N);
        if (project) project_mean(v, n, N);
        matvec(v.data(), mid.data());
        VecC m = Eigen::Map<VecC>(mid.data(), (std::size_t)n * N);
        if (project) project_mean(m, n, N);
        matvec_adj(m.data(), out);
        VecC o = Eigen::Map<VecC>(out, (std::size_t)n * N);
        if (project) project_mean(o, n, N);
        std::copy(o.data(), o.data() + (std::size_t)n * N, out);
    };
    double lam = lanczos_max_abs(op, (std::ptrdiff_t)n * N, Rng(s.seed ^ 0xdef), rel_tol);
    return std::sqrt(std::max(0.0, lam));
}

double schatten_norm(const MatC& op, int p) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("schatten_norm: p even >= 2");
    // singular values via the Hermitian square
    MatC gram = op * op.adjoint();
    VecR ev = hermitian_eigenvalues(gram);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        acc += std::pow(std::max(0.0, ev(i)), p / 2.0);
    return std::pow(acc / ev.size(), 1.0 / p);
}

double schatten_lift(double schatten_p, int n, int N, int p) {
    return std::pow(double(n) * N, 1.0 / p) * schatten_p;
}

McMoment mc_trace_moment(const CoefficientFamily& c, int ell, int N, Kind kind,
                         int samples, std::uint64_t seed) {
    McMoment out;
    out.samples = samples;
    if (ell == 0) {
        out.mean = 1.0;
        return out;
    }
    double sum = 0, sumsq = 0;
    for (int rep = 0; rep < samples; ++rep) {
        ModelSample s = sample(kind, N, c.d, Rng(seed).split(rep).u64());
        MatC a = assemble(c, s);
        MatC pw = a;
        for (int t = 1; t < ell; ++t) pw = pw * a;
        double v = pw.trace().real() / (c.n * N);
        sum += v;
        sumsq += v * v;
    }
    out.mean = sum / samples;
    double var = std::max(0.0, sumsq / samples - out.mean * out.mean);
    out.se = std::sqrt(var / samples);
    return out;
}

ConcentrationReport concentration_probe(const CoefficientFamily& c, int N, int p,
                                        int samples, std::uint64_t seed, double slack) {
    ConcentrationReport rep;
    for (int r = 0; r < samples; ++r) {
        ModelSample s = sample(Kind::haar_unitary, N, c.d, Rng(seed).split(r).u64());
        MatC a = assemble(c, s);
        double v = (p <= 0) ? operator_norm_dense(a) : schatten_norm(a, p);
        rep.values.push_back(v);
    }
    double sum = 0;
    for (double v : rep.values) sum += v;
    rep.mean = sum / samples;
    double ss = 0;
    for (double v : rep.values) ss += (v - rep.mean) * (v - rep.mean);
    rep.stddev = std::sqrt(ss / samples);
    double rho_up = star::norm_bracket(c, 0.1).upper;
    double expo = (p <= 0) ? -0.5 : (-0.5 - 1.0 / p);
    rep.bound = slack * std::sqrt(double(c.d)) * rho_up * std::pow(double(N), expo);
    rep.pass = rep.stddev <= rep.bound;
    return rep;
}

MatC tensor_leg_model(const star::TensorFamily& t, const std::vector<ModelSample>& legs,
                      std::uint64_t dense_cap) {
    if (static_cast<int>(legs.size()) != t.k)
        throw std::invalid_argument("tensor_leg_model: one sample per leg");
    std::uint64_t dim = t.n;
    for (const auto& s : legs) dim *= s.N;
    if (dim > dense_cap) throw std::runtime_error("tensor_leg_model: dense cap exceeded");
    const int D = static_cast<int>(dim);
    MatC op = MatC::Zero(D, D);
    // identity part
    for (int v = 0; v < D / t.n; ++v) op.block(v * t.n, v * t.n, t.n, t.n) = t.a0;
    // legs: a_{i,j} (x) 1^{j-1} (x) U_{i,j} (x) 1^{k-j}
    // layout: row index = ((x_1 * N_2 + x_2) ... ) * n + coeff (leg 1 slowest)
    for (int j = 0; j < t.k; ++j) {
        int Nj = legs[j].N;
        std::uint64_t inner = t.n;  // stride of the leg-j index
        for (int jj = j + 1; jj < t.k; ++jj) inner *= legs[jj].N;
        std::uint64_t outer = dim / (inner * Nj);
        for (int i = 1; i <= 2 * t.d; ++i) {
            MatC u = legs[j].dense_generator(i);
            for (int r = 0; r < Nj; ++r)
                for (int cc = 0; cc < Nj; ++cc) {
                    cx w = u(r, cc);
                    if (w == cx(0.0, 0.0)) continue;
                    for (std::uint64_t o = 0; o < outer; ++o) {
                        std::uint64_t row0 = (o * Nj + r) * inner;
                        std::uint64_t col0 = (o * Nj + cc) * inner;
                        for (std::uint64_t in2 = 0; in2 < inner / t.n; ++in2)
                            op.block(row0 + in2 * t.n, col0 + in2 * t.n, t.n, t.n) +=
                                w * t.leg[j][i];
                    }
                }
        }
    }
    return op;
}

double tensor_restricted_norm(const MatC& op, int n, int N, int k) {
    // projector (1 - ones ones^*)^{(x) k} per leg, tensored with 1_n
    std::uint64_t dim = n;
    for (int j = 0; j < k; ++j) dim *= N;
    if (static_cast<Eigen::Index>(dim) != op.rows())
        throw std::invalid_argument("tensor_restricted_norm: dimension mismatch");
    MatC p1 = MatC::Identity(N, N) - MatC::Constant(N, N, cx(1.0 / N, 0.0));
    MatC pi = MatC::Identity(n, n);
    for (int j = 0; j < k; ++j) {
        MatC next(pi.rows() * N, pi.cols() * N);
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) next.block(r * pi.rows(), c * pi.cols(), pi.rows(), pi.cols()) = p1(r, c) * pi;
        pi = std::move(next);
    }
    return operator_norm_dense(MatC(pi * op * pi));
}

}  // namespace freelab::models
