#include "tcm/random_states.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "tcm/entanglement.hpp"

namespace tcm {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

CVector gaussian_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> normal;
    CVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = cplx(re, im);
    }
    return v;
}

}  // namespace

PureState haar_pure(const SystemShape& shape, std::uint64_t seed, SamplingMeasure measure) {
    std::mt19937_64 rng(seed);
    if (measure == SamplingMeasure::haar) return PureState::normalized(shape, gaussian_vector(rng, shape.total()));
    std::vector<CVector> factors;
    for (int d : shape.dims()) {
        CVector f = gaussian_vector(rng, static_cast<std::size_t>(d));
        factors.push_back(f / f.norm());
    }
    return tensor_product(factors, shape);
}

namespace {

constexpr std::uint64_t kChunk = 4096;

void check_sweep_shape(const SystemShape& shape) {
    const bool ok = shape.factor_count() == 3 && shape.dim(0) == 2 && shape.dim(1) == 2 &&
                    (shape.dim(2) == 3 || shape.dim(2) == 4);
    if (!ok) throw DimensionError("positivity_sweep: supported shapes are 2x2x3 and 2x2x4");
}

struct Partial {
    double min_value = std::numeric_limits<double>::infinity();
    std::uint64_t argmin = 0;
    std::uint64_t negative = 0;
    double sum = 0.0;
    std::vector<std::pair<std::uint64_t, PureState>> negatives;
};

Partial sweep_chunk(const SystemShape& shape, std::uint64_t begin, std::uint64_t end, std::uint64_t seed,
                    const SweepOptions& opts) {
    Partial p;
    for (std::uint64_t i = begin; i < end; ++i) {
        const PureState s = haar_pure(shape, derive_seed(seed, i), opts.measure);
        const double v = i_residual_tangle(s, opts.rank_tol);
        p.sum += v;
        if (v < p.min_value) {
            p.min_value = v;
            p.argmin = i;
        }
        if (v < kNegativeThreshold) {
            ++p.negative;
            p.negatives.emplace_back(i, s);
        }
    }
    return p;
}

SweepResult merge(const SystemShape& shape, std::uint64_t samples, std::uint64_t seed, const SweepOptions& opts,
                  std::vector<Partial>& chunks) {
    SweepResult r;
    r.samples = samples;
    r.min_value = std::numeric_limits<double>::infinity();
    for (auto& c : chunks) {  // chunk order is sample order
        r.sum += c.sum;
        r.negative_count += c.negative;
        if (c.min_value < r.min_value) {
            r.min_value = c.min_value;
            r.argmin_index = c.argmin;
        }
        for (auto& [idx, st] : c.negatives) r.counterexamples.push_back(std::move(st));
    }
    r.argmin_state = haar_pure(shape, derive_seed(seed, r.argmin_index), opts.measure);
    return r;
}

}  // namespace

SweepResult positivity_sweep_serial(const SystemShape& shape, std::uint64_t samples, std::uint64_t seed,
                                    const SweepOptions& opts) {
    check_sweep_shape(shape);
    if (samples < 1) throw std::invalid_argument("positivity_sweep: samples must be at least 1");
    const std::uint64_t n_chunks = (samples + kChunk - 1) / kChunk;
    std::vector<Partial> chunks;
    chunks.reserve(n_chunks);
    for (std::uint64_t c = 0; c < n_chunks; ++c)
        chunks.push_back(sweep_chunk(shape, c * kChunk, std::min(samples, (c + 1) * kChunk), seed, opts));
    return merge(shape, samples, seed, opts, chunks);
}

SweepResult positivity_sweep(const SystemShape& shape, std::uint64_t samples, std::uint64_t seed,
                             const SweepOptions& opts) {
    if (!opts.parallel) return positivity_sweep_serial(shape, samples, seed, opts);
    check_sweep_shape(shape);
    if (samples < 1) throw std::invalid_argument("positivity_sweep: samples must be at least 1");
    const auto n_chunks = static_cast<std::int64_t>((samples + kChunk - 1) / kChunk);
    std::vector<Partial> chunks(static_cast<std::size_t>(n_chunks));
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        const auto begin = static_cast<std::uint64_t>(c) * kChunk;
        chunks[static_cast<std::size_t>(c)] = sweep_chunk(shape, begin, std::min(samples, begin + kChunk), seed, opts);
    }
    return merge(shape, samples, seed, opts, chunks);
}

void write_state_dump(std::ostream& out, const SystemShape& shape, const std::vector<PureState>& states) {
    out << "dims";
    for (int d : shape.dims()) out << ' ' << d;
    out << '\n';
    std::ostringstream line;
    line << std::setprecision(17);
    for (const auto& s : states) {
        if (!(s.shape() == shape)) throw DimensionError("write_state_dump: state shape differs from header");
        line.str("");
        for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
            if (i) line << ' ';
            line << '(' << s.amplitudes()(i).real() << ',' << s.amplitudes()(i).imag() << ')';
        }
        out << line.str() << '\n';
    }
}

std::vector<PureState> read_state_dump(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("read_state_dump: missing header");
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag != "dims") throw std::runtime_error("read_state_dump: header must start with 'dims'");
    std::vector<int> dims;
    for (int d; hs >> d;) dims.push_back(d);
    const SystemShape shape(dims);
    std::vector<PureState> states;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        CVector amps(static_cast<Eigen::Index>(shape.total()));
        for (Eigen::Index i = 0; i < amps.size(); ++i) {
            char open = 0, comma = 0, close = 0;
            double re = 0.0, im = 0.0;
            if (!(ls >> open >> re >> comma >> im >> close) || open != '(' || comma != ',' || close != ')')
                throw std::runtime_error("read_state_dump: malformed amplitude");
            amps(i) = cplx(re, im);
        }
        states.push_back(PureState::normalized(shape, amps));
    }
    return states;
}

}  // namespace tcm
