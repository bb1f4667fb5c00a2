#include "qslam/composition.hpp"

#include "qslam/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <atomic>
#include <thread>

namespace qslam {

std::string to_string(CompositionMode m) { return m == CompositionMode::probabilistic ? "prob" : "det"; }

CompositionMode composition_mode_from_string(const std::string& s)
{
    if (s == "prob" || s == "probabilistic")
        return CompositionMode::probabilistic;
    if (s == "det" || s == "deterministic")
        return CompositionMode::deterministic;
    throw ArgumentError("unknown composition mode '" + s + "'");
}

double CompositionTensor::at(std::size_t i, std::size_t j, std::size_t k) const
{
    if (i >= d_ || j >= d_ || k >= d_)
        throw ArgumentError("tensor index out of range");
    return (*this)(i, j, k);
}

void CompositionTensor::set(std::size_t i, std::size_t j, std::size_t k, double v)
{
    if (i >= d_ || j >= d_ || k >= d_)
        throw ArgumentError("tensor index out of range");
    dense_[(i * d_ + j) * d_ + k] = v;
}

std::size_t CompositionTensor::nonzero_count() const
{
    return std::size_t(std::count_if(dense_.begin(), dense_.end(), [](double v) { return v != 0.0; }));
}

double CompositionTensor::sum() const { return std::accumulate(dense_.begin(), dense_.end(), 0.0); }

std::vector<CompositionTensor::Entry> CompositionTensor::entries() const
{
    std::vector<Entry> out;
    for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t j = 0; j < d_; ++j)
            for (std::size_t k = 0; k < d_; ++k)
                if (double v = (*this)(i, j, k); v != 0.0)
                    out.push_back({std::uint32_t(i), std::uint32_t(j), std::uint32_t(k), v});
    return out;
}

void CompositionTensor::normalize()
{
    double s = sum();
    if (s > 0.0)
        for (double& v : dense_)
            v /= s;
}

// ---------------------------------------------------------------------------
// QCT1 binary format, little-endian:
//   "QCT1" | u32 name length | name bytes | u32 d | u8 mode | u64 sample_count | u64 seed | u64 n
//   n records of (u32 i, u32 j, u32 k, f64 value), 0-based indices

namespace {

static_assert(std::endian::native == std::endian::little, "QCT1 writer assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const std::filesystem::path& path)
{
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in)
        throw ParseError(path.string() + ": truncated tensor file", 0);
    return v;
}

} // namespace

void CompositionTensor::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write tensor file " + path.string());
    out.write("QCT1", 4);
    put<std::uint32_t>(out, std::uint32_t(partition_name.size()));
    out.write(partition_name.data(), std::streamsize(partition_name.size()));
    put<std::uint32_t>(out, std::uint32_t(d_));
    put<std::uint8_t>(out, mode == CompositionMode::probabilistic ? 0 : 1);
    put<std::uint64_t>(out, sample_count);
    put<std::uint64_t>(out, seed);
    auto nz = entries();
    put<std::uint64_t>(out, nz.size());
    for (const Entry& e : nz) {
        put(out, e.i);
        put(out, e.j);
        put(out, e.k);
        put(out, e.value);
    }
}

CompositionTensor CompositionTensor::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open tensor file " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "QCT1", 4) != 0)
        throw ParseError(path.string() + ": not a QCT1 tensor file", 0);
    auto name_len = get<std::uint32_t>(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    auto d = get<std::uint32_t>(in, path);
    if (d == 0 || d > 4096)
        throw ParseError(path.string() + ": implausible tensor dimension", std::size_t(in.tellg()));
    CompositionTensor t(d);
    t.partition_name = name;
    t.mode = get<std::uint8_t>(in, path) == 0 ? CompositionMode::probabilistic : CompositionMode::deterministic;
    t.sample_count = get<std::uint64_t>(in, path);
    t.seed = get<std::uint64_t>(in, path);
    auto n = get<std::uint64_t>(in, path);
    for (std::uint64_t r = 0; r < n; ++r) {
        auto offset = std::size_t(in.tellg());
        auto i = get<std::uint32_t>(in, path);
        auto j = get<std::uint32_t>(in, path);
        auto k = get<std::uint32_t>(in, path);
        auto v = get<double>(in, path);
        if (i >= d || j >= d || k >= d)
            throw ParseError(path.string() + ": tensor index out of range", offset);
        t.set(i, j, k, v);
    }
    return t;
}

nlohmann::json CompositionTensor::to_json() const
{
    nlohmann::json j{{"partition", partition_name}, {"d", d_}, {"mode", to_string(mode)},
                     {"sample_count", sample_count}, {"seed", seed}, {"entries", nlohmann::json::array()}};
    for (const Entry& e : entries())
        j["entries"].push_back({e.i + 1, e.j + 1, e.k + 1, e.value});
    return j;
}

// ---------------------------------------------------------------------------

namespace {

// Half-plane of the frame coordinates expressed in the target coordinates of `map`.
HalfPlane map_half_plane(const FrameMap& map, const HalfPlane& h)
{
    // q = inverse(p); n.q + c >= 0  ->  (R n).(p - origin) + c * s >= 0, with R n = (n.x ex + n.y ey) / s
    double s = norm(map.ey);
    Vec2 n = (h.a * map.ex + h.b * map.ey) / s;
    return {n.x, n.y, h.c * s - dot(n, map.origin)};
}

struct ClippedPiece {
    std::size_t state;
    Polygon poly;
    Box bbox;
};

struct BcPiece {
    std::size_t state;
    std::vector<HalfPlane> bounds;
};

void accumulate_region(const SpacePartition& sp, const std::vector<ClippedPiece>& ab,
                       const std::vector<BcPiece>& bc, std::size_t i, const TensorBuildOptions& opt,
                       std::vector<double>& slice)
{
    const std::size_t d = sp.size();
    Rng rng = stream_rng(opt.seed, i);
    const Vec2 B{0.0, 1.0};
    const Polygon box = sp.borders().polygon();
    std::vector<HalfPlane> mapped;
    Polygon scratch, work;
    std::vector<char> hit(d * d);
    for (std::size_t n = 0; n < opt.samples_per_region; ++n) {
        Vec2 c = sp.sample_one(i, rng);
        while (distance(c, B) < 1e-6)
            c = sp.sample_one(i, rng);
        FrameMap map = FrameMap::spanning(B, c);
        std::fill(hit.begin(), hit.end(), 0);
        for (const BcPiece& q : bc) {
            mapped.clear();
            for (const HalfPlane& h : q.bounds)
                mapped.push_back(map_half_plane(map, h));
            Polygon region = clip(box, mapped);
            if (region.empty())
                continue;
            Box rb = bounding_box(region);
            for (const ClippedPiece& p : ab) {
                if (!rb.overlaps(p.bbox))
                    continue;
                work = p.poly;
                for (const HalfPlane& h : mapped) {
                    clip(work, h, scratch);
                    if (work.size() < 3)
                        break;
                }
                if (work.size() < 3)
                    continue;
                double a = area(work);
                if (a <= opt.min_area)
                    continue;
                if (opt.mode == CompositionMode::probabilistic)
                    slice[q.state * d + p.state] += a;
                else
                    hit[q.state * d + p.state] = 1;
            }
        }
        if (opt.mode == CompositionMode::deterministic)
            for (std::size_t jk = 0; jk < d * d; ++jk)
                if (hit[jk])
                    slice[jk] = 1.0;
    }
}

} // namespace

CompositionTensor build_tensor(const SpacePartition& sp, const TensorBuildOptions& opt)
{
    if (opt.samples_per_region < 1)
        throw ArgumentError("samples_per_region must be at least 1");
    const std::size_t d = sp.size();
    std::vector<ClippedPiece> ab;
    std::vector<BcPiece> bc;
    for (std::size_t s = 0; s < d; ++s) {
        for (const Polygon& poly : sp.region(s).clipped)
            ab.push_back({s, poly, bounding_box(poly)});
        for (const ConvexPiece& piece : sp.region(s).pieces) {
            BcPiece q{s, piece.bounds()};
            if (opt.clip_bc_regions)
                for (const HalfPlane& h : sp.borders().half_planes())
                    q.bounds.push_back(h);
            bc.push_back(std::move(q));
        }
    }

    std::vector<std::vector<double>> slices(d, std::vector<double>(d * d, 0.0));
    unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, unsigned(d)));
    if (threads == 1) {
        for (std::size_t i = 0; i < d; ++i)
            accumulate_region(sp, ab, bc, i, opt, slices[i]);
    } else {
        std::vector<std::jthread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < d; i = next++)
                    accumulate_region(sp, ab, bc, i, opt, slices[i]);
            });
    }

    CompositionTensor t(d);
    t.partition_name = sp.name();
    t.mode = opt.mode;
    t.sample_count = opt.samples_per_region;
    t.seed = opt.seed;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t jk = 0; jk < d * d; ++jk)
            if (slices[i][jk] != 0.0)
                t.set(i, jk / d, jk % d, slices[i][jk]);
    t.normalize();
    return t;
}

double joint_probability(const CompositionTensor& t, const StateVector& v1, const StateVector& v2,
                         const StateVector& v3, std::size_t i, std::size_t j, std::size_t k)
{
    return v1[i] * v2[j] * v3[k] * t.at(i, j, k);
}

MarginalResult marginal_onto(const CompositionTensor& t, int slot, const StateVector& first, const StateVector& second)
{
    const std::size_t d = t.dim();
    if (first.size() != d || second.size() != d)
        throw ArgumentError("belief size does not match tensor dimension");
    if (slot < 0 || slot > 2)
        throw ArgumentError("tensor slot must be 0, 1 or 2");
    std::vector<double> out(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) {
                double v = t(i, j, k);
                if (v == 0.0)
                    continue;
                switch (slot) {
                case 0: out[i] += v * first[j] * second[k]; break;
                case 1: out[j] += v * first[i] * second[k]; break;
                default: out[k] += v * first[i] * second[j]; break;
                }
            }
    MarginalResult r{StateVector(std::move(out)), true};
    r.informative = r.belief.normalize();
    return r;
}

} // namespace qslam
