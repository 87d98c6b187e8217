#include "reviewlens/embedding.hpp"

#include <charconv>
#include <cmath>
#include <mutex>

#include "reviewlens/error.hpp"
#include "reviewlens/json.hpp"
#include "reviewlens/text.hpp"

namespace reviewlens {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v)) throw EmbeddingError("embedding contains a non-finite component");
    }
}

double EmbeddingVector::norm() const noexcept {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
}

EmbeddingVector EmbeddingVector::normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw EmbeddingError("degenerate embedding: zero norm");
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i] / n;
    return EmbeddingVector(std::move(out));
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) throw EmbeddingError("embedding dimension mismatch");
    const auto x = a.values();
    const auto y = b.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum;
}

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t feature_hash(char kind, std::string_view feature, std::uint64_t seed) {
    std::uint64_t h = kFnvOffset ^ mix(seed);
    h = (h ^ static_cast<unsigned char>(kind)) * kFnvPrime;
    for (char c : feature) h = (h ^ static_cast<unsigned char>(c)) * kFnvPrime;
    return mix(h);
}

}  // namespace

HashingEmbeddingProvider::HashingEmbeddingProvider(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
    if (dim < 8) throw ValidationError("embedder.dim", "must be at least 8");
}

EmbeddingVector HashingEmbeddingProvider::embed(std::string_view input) const {
    const std::string lowered = text::lower(input);
    const auto ws = text::words(lowered);
    if (ws.empty()) throw EmbeddingError("cannot embed empty text");

    std::vector<double> v(dim_, 0.0);
    auto add = [&](char kind, std::string_view feature) {
        const std::uint64_t h = feature_hash(kind, feature, seed_);
        const double sign = (h >> 63) ? -1.0 : 1.0;
        v[h % dim_] += sign;
    };

    std::string padded = " ";
    for (auto w : ws) {
        add('w', w);
        padded.append(w);
        padded.push_back(' ');
    }
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) add('g', std::string_view(padded).substr(i, 3));

    return EmbeddingVector(std::move(v)).normalized();
}

PrecomputedEmbeddingProvider::PrecomputedEmbeddingProvider(
    std::unordered_map<std::string, EmbeddingVector> table)
    : table_(std::move(table)) {
    for (const auto& [key, vec] : table_) {
        if (dim_ == 0) dim_ = vec.dim();
        if (vec.dim() != dim_ || vec.dim() == 0) {
            throw DataError("embedding dimension mismatch at '" + key + "'");
        }
    }
}

EmbeddingVector PrecomputedEmbeddingProvider::embed(std::string_view text) const {
    const auto it = table_.find(embedding_key(text));
    if (it == table_.end()) {
        throw EmbeddingError("no precomputed embedding for '" + std::string(text) + "'");
    }
    return it->second;
}

std::unique_ptr<EmbeddingProvider> builtin_deterministic_provider(std::size_t dim, std::uint64_t seed) {
    return std::make_unique<HashingEmbeddingProvider>(dim, seed);
}

std::unique_ptr<EmbeddingProvider> load_precomputed_provider(const std::filesystem::path& path) {
    std::unordered_map<std::string, EmbeddingVector> table;
    std::size_t dim = 0;
    io::for_each_jsonl(path, [&](const Json& row, std::size_t line) {
        const auto& text = row.at("text");
        const auto& vec = row.at("vec");
        if (!text.is_string() || !vec.is_array()) throw DataError("expected {\"text\": str, \"vec\": [...]}");
        std::vector<double> values;
        values.reserve(vec.size());
        for (const auto& x : vec) {
            if (!x.is_number()) throw DataError("vector components must be numbers");
            values.push_back(x.get<double>());
        }
        if (values.empty()) throw DataError("empty vector");
        if (dim == 0) dim = values.size();
        if (values.size() != dim) {
            throw DataError("dimension mismatch: expected " + std::to_string(dim) + ", got " +
                            std::to_string(values.size()) + " at line " + std::to_string(line));
        }
        table.insert_or_assign(embedding_key(text.get<std::string>()), EmbeddingVector(std::move(values)));
    });
    if (table.empty()) throw DataError("embedding file '" + path.string() + "' has no rows");
    return std::make_unique<PrecomputedEmbeddingProvider>(std::move(table));
}

std::unique_ptr<EmbeddingProvider> provider_from_spec(std::string_view spec) {
    const auto parts = text::split(spec, ":");
    auto parse = [&](const std::string& s, std::uint64_t& out) {
        const auto* end = s.data() + s.size();
        const auto [ptr, ec] = std::from_chars(s.data(), end, out);
        return ec == std::errc() && ptr == end && !s.empty();
    };
    std::uint64_t dim = 0;
    std::uint64_t seed = 0;
    if (parts.size() != 3 || parts[0] != "builtin" || !parse(parts[1], dim) || !parse(parts[2], seed)) {
        throw ValidationError("embedder", "expected builtin:<dim>:<seed>, got '" + std::string(spec) + "'");
    }
    return builtin_deterministic_provider(dim, seed);
}

std::string embedding_key(std::string_view text) { return std::string(text::trim(text)); }

EmbeddingCache::Entry EmbeddingCache::find(const std::string& key) const {
    std::shared_lock lock(mutex_);
    const auto it = map_.find(key);
    if (it == map_.end()) {
        misses_.fetch_add(1, std::memory_order_relaxed);
        return nullptr;
    }
    hits_.fetch_add(1, std::memory_order_relaxed);
    return it->second;
}

EmbeddingCache::Entry EmbeddingCache::insert(const std::string& key, EmbeddingVector unit) {
    auto entry = std::make_shared<const EmbeddingVector>(std::move(unit));
    std::unique_lock lock(mutex_);
    const auto [it, fresh] = map_.emplace(key, std::move(entry));
    return it->second;
}

std::size_t EmbeddingCache::size() const {
    std::shared_lock lock(mutex_);
    return map_.size();
}

EmbeddingCache::Entry Similarity::unit(std::string_view text) const {
    std::string key = embedding_key(text);
    if (key.empty()) throw EmbeddingError("cannot embed empty text");
    if (cache_) {
        if (auto hit = cache_->find(key)) return hit;
    }
    EmbeddingVector unit = provider_->embed(key).normalized();
    if (unit.dim() != provider_->dim()) throw EmbeddingError("provider returned a vector of the wrong dimension");
    if (cache_) return cache_->insert(key, std::move(unit));
    return std::make_shared<const EmbeddingVector>(std::move(unit));
}

double Similarity::operator()(std::string_view a, std::string_view b) const {
    return dot(*unit(a), *unit(b));
}

double sim_st(std::string_view a, std::string_view b, const EmbeddingProvider& p, EmbeddingCache* c) {
    return Similarity(p, c)(a, b);
}

}  // namespace reviewlens
