#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace reviewlens {

/// A finite real vector. Construction rejects NaN and infinite components.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<double> values);

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double norm() const noexcept;
    /// Unit-length copy. Throws EmbeddingError on a zero vector.
    EmbeddingVector normalized() const;

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<double> values_;
};

double dot(const EmbeddingVector& a, const EmbeddingVector& b);

/// Maps text to a fixed-dimension vector. Implementations are deterministic
/// and read-only after construction, so one instance may be shared by threads.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dim() const noexcept = 0;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
};

/// Feature-hashing embedder over character 3-grams and whitespace tokens of
/// the lowercased text. Stands in for a sentence encoder wherever only cosine
/// structure matters.
class HashingEmbeddingProvider final : public EmbeddingProvider {
public:
    HashingEmbeddingProvider(std::size_t dim, std::uint64_t seed);

    std::size_t dim() const noexcept override { return dim_; }
    EmbeddingVector embed(std::string_view text) const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Answers only texts listed in an embedding file (JSON Lines {"text","vec"}).
class PrecomputedEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit PrecomputedEmbeddingProvider(std::unordered_map<std::string, EmbeddingVector> table);

    std::size_t dim() const noexcept override { return dim_; }
    EmbeddingVector embed(std::string_view text) const override;
    std::size_t size() const noexcept { return table_.size(); }

private:
    std::unordered_map<std::string, EmbeddingVector> table_;
    std::size_t dim_ = 0;
};

/// Requires dim >= 8.
std::unique_ptr<EmbeddingProvider> builtin_deterministic_provider(std::size_t dim, std::uint64_t seed);
std::unique_ptr<EmbeddingProvider> load_precomputed_provider(const std::filesystem::path& path);

/// Parses "builtin:<dim>:<seed>".
std::unique_ptr<EmbeddingProvider> provider_from_spec(std::string_view spec);

/// Canonical cache / lookup key: the text with surrounding whitespace removed.
std::string embedding_key(std::string_view text);

/// Text-keyed store of unit-normalized embeddings. Concurrent readers share a
/// lock; writers serialize. Two threads may both compute a missing entry, and
/// the first insertion wins.
class EmbeddingCache {
public:
    using Entry = std::shared_ptr<const EmbeddingVector>;

    Entry find(const std::string& key) const;
    Entry insert(const std::string& key, EmbeddingVector unit);

    std::size_t size() const;
    std::size_t hits() const noexcept { return hits_.load(std::memory_order_relaxed); }
    std::size_t misses() const noexcept { return misses_.load(std::memory_order_relaxed); }

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, Entry> map_;
    mutable std::atomic<std::size_t> hits_{0};
    mutable std::atomic<std::size_t> misses_{0};
};

/// Provider plus optional cache: the handle every similarity-driven algorithm
/// takes. Results are identical with and without a cache.
class Similarity {
public:
    explicit Similarity(const EmbeddingProvider& provider, EmbeddingCache* cache = nullptr) noexcept
        : provider_(&provider), cache_(cache) {}

    /// Unit-normalized embedding of `text`. Throws EmbeddingError on empty
    /// text or a degenerate provider output.
    EmbeddingCache::Entry unit(std::string_view text) const;

    /// Cosine similarity of the two texts' embeddings.
    double operator()(std::string_view a, std::string_view b) const;

    const EmbeddingProvider& provider() const noexcept { return *provider_; }
    EmbeddingCache* cache() const noexcept { return cache_; }

private:
    const EmbeddingProvider* provider_;
    EmbeddingCache* cache_;
};

/// cos(embed(a), embed(b)), caching both embeddings when a cache is supplied.
double sim_st(std::string_view a, std::string_view b, const EmbeddingProvider& p, EmbeddingCache* c);

}  // namespace reviewlens
