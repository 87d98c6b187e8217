#pragma once

// Straight-line re-implementations used as test oracles. They share no code
// with the library beyond the raw provider output.

#include <string>
#include <utility>
#include <vector>

#include "reviewlens/embedding.hpp"

namespace oracle {

/// Cosine over raw vectors, computed from scratch.
double cosine(const std::vector<double>& a, const std::vector<double>& b);
double cosine(const reviewlens::EmbeddingProvider& p, const std::string& a, const std::string& b);

struct Scored {
    std::string topic;  // empty: no topic
    double score = 0.0;
};

/// Rule cascade written out branch by branch. Returns (rule name, topic).
std::pair<std::string, std::string> cascade(const Scored& tkw, const Scored& n, const Scored& mkw, const Scored& avg,
                                            double delta_h, double delta_m, double delta_avg);

struct Topic {
    std::string id;
    std::string name;
    std::vector<std::string> keywords;
};

struct Signals {
    Scored n, tkw, mkw, avg;
};

/// All four signals by exhaustive computation over the candidate topics.
Signals signals(const reviewlens::EmbeddingProvider& p, const std::string& segment, const std::vector<Topic>& topics,
                std::size_t k);

/// Highest similarity among surviving pairs within one list.
double max_pair_similarity(const reviewlens::EmbeddingProvider& p, const std::vector<std::string>& words);

/// Highest similarity between keywords of different lists.
double max_cross_similarity(const reviewlens::EmbeddingProvider& p,
                            const std::vector<std::vector<std::string>>& lists);

}  // namespace oracle
