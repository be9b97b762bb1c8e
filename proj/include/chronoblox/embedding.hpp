#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "chronoblox/similarity.hpp"

namespace chronoblox {

struct WalkConfig {
  int walks_per_node = 10;
  int walk_length = 80;
  double p = 1.0;  // return parameter
  double q = 1.0;  // in-out parameter
  int threads = 1;
};

/// Sentences of global group indices (positions in SimilarityMatrix::order).
struct WalkCorpus {
  std::vector<GroupId> vocabulary;
  std::vector<std::vector<int>> sentences;

  std::size_t token_count() const;
};

/// Node2Vec walks over the similarity graph. Transition weights are the raw
/// similarities scaled by 1/p (return), 1 (distance one from the previous
/// node) or 1/q (outward). Each walk owns an RNG stream derived from
/// (seed, start node, walk number), so the corpus does not depend on the
/// thread count.
WalkCorpus random_walks(const SimilarityMatrix& m, const WalkConfig& config, std::uint64_t seed);

struct SkipGramConfig {
  int dim = 64;
  int window = 10;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;
  /// Single-threaded and bit-reproducible when true; otherwise lock-free
  /// (Hogwild) updates across `threads` workers.
  bool deterministic = true;
  int threads = 0;
};

struct GroupEmbedding {
  int dim = 0;
  std::vector<GroupId> groups;
  std::vector<double> data;  // row-major, groups.size() x dim
  /// Mean negative-sampling loss per training pair, one value per epoch.
  std::vector<double> epoch_loss;

  std::size_t size() const { return groups.size(); }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Skip-gram with negative sampling (noise ~ frequency^0.75), learning rate
/// decaying linearly from lr to lr/10, vectors initialised uniformly in
/// [-0.5/dim, 0.5/dim]. Returns the input vectors only.
GroupEmbedding skipgram_train(const WalkCorpus& corpus, const SkipGramConfig& config,
                              std::uint64_t seed);

double cosine(std::span<const double> a, std::span<const double> b);

void write_corpus(std::ostream& out, const WalkCorpus& corpus);
void write_embedding_csv(std::ostream& out, const GroupEmbedding& emb);

}  // namespace chronoblox
