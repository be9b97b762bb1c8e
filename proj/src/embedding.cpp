#include "chronoblox/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "chronoblox/random.hpp"

namespace chronoblox {

namespace {

using Adjacency = std::vector<std::vector<std::pair<int, double>>>;

bool adjacent(const Adjacency& adj, int a, int b) {
  const auto& row = adj[a];
  auto it = std::lower_bound(row.begin(), row.end(), std::pair(b, -1.0));
  return it != row.end() && it->first == b;
}

int sample_index(std::span<const double> cumulative, Rng& rng) {
  const double r = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
  if (it == cumulative.end()) --it;
  return static_cast<int>(it - cumulative.begin());
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers =
      std::clamp<std::size_t>(threads <= 0 ? 1 : static_cast<std::size_t>(threads), 1, n == 0 ? 1 : n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::size_t WalkCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

WalkCorpus random_walks(const SimilarityMatrix& m, const WalkConfig& config, std::uint64_t seed) {
  if (m.size() == 0) throw std::invalid_argument("random_walks: empty similarity matrix");
  if (config.walks_per_node < 1 || config.walk_length < 1)
    throw std::invalid_argument("random_walks: walks_per_node and walk_length must be >= 1");
  if (!(config.p > 0.0) || !(config.q > 0.0))
    throw std::invalid_argument("random_walks: p and q must be positive");

  const auto adj = m.adjacency();
  const std::size_t n = m.size();
  const bool first_order = config.p == 1.0 && config.q == 1.0;

  std::vector<std::vector<double>> cumulative(n);
  for (std::size_t v = 0; v < n; ++v) {
    double acc = 0.0;
    for (const auto& [_, w] : adj[v]) cumulative[v].push_back(acc += w);
  }

  WalkCorpus corpus;
  corpus.vocabulary = m.order();
  corpus.sentences.resize(n * static_cast<std::size_t>(config.walks_per_node));

  // Start order is reshuffled per round; sentence slot = round * n + position.
  std::vector<std::pair<int, std::size_t>> jobs;
  jobs.reserve(corpus.sentences.size());
  for (int r = 0; r < config.walks_per_node; ++r) {
    std::vector<int> starts(n);
    std::iota(starts.begin(), starts.end(), 0);
    Rng order_rng(derive_seed(seed, 0x6f726472ULL, static_cast<std::uint64_t>(r)));
    order_rng.shuffle(starts);
    for (std::size_t pos = 0; pos < n; ++pos)
      jobs.emplace_back(starts[pos], static_cast<std::size_t>(r) * n + pos);
  }

  parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
    const auto [start, slot] = jobs[j];
    const std::uint64_t round = slot / n;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(start), round));
    auto& walk = corpus.sentences[slot];
    walk.reserve(config.walk_length);
    walk.push_back(start);
    std::vector<double> biased;
    while (static_cast<int>(walk.size()) < config.walk_length) {
      const int cur = walk.back();
      if (adj[cur].empty()) break;
      int next;
      if (first_order || walk.size() == 1) {
        next = adj[cur][sample_index(cumulative[cur], rng)].first;
      } else {
        const int prev = walk[walk.size() - 2];
        biased.clear();
        double acc = 0.0;
        for (const auto& [x, w] : adj[cur]) {
          double alpha = 1.0 / config.q;
          if (x == prev)
            alpha = 1.0 / config.p;
          else if (adjacent(adj, prev, x))
            alpha = 1.0;
          biased.push_back(acc += w * alpha);
        }
        next = adj[cur][sample_index(biased, rng)].first;
      }
      walk.push_back(next);
    }
  });
  return corpus;
}

GroupEmbedding skipgram_train(const WalkCorpus& corpus, const SkipGramConfig& config,
                              std::uint64_t seed) {
  if (corpus.sentences.empty() || corpus.token_count() == 0)
    throw std::invalid_argument("skipgram_train: empty corpus");
  if (config.dim < 1 || config.window < 1 || config.negatives < 0 || config.epochs < 1)
    throw std::invalid_argument("skipgram_train: invalid configuration");

  const std::size_t vocab = corpus.vocabulary.size();
  const auto dim = static_cast<std::size_t>(config.dim);

  std::vector<double> counts(vocab, 0.0);
  for (const auto& s : corpus.sentences) {
    for (int w : s) {
      if (w < 0 || static_cast<std::size_t>(w) >= vocab)
        throw std::invalid_argument("skipgram_train: token outside vocabulary");
      counts[w] += 1.0;
    }
  }
  std::vector<double> noise_cdf(vocab);
  {
    double acc = 0.0;
    for (std::size_t i = 0; i < vocab; ++i) noise_cdf[i] = acc += std::pow(counts[i], 0.75);
  }

  GroupEmbedding emb;
  emb.dim = config.dim;
  emb.groups = corpus.vocabulary;
  emb.data.resize(vocab * dim);
  std::vector<double> context(vocab * dim, 0.0);
  {
    Rng init(derive_seed(seed, 0x696e6974ULL));
    const double half = 0.5 / static_cast<double>(config.dim);
    for (auto& x : emb.data) x = init.uniform(-half, half);
  }

  const std::size_t tokens = corpus.token_count();
  const double total_steps = static_cast<double>(tokens) * config.epochs;
  std::atomic<std::size_t> processed{0};

  auto train_range = [&](std::size_t first, std::size_t stride, Rng& rng, double& loss,
                         std::size_t& pairs) {
    std::vector<double> grad(dim);
    for (std::size_t si = first; si < corpus.sentences.size(); si += stride) {
      const auto& sentence = corpus.sentences[si];
      const auto len = static_cast<std::ptrdiff_t>(sentence.size());
      for (std::ptrdiff_t pos = 0; pos < len; ++pos) {
        const double progress = static_cast<double>(processed.fetch_add(1, std::memory_order_relaxed)) / total_steps;
        const double alpha = config.lr * (1.0 - 0.9 * std::min(progress, 1.0));
        const int word = sentence[pos];
        const auto reach = static_cast<std::ptrdiff_t>(config.window - rng.below(config.window));
        for (std::ptrdiff_t c = std::max<std::ptrdiff_t>(0, pos - reach);
             c <= std::min(len - 1, pos + reach); ++c) {
          if (c == pos) continue;
          double* in = emb.data.data() + static_cast<std::size_t>(sentence[c]) * dim;
          std::fill(grad.begin(), grad.end(), 0.0);
          for (int d = 0; d <= config.negatives; ++d) {
            int target;
            double label;
            if (d == 0) {
              target = word;
              label = 1.0;
            } else {
              target = sample_index(noise_cdf, rng);
              if (target == word) continue;
              label = 0.0;
            }
            double* out = context.data() + static_cast<std::size_t>(target) * dim;
            double f = 0.0;
            for (std::size_t k = 0; k < dim; ++k) f += in[k] * out[k];
            const double s = sigmoid(f);
            loss -= std::log(std::max(label > 0.0 ? s : 1.0 - s, 1e-300));
            ++pairs;
            const double g = (label - s) * alpha;
            for (std::size_t k = 0; k < dim; ++k) grad[k] += g * out[k];
            for (std::size_t k = 0; k < dim; ++k) out[k] += g * in[k];
          }
          for (std::size_t k = 0; k < dim; ++k) in[k] += grad[k];
        }
      }
    }
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss = 0.0;
    std::size_t pairs = 0;
    if (config.deterministic) {
      Rng rng(derive_seed(seed, 0x73677264ULL, static_cast<std::uint64_t>(epoch)));
      train_range(0, 1, rng, loss, pairs);
    } else {
      const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
      const std::size_t workers = config.threads > 0 ? config.threads : hw;
      std::vector<double> losses(workers, 0.0);
      std::vector<std::size_t> counts_per(workers, 0);
      {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(epoch), w + 1));
            train_range(w, workers, rng, losses[w], counts_per[w]);
          });
        }
      }
      for (std::size_t w = 0; w < workers; ++w) {
        loss += losses[w];
        pairs += counts_per[w];
      }
    }
    emb.epoch_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
  }
  return emb;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

void write_corpus(std::ostream& out, const WalkCorpus& corpus) {
  for (const auto& s : corpus.sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out << ' ';
      out << to_string(corpus.vocabulary[s[i]]);
    }
    out << '\n';
  }
}

void write_embedding_csv(std::ostream& out, const GroupEmbedding& emb) {
  out << "phase,group";
  for (int k = 0; k < emb.dim; ++k) out << ",v" << k;
  out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < emb.size(); ++i) {
    out << emb.groups[i].phase << ',' << emb.groups[i].local;
    for (double x : emb.row(i)) out << ',' << x;
    out << '\n';
  }
}

}  // namespace chronoblox
