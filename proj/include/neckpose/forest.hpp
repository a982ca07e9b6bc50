#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "neckpose/detail/text.hpp"
#include "neckpose/error.hpp"

// Random Forest of CART classification trees grown on Gini impurity.
// Class labels are dense indices [0, n_classes); lower indices win ties.

namespace neckpose {

using FeatureRow = std::vector<double>;

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_samples_split = 2;
  std::size_t features_per_split = 0;  // 0 = floor(sqrt(d))
  std::uint64_t seed = 42;

  bool operator==(const ForestParams&) const = default;

  std::size_t resolved_features(std::size_t d) const {
    if (features_per_split != 0) return features_per_split;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
  }
};

/// Gini impurity 1 - sum p_i^2 of a class histogram.
inline double gini(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw DomainError("Gini impurity of an empty node");
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;  // rows with x[feature] <= threshold go left
  double decrease = 0.0;   // weighted Gini decrease

  bool operator==(const Split&) const = default;
};

/// Smallest Gini decrease that counts as an improvement; absorbs rounding
/// in splits that leave the class mix unchanged.
inline constexpr double kMinGiniDecrease = 1e-12;

/// Threshold between two consecutive distinct sorted values.
inline double split_midpoint(double lo, double hi) {
  const double mid = (lo + hi) / 2.0;
  return mid < hi ? mid : lo;
}

/// Exhaustive best split over `features` for the node holding `rows`
/// (indices into x/y, duplicates allowed). Ties go to the lowest feature
/// index, then the lowest threshold.
inline std::optional<Split> best_split(std::span<const FeatureRow> x, std::span<const std::size_t> y,
                                       std::span<const std::size_t> rows, std::span<const std::size_t> features,
                                       std::size_t n_classes) {
  const std::size_t n = rows.size();
  if (n < 2 || features.empty()) return std::nullopt;
  std::vector<std::size_t> parent(n_classes, 0);
  for (auto r : rows) ++parent[y[r]];
  const double parent_gini = gini(parent);
  if (parent_gini == 0.0) return std::nullopt;

  std::vector<std::size_t> sorted_features(features.begin(), features.end());
  std::sort(sorted_features.begin(), sorted_features.end());
  sorted_features.erase(std::unique(sorted_features.begin(), sorted_features.end()), sorted_features.end());

  std::optional<Split> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::vector<std::size_t> left(n_classes);
  std::vector<std::size_t> right(n_classes);
  const double total = static_cast<double>(n);
  for (const std::size_t f : sorted_features) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
    std::fill(left.begin(), left.end(), 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      ++left[y[order[i]]];
      const double lo = x[order[i]][f];
      const double hi = x[order[i + 1]][f];
      if (!(hi > lo)) continue;
      for (std::size_t c = 0; c < n_classes; ++c) right[c] = parent[c] - left[c];
      const double n_left = static_cast<double>(i + 1);
      const double n_right = total - n_left;
      const double decrease = parent_gini - (n_left / total) * gini(left) - (n_right / total) * gini(right);
      if (decrease > kMinGiniDecrease && (!best || decrease > best->decrease))
        best = Split{f, split_midpoint(lo, hi), decrease};
    }
  }
  return best;
}

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::vector<std::uint32_t> counts;  // leaves only

  bool is_leaf() const { return feature == kLeaf; }
  bool operator==(const TreeNode&) const = default;
};

/// Class with the most votes; the lowest index wins a tie.
template <typename Count>
std::size_t argmax_lowest(std::span<const Count> counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c)
    if (counts[c] > counts[best]) best = c;
  return best;
}

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[i];
  }

  std::size_t predict(std::span<const double> x) const {
    const auto& counts = leaf_for(x).counts;
    return argmax_lowest(std::span<const std::uint32_t>(counts));
  }

  bool operator==(const DecisionTree&) const = default;
};

struct TrainedForest {
  std::size_t n_classes = 0;
  std::size_t n_features = 0;
  ForestParams params;
  std::vector<DecisionTree> trees;

  bool operator==(const TrainedForest&) const = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t tree_seed(std::uint64_t seed, std::size_t tree) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(tree));
}

class TreeGrower {
public:
  TreeGrower(std::span<const FeatureRow> x, std::span<const std::size_t> y, std::size_t n_classes,
             const ForestParams& params, std::size_t d, std::mt19937_64& rng)
      : x_(x), y_(y), n_classes_(n_classes), params_(params), d_(d), k_(params.resolved_features(d)), rng_(rng) {}

  DecisionTree grow(std::vector<std::size_t> sample) {
    DecisionTree tree;
    struct Pending {
      std::size_t node;
      std::vector<std::size_t> rows;
      std::size_t depth;
    };
    tree.nodes.emplace_back();
    std::vector<Pending> stack;
    stack.push_back({0, std::move(sample), 0});
    std::vector<std::size_t> all_features(d_);
    std::iota(all_features.begin(), all_features.end(), 0);

    while (!stack.empty()) {
      Pending p = std::move(stack.back());
      stack.pop_back();
      std::vector<std::uint32_t> counts(n_classes_, 0);
      for (auto r : p.rows) ++counts[y_[r]];
      const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
      const bool depth_capped = params_.max_depth != 0 && p.depth >= params_.max_depth;

      std::optional<Split> split;
      if (!pure && !depth_capped && p.rows.size() >= params_.min_samples_split) {
        // Fresh random feature subset per node (partial Fisher-Yates).
        for (std::size_t i = 0; i < k_; ++i) {
          std::uniform_int_distribution<std::size_t> pick(i, d_ - 1);
          std::swap(all_features[i], all_features[pick(rng_)]);
        }
        split = best_split(x_, y_, p.rows, std::span<const std::size_t>(all_features.data(), k_), n_classes_);
      }
      if (!split) {
        tree.nodes[p.node].counts = std::move(counts);
        continue;
      }

      std::vector<std::size_t> left_rows;
      std::vector<std::size_t> right_rows;
      for (auto r : p.rows) (x_[r][split->feature] <= split->threshold ? left_rows : right_rows).push_back(r);
      const auto left = static_cast<std::uint32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      const auto right = static_cast<std::uint32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      auto& node = tree.nodes[p.node];
      node.feature = static_cast<std::int32_t>(split->feature);
      node.threshold = split->threshold;
      node.left = left;
      node.right = right;
      // Right pushed first so the left subtree is grown first.
      stack.push_back({right, std::move(right_rows), p.depth + 1});
      stack.push_back({left, std::move(left_rows), p.depth + 1});
    }
    return tree;
  }

private:
  std::span<const FeatureRow> x_;
  std::span<const std::size_t> y_;
  std::size_t n_classes_;
  const ForestParams& params_;
  std::size_t d_;
  std::size_t k_;
  std::mt19937_64& rng_;
};

inline void validate_training_set(std::span<const FeatureRow> x, std::span<const std::size_t> y,
                                  std::size_t n_classes) {
  if (x.size() != y.size()) throw ShapeError("feature and label counts differ");
  if (x.size() < 2) throw DomainError("training needs at least 2 rows");
  if (n_classes == 0) throw ConfigError("at least one class is required");
  const std::size_t d = x.front().size();
  if (d == 0) throw ShapeError("feature rows are empty");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != d) throw ShapeError("row " + std::to_string(i) + " has a different feature count");
    for (double v : x[i])
      if (!std::isfinite(v)) throw DomainError("row " + std::to_string(i) + " has a non-finite feature");
    if (y[i] >= n_classes) throw DomainError("row " + std::to_string(i) + " has an out-of-range class");
  }
}

}  // namespace detail

/// Grows `params.n_trees` trees, each on a bootstrap sample of n rows drawn
/// with a generator seeded from (seed, tree index).
inline TrainedForest fit(std::span<const FeatureRow> x, std::span<const std::size_t> y, std::size_t n_classes,
                         const ForestParams& params = {}) {
  detail::validate_training_set(x, y, n_classes);
  const std::size_t d = x.front().size();
  if (params.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (params.min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
  const std::size_t k = params.resolved_features(d);
  if (k < 1 || k > d)
    throw ConfigError("features_per_split must be in [1, " + std::to_string(d) + "], got " + std::to_string(k));

  TrainedForest forest{n_classes, d, params, {}};
  forest.trees.reserve(params.n_trees);
  const std::size_t n = x.size();
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    std::mt19937_64 rng(detail::tree_seed(params.seed, t));
    std::uniform_int_distribution<std::size_t> draw(0, n - 1);
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = draw(rng);
    detail::TreeGrower grower(x, y, n_classes, params, d, rng);
    forest.trees.push_back(grower.grow(std::move(sample)));
  }
  return forest;
}

/// Fraction of trees voting for each class.
inline std::vector<double> predict_proba(const TrainedForest& forest, std::span<const double> x) {
  if (x.size() != forest.n_features)
    throw ShapeError("expected " + std::to_string(forest.n_features) + " features, got " + std::to_string(x.size()));
  std::vector<std::size_t> votes(forest.n_classes, 0);
  for (const auto& tree : forest.trees) ++votes[tree.predict(x)];
  std::vector<double> out(forest.n_classes);
  for (std::size_t c = 0; c < votes.size(); ++c)
    out[c] = static_cast<double>(votes[c]) / static_cast<double>(forest.trees.size());
  return out;
}

/// Majority vote; the lowest class index wins a tie.
inline std::size_t predict(const TrainedForest& forest, std::span<const double> x) {
  if (x.size() != forest.n_features)
    throw ShapeError("expected " + std::to_string(forest.n_features) + " features, got " + std::to_string(x.size()));
  std::vector<std::size_t> votes(forest.n_classes, 0);
  for (const auto& tree : forest.trees) ++votes[tree.predict(x)];
  return argmax_lowest(std::span<const std::size_t>(votes));
}

inline std::vector<std::size_t> predict_all(const TrainedForest& forest, std::span<const FeatureRow> x) {
  std::vector<std::size_t> out;
  out.reserve(x.size());
  for (const auto& row : x) out.push_back(predict(forest, row));
  return out;
}

// ---------------------------------------------------------------------------
// Text serialisation, version 1:
//
//   neckpose-forest 1
//   classes <k>
//   features <d>
//   params <n_trees> <max_depth> <min_samples_split> <features_per_split> <seed>
//   tree <index> <node count>
//   S <feature> <threshold> <left> <right>     internal node
//   L <count_0> ... <count_k-1>                leaf
//   end

inline constexpr int kForestFormatVersion = 1;

inline void write_forest(std::ostream& out, const TrainedForest& forest) {
  const auto& p = forest.params;
  out << "neckpose-forest " << kForestFormatVersion << '\n'
      << "classes " << forest.n_classes << '\n'
      << "features " << forest.n_features << '\n'
      << "params " << p.n_trees << ' ' << p.max_depth << ' ' << p.min_samples_split << ' '
      << p.resolved_features(forest.n_features) << ' ' << p.seed << '\n';
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const auto& nodes = forest.trees[t].nodes;
    out << "tree " << t << ' ' << nodes.size() << '\n';
    for (const auto& n : nodes) {
      if (n.is_leaf()) {
        out << 'L';
        for (auto c : n.counts) out << ' ' << c;
      } else {
        out << "S " << n.feature << ' ' << detail::format_shortest(n.threshold) << ' ' << n.left << ' ' << n.right;
      }
      out << '\n';
    }
  }
  out << "end\n";
}

inline TrainedForest read_forest(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_tokens = [&]() {
    while (detail::getline_stripped(in, line)) {
      ++line_no;
      auto tokens = detail::split_ws(line);
      if (!tokens.empty()) return tokens;
    }
    throw FormatError("forest file ends unexpectedly after line " + std::to_string(line_no));
  };
  auto number = [&](std::string_view s) {
    const auto v = detail::to_integer<std::uint64_t>(s);
    if (!v) throw ParseError(line_no, "'" + std::string(s) + "' is not a non-negative integer");
    return *v;
  };
  auto expect = [&](const std::vector<std::string_view>& t, std::string_view key, std::size_t n) {
    if (t.empty() || t[0] != key || t.size() != n)
      throw FormatError("forest line " + std::to_string(line_no) + ": expected '" + std::string(key) + "' record");
  };

  auto t = next_tokens();
  expect(t, "neckpose-forest", 2);
  if (number(t[1]) != kForestFormatVersion)
    throw FormatError("unsupported forest format version " + std::string(t[1]));
  TrainedForest forest;
  t = next_tokens();
  expect(t, "classes", 2);
  forest.n_classes = number(t[1]);
  t = next_tokens();
  expect(t, "features", 2);
  forest.n_features = number(t[1]);
  t = next_tokens();
  expect(t, "params", 6);
  forest.params = {number(t[1]), number(t[2]), number(t[3]), number(t[4]), number(t[5])};
  if (forest.n_classes == 0 || forest.n_features == 0) throw FormatError("forest has no classes or features");

  for (std::size_t tree_index = 0; tree_index < forest.params.n_trees; ++tree_index) {
    t = next_tokens();
    expect(t, "tree", 3);
    if (number(t[1]) != tree_index) throw FormatError("forest line " + std::to_string(line_no) + ": tree out of order");
    const std::size_t count = number(t[2]);
    if (count == 0) throw FormatError("forest line " + std::to_string(line_no) + ": empty tree");
    DecisionTree tree;
    tree.nodes.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      auto& node = tree.nodes[i];
      t = next_tokens();
      if (t[0] == "L") {
        if (t.size() != 1 + forest.n_classes) throw FormatError("forest line " + std::to_string(line_no) + ": bad leaf");
        for (std::size_t c = 0; c < forest.n_classes; ++c) node.counts.push_back(static_cast<std::uint32_t>(number(t[1 + c])));
      } else if (t[0] == "S" && t.size() == 5) {
        node.feature = static_cast<std::int32_t>(number(t[1]));
        const auto thr = detail::to_double(t[2]);
        if (!thr || !std::isfinite(*thr)) throw ParseError(line_no, "bad split threshold");
        node.threshold = *thr;
        node.left = static_cast<std::uint32_t>(number(t[3]));
        node.right = static_cast<std::uint32_t>(number(t[4]));
        // Children always follow their parent, which rules out cycles.
        if (node.left <= i || node.right <= i || node.left >= count || node.right >= count ||
            static_cast<std::size_t>(node.feature) >= forest.n_features)
          throw FormatError("forest line " + std::to_string(line_no) + ": split refers outside the tree");
      } else {
        throw FormatError("forest line " + std::to_string(line_no) + ": expected S or L node");
      }
    }
    forest.trees.push_back(std::move(tree));
  }
  t = next_tokens();
  expect(t, "end", 1);
  return forest;
}

inline std::string forest_string(const TrainedForest& forest) {
  std::ostringstream out;
  write_forest(out, forest);
  return out.str();
}

}  // namespace neckpose
