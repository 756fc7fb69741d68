#pragma once

// Discrete hyperparameter search spaces and the chromosome encoding.
//
// A search space is an ordered list of dimensions, each an explicit grid of
// at most 256 candidate values. A chromosome stores one grid index per
// dimension, so every gene fits in a byte.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rghl {

// A concrete hyperparameter value: categorical label, integer or real.
using Value = std::variant<std::string, std::int64_t, double>;

std::string to_string(const Value& v);

inline constexpr std::size_t kMaxCardinality = 256;

class Dimension {
 public:
  Dimension(std::string name, std::vector<Value> values);

  const std::string& name() const { return name_; }
  const std::vector<Value>& values() const { return values_; }
  std::size_t cardinality() const { return values_.size(); }

  // Grid position of `v`, or cardinality() when absent.
  std::size_t index_of(const Value& v) const;

 private:
  std::string name_;
  std::vector<Value> values_;
};

struct Chromosome {
  std::vector<std::uint32_t> genes;

  std::size_t size() const { return genes.size(); }
  friend bool operator==(const Chromosome&, const Chromosome&) = default;
  friend auto operator<=>(const Chromosome&, const Chromosome&) = default;
};

class SearchSpace {
 public:
  explicit SearchSpace(std::vector<Dimension> dimensions);

  // Builds `n` dimensions named x0..x{n-1}, each an integer grid 0..cardinality-1.
  static SearchSpace uniform_grid(std::size_t n, std::size_t cardinality);

  static SearchSpace from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  const std::vector<Dimension>& dimensions() const { return dimensions_; }
  const Dimension& dimension(std::size_t i) const { return dimensions_[i]; }
  std::size_t n_genes() const { return dimensions_.size(); }
  std::size_t cardinality(std::size_t i) const {
    return dimensions_[i].cardinality();
  }
  // Product of cardinalities, saturating at SIZE_MAX.
  std::size_t total_size() const;

  bool is_valid(const Chromosome& c) const;
  // Throws LengthMismatch or GeneOutOfRange.
  void validate(const Chromosome& c) const;

 private:
  std::vector<Dimension> dimensions_;
};

Chromosome encode(const std::vector<Value>& values, const SearchSpace& space);
std::vector<Value> decode(const Chromosome& c, const SearchSpace& space);

// Maps gene i to genes[i] / max(1, cardinality(i) - 1).
std::vector<double> normalize(const Chromosome& c, const SearchSpace& space);

// Writes the normalized features into `out` (size n_genes) without allocating.
void normalize_into(const Chromosome& c, const SearchSpace& space,
                    std::vector<double>& out);

}  // namespace rghl
