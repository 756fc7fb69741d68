#include "rghl/search_space.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rghl/errors.hpp"

namespace rghl {

std::string to_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else {
          std::ostringstream os;
          os.precision(17);
          os << x;
          return os.str();
        }
      },
      v);
}

Dimension::Dimension(std::string name, std::vector<Value> values)
    : name_(std::move(name)), values_(std::move(values)) {
  if (values_.empty()) {
    throw InvalidSearchSpace("dimension '" + name_ + "' has no values");
  }
  if (values_.size() > kMaxCardinality) {
    throw InvalidSearchSpace("dimension '" + name_ + "' has " +
                             std::to_string(values_.size()) +
                             " values; at most 256 are allowed");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    for (std::size_t j = i + 1; j < values_.size(); ++j) {
      if (values_[i] == values_[j]) {
        throw InvalidSearchSpace("dimension '" + name_ +
                                 "' repeats value '" + to_string(values_[i]) +
                                 "'");
      }
    }
  }
}

std::size_t Dimension::index_of(const Value& v) const {
  auto it = std::find(values_.begin(), values_.end(), v);
  return static_cast<std::size_t>(it - values_.begin());
}

SearchSpace::SearchSpace(std::vector<Dimension> dimensions)
    : dimensions_(std::move(dimensions)) {
  if (dimensions_.empty()) {
    throw InvalidSearchSpace("search space needs at least one dimension");
  }
  if (total_size() < 2) {
    throw InvalidSearchSpace("search space must contain at least two points");
  }
}

SearchSpace SearchSpace::uniform_grid(std::size_t n, std::size_t cardinality) {
  std::vector<Dimension> dims;
  dims.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Value> values;
    values.reserve(cardinality);
    for (std::size_t v = 0; v < cardinality; ++v) {
      values.emplace_back(static_cast<std::int64_t>(v));
    }
    dims.emplace_back("x" + std::to_string(i), std::move(values));
  }
  return SearchSpace(std::move(dims));
}

SearchSpace SearchSpace::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("dimensions") ||
      !doc.at("dimensions").is_array()) {
    throw InvalidSearchSpace("search space document needs a 'dimensions' array");
  }
  std::vector<Dimension> dims;
  for (const auto& d : doc.at("dimensions")) {
    if (!d.is_object() || !d.contains("name") || !d.contains("values") ||
        !d.at("name").is_string() || !d.at("values").is_array()) {
      throw InvalidSearchSpace(
          "each dimension needs a string 'name' and a 'values' array");
    }
    for (const auto& [key, _] : d.items()) {
      if (key != "name" && key != "values") {
        throw InvalidSearchSpace("unknown dimension field '" + key + "'");
      }
    }
    std::vector<Value> values;
    for (const auto& v : d.at("values")) {
      if (v.is_string()) {
        values.emplace_back(v.get<std::string>());
      } else if (v.is_number_integer()) {
        values.emplace_back(v.get<std::int64_t>());
      } else if (v.is_number_float()) {
        values.emplace_back(v.get<double>());
      } else {
        throw InvalidSearchSpace("values must be strings or numbers");
      }
    }
    dims.emplace_back(d.at("name").get<std::string>(), std::move(values));
  }
  return SearchSpace(std::move(dims));
}

nlohmann::json SearchSpace::to_json() const {
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& d : dimensions_) {
    nlohmann::json values = nlohmann::json::array();
    for (const auto& v : d.values()) {
      std::visit([&](const auto& x) { values.push_back(x); }, v);
    }
    dims.push_back({{"name", d.name()}, {"values", std::move(values)}});
  }
  return {{"dimensions", std::move(dims)}};
}

std::size_t SearchSpace::total_size() const {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 1;
  for (const auto& d : dimensions_) {
    if (total > kMax / d.cardinality()) return kMax;
    total *= d.cardinality();
  }
  return total;
}

bool SearchSpace::is_valid(const Chromosome& c) const {
  if (c.size() != n_genes()) return false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.genes[i] >= cardinality(i)) return false;
  }
  return true;
}

void SearchSpace::validate(const Chromosome& c) const {
  if (c.size() != n_genes()) {
    throw LengthMismatch("chromosome has " + std::to_string(c.size()) +
                         " genes, search space has " +
                         std::to_string(n_genes()));
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.genes[i] >= cardinality(i)) throw GeneOutOfRange(i);
  }
}

Chromosome encode(const std::vector<Value>& values, const SearchSpace& space) {
  if (values.size() != space.n_genes()) {
    throw LengthMismatch("expected " + std::to_string(space.n_genes()) +
                         " values, got " + std::to_string(values.size()));
  }
  Chromosome c;
  c.genes.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& dim = space.dimension(i);
    auto idx = dim.index_of(values[i]);
    if (idx == dim.cardinality()) {
      throw UnknownValue(dim.name(), to_string(values[i]));
    }
    c.genes[i] = static_cast<std::uint32_t>(idx);
  }
  return c;
}

std::vector<Value> decode(const Chromosome& c, const SearchSpace& space) {
  space.validate(c);
  std::vector<Value> values;
  values.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    values.push_back(space.dimension(i).values()[c.genes[i]]);
  }
  return values;
}

void normalize_into(const Chromosome& c, const SearchSpace& space,
                    std::vector<double>& out) {
  out.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto span = std::max<std::size_t>(1, space.cardinality(i) - 1);
    out[i] = static_cast<double>(c.genes[i]) / static_cast<double>(span);
  }
}

std::vector<double> normalize(const Chromosome& c, const SearchSpace& space) {
  space.validate(c);
  std::vector<double> out;
  normalize_into(c, space, out);
  return out;
}

}  // namespace rghl
