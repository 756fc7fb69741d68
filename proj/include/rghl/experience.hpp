#pragma once

// Experience memory and run traces shared by the search strategies.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rghl/search_space.hpp"

namespace rghl {

// Which part of a strategy proposed an evaluated chromosome.
enum class Origin : std::uint8_t { random, genetic, surrogate };

std::string_view to_string(Origin o);

struct Record {
  Chromosome chromosome;
  double fitness = 0.0;
  std::size_t eval_index = 0;
  Origin origin = Origin::random;
};

// Append-only log of every evaluated (chromosome, fitness) transition.
class ExperienceMemory {
 public:
  // Appends with eval_index = size().
  const Record& store(Chromosome c, double fitness, Origin origin);

  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const Record& operator[](std::size_t i) const { return records_[i]; }

  // Fitness values in evaluation order.
  std::vector<double> fitness_history() const;

 private:
  std::vector<Record> records_;
};

struct TraceRow {
  std::size_t eval_index = 0;
  Origin origin = Origin::random;
  double fitness = 0.0;
  double best_so_far = 0.0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::string strategy;
  std::string config_digest;
  std::uint64_t seed = 0;
  double wall_time_sec = 0.0;

  // Appends a row, maintaining the running minimum.
  void append(Origin origin, double fitness);

  std::size_t size() const { return rows.size(); }
};

}  // namespace rghl
