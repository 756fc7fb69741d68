#include "rghl/experience.hpp"

#include <algorithm>

namespace rghl {

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::random:
      return "random";
    case Origin::genetic:
      return "genetic";
    case Origin::surrogate:
      return "surrogate";
  }
  return "unknown";
}

const Record& ExperienceMemory::store(Chromosome c, double fitness,
                                      Origin origin) {
  records_.push_back(Record{std::move(c), fitness, records_.size(), origin});
  return records_.back();
}

std::vector<double> ExperienceMemory::fitness_history() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.fitness);
  return out;
}

void RunTrace::append(Origin origin, double fitness) {
  const double best =
      rows.empty() ? fitness : std::min(rows.back().best_so_far, fitness);
  rows.push_back(TraceRow{rows.size(), origin, fitness, best});
}

}  // namespace rghl
