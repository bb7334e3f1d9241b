#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "supmart/error.hpp"

namespace supmart {

using Cell = std::vector<std::size_t>;       // sorted outcome indices
using Vector = std::vector<double>;          // one value per outcome
using Partition = std::vector<Cell>;

/// Finite sample space {0, ..., outcome_count-1} with a refining sequence of
/// partitions, one per time 0..N. Immutable; copies share storage.
class FilteredSpace {
 public:
  static FilteredSpace build(std::size_t outcome_count, std::vector<Partition> partitions);

  std::size_t outcome_count() const { return data_->outcome_count; }
  std::size_t horizon() const { return data_->partitions.size() - 1; }
  std::size_t cell_count(std::size_t t) const { return partition(t).size(); }

  const Partition& partition(std::size_t t) const {
    if (t > horizon()) fail(ErrorKind::IndexOutOfRange, "time " + std::to_string(t) + " beyond horizon");
    return data_->partitions[t];
  }
  const std::vector<Partition>& partitions() const { return data_->partitions; }
  const Cell& cell(std::size_t t, std::size_t id) const { return partition(t).at(id); }

  /// Index of the cell of partitions[t] containing outcome w.
  std::size_t atom_of(std::size_t t, std::size_t w) const {
    if (t > horizon() || w >= outcome_count())
      fail(ErrorKind::IndexOutOfRange, "atom_of(" + std::to_string(t) + ", " + std::to_string(w) + ")");
    return data_->atom[t][w];
  }

  /// Cells of partitions[t+1] contained in cell `id` of partitions[t].
  const std::vector<std::size_t>& children(std::size_t t, std::size_t id) const {
    if (t >= horizon()) fail(ErrorKind::IndexOutOfRange, "no children after the horizon");
    return data_->children[t].at(id);
  }

  bool operator==(const FilteredSpace& other) const {
    return data_ == other.data_ ||
           (data_->outcome_count == other.data_->outcome_count && data_->partitions == other.data_->partitions);
  }

 private:
  struct Data {
    std::size_t outcome_count = 0;
    std::vector<Partition> partitions;
    std::vector<std::vector<std::size_t>> atom;                   // [t][w]
    std::vector<std::vector<std::vector<std::size_t>>> children;  // [t][cell]
  };
  explicit FilteredSpace(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

inline FilteredSpace FilteredSpace::build(std::size_t outcome_count, std::vector<Partition> partitions) {
  if (outcome_count == 0) fail(ErrorKind::InvalidArgument, "outcome_count must be positive");
  if (partitions.empty()) fail(ErrorKind::InvalidArgument, "at least one partition (time 0) is required");
  auto data = std::make_shared<Data>();
  data->outcome_count = outcome_count;
  data->atom.assign(partitions.size(), std::vector<std::size_t>(outcome_count, outcome_count));
  for (std::size_t t = 0; t < partitions.size(); ++t) {
    auto& part = partitions[t];
    for (std::size_t c = 0; c < part.size(); ++c) {
      auto& cell = part[c];
      if (cell.empty())
        fail(ErrorKind::EmptyCell, "time " + std::to_string(t) + " cell " + std::to_string(c) + " is empty");
      std::sort(cell.begin(), cell.end());
      for (std::size_t w : cell) {
        if (w >= outcome_count) fail(ErrorKind::IndexOutOfRange, "outcome " + std::to_string(w) + " out of range");
        if (data->atom[t][w] != outcome_count)
          fail(ErrorKind::NotPartition,
               "time " + std::to_string(t) + ": outcome " + std::to_string(w) + " lies in two cells");
        data->atom[t][w] = c;
      }
    }
    for (std::size_t w = 0; w < outcome_count; ++w)
      if (data->atom[t][w] == outcome_count)
        fail(ErrorKind::NotPartition, "time " + std::to_string(t) + ": outcome " + std::to_string(w) + " not covered");
  }
  if (partitions[0].size() != 1) fail(ErrorKind::NotPartition, "time 0 must be the single cell of all outcomes");
  data->children.resize(partitions.size() - 1);
  for (std::size_t t = 0; t + 1 < partitions.size(); ++t) {
    data->children[t].resize(partitions[t].size());
    for (std::size_t c = 0; c < partitions[t + 1].size(); ++c) {
      const auto& cell = partitions[t + 1][c];
      const std::size_t parent = data->atom[t][cell.front()];
      for (std::size_t w : cell) {
        if (data->atom[t][w] != parent)
          fail(ErrorKind::NotRefining, "time " + std::to_string(t + 1) + " cell " + std::to_string(c) +
                                           " straddles cells at time " + std::to_string(t));
      }
      data->children[t][parent].push_back(c);
    }
  }
  data->partitions = std::move(partitions);
  return FilteredSpace(std::move(data));
}

/// Rows of values indexed [t][w], t = 0..N.
using ProcessRows = std::vector<Vector>;

struct AdaptednessViolation {
  std::size_t time;
  std::size_t cell;
};

struct AdaptednessReport {
  bool adapted = true;
  std::vector<AdaptednessViolation> violations;
  explicit operator bool() const { return adapted; }
};

/// True iff `row` is constant (within `tolerance`) on every cell of partitions[t].
inline bool measurable_row(const FilteredSpace& space, std::size_t t, std::span<const double> row,
                           double tolerance = tol::eq) {
  for (const auto& cell : space.partition(t)) {
    const double first = row[cell.front()];
    for (std::size_t w : cell)
      if (std::abs(row[w] - first) > tolerance) return false;
  }
  return true;
}

inline AdaptednessReport check_adapted(const FilteredSpace& space, const ProcessRows& values,
                                       double tolerance = tol::eq) {
  if (values.size() != space.horizon() + 1)
    fail(ErrorKind::ShapeMismatch, "expected " + std::to_string(space.horizon() + 1) + " rows, got " +
                                       std::to_string(values.size()));
  AdaptednessReport report;
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (values[t].size() != space.outcome_count())
      fail(ErrorKind::ShapeMismatch, "row " + std::to_string(t) + " has wrong length");
    const auto& part = space.partition(t);
    for (std::size_t c = 0; c < part.size(); ++c) {
      const double first = values[t][part[c].front()];
      for (std::size_t w : part[c]) {
        if (std::abs(values[t][w] - first) > tolerance) {
          report.adapted = false;
          report.violations.push_back({t, c});
          break;
        }
      }
    }
  }
  return report;
}

/// Real-valued process adapted to the filtration of its space.
class AdaptedProcess {
 public:
  AdaptedProcess(FilteredSpace space, ProcessRows values) : space_(std::move(space)), values_(std::move(values)) {
    auto report = check_adapted(space_, values_);
    if (!report) {
      const auto& v = report.violations.front();
      fail(ErrorKind::NotAdapted,
           "row " + std::to_string(v.time) + " not constant on cell " + std::to_string(v.cell));
    }
  }

  static AdaptedProcess constant(const FilteredSpace& space, double c) {
    return AdaptedProcess(space, ProcessRows(space.horizon() + 1, Vector(space.outcome_count(), c)));
  }

  const FilteredSpace& space() const { return space_; }
  std::size_t horizon() const { return space_.horizon(); }
  double operator()(std::size_t t, std::size_t w) const { return values_.at(t).at(w); }
  const Vector& row(std::size_t t) const { return values_.at(t); }
  const ProcessRows& rows() const { return values_; }
  const Vector& terminal() const { return values_.back(); }

  /// Value on a cell of partitions[t].
  double on_cell(std::size_t t, std::size_t cell) const { return values_[t][space_.cell(t, cell).front()]; }

 private:
  FilteredSpace space_;
  ProcessRows values_;
};

/// Vector-valued process indexed t = 0..N whose time-t value is constant on the
/// cells of partitions[t-1] for t >= 1. The t = 0 slot holds the initial
/// (F_0-measurable) position.
class PredictableProcess {
 public:
  using Rows = std::vector<std::vector<Vector>>;  // [t][w][asset]

  PredictableProcess(FilteredSpace space, std::size_t dimension, Rows values)
      : space_(std::move(space)), dimension_(dimension), values_(std::move(values)) {
    if (values_.size() != space_.horizon() + 1) fail(ErrorKind::ShapeMismatch, "predictable process row count");
    for (std::size_t t = 0; t < values_.size(); ++t) {
      if (values_[t].size() != space_.outcome_count()) fail(ErrorKind::ShapeMismatch, "predictable row length");
      for (const auto& v : values_[t])
        if (v.size() != dimension_) fail(ErrorKind::ShapeMismatch, "predictable process dimension");
      const std::size_t info = t == 0 ? 0 : t - 1;
      for (const auto& cell : space_.partition(info)) {
        for (std::size_t w : cell)
          for (std::size_t j = 0; j < dimension_; ++j)
            if (std::abs(values_[t][w][j] - values_[t][cell.front()][j]) > tol::eq)
              fail(ErrorKind::NotPredictable, "time " + std::to_string(t) + " not measurable at the previous time");
      }
    }
  }

  static PredictableProcess zero(const FilteredSpace& space, std::size_t dimension) {
    return PredictableProcess(space, dimension,
                              Rows(space.horizon() + 1, std::vector<Vector>(space.outcome_count(), Vector(dimension, 0.0))));
  }

  const FilteredSpace& space() const { return space_; }
  std::size_t dimension() const { return dimension_; }
  double operator()(std::size_t t, std::size_t w, std::size_t j) const { return values_.at(t).at(w).at(j); }
  const Vector& at(std::size_t t, std::size_t w) const { return values_.at(t).at(w); }
  const Rows& rows() const { return values_; }

 private:
  FilteredSpace space_;
  std::size_t dimension_;
  Rows values_;
};

}  // namespace supmart
