#include "blocksense/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace blocksense {

namespace {

using nlohmann::json;

void check_shape(Shape s) {
  if (s.n1 < 1 || s.n2 < 1) throw std::invalid_argument("sensing shape must be positive");
}

double frob_of(Shape shape, const SensingMatrix::Rep& rep) {
  struct Visitor {
    Shape s;
    double operator()(const SensingMatrix::Dense& d) const {
      double q = 0;
      for (double v : *d.data) q += v * v;
      return std::sqrt(q);
    }
    double operator()(const SensingMatrix::UniformConst& u) const {
      return std::fabs(u.value) * std::sqrt(static_cast<double>(s.cells()));
    }
    double operator()(const SensingMatrix::BlockSupport& b) const {
      double q = 0;
      for (const auto& [blk, v] : *b.entries) q += v * v * static_cast<double>(blk.cells());
      return std::sqrt(q);
    }
    double operator()(const SensingMatrix::ColSupport& c) const {
      return std::fabs(c.value) * std::sqrt(static_cast<double>(c.rows->size()));
    }
    double operator()(const SensingMatrix::RowSupport& r) const {
      return std::fabs(r.value) * std::sqrt(static_cast<double>(r.cols->size()));
    }
  };
  return std::visit(Visitor{shape}, rep);
}

}  // namespace

std::string phase_tag(Phase p, int cbs_level) {
  switch (p) {
    case Phase::Detection: return "detection";
    case Phase::Passive: return "passive";
    case Phase::Cbs: return "cbs-level-" + std::to_string(cbs_level);
    case Phase::ExactColScan:
    case Phase::ExactColSearch: return "exact-col";
    case Phase::ExactRowScan:
    case Phase::ExactRowSearch: return "exact-row";
  }
  return "unknown";
}

SensingMatrix::SensingMatrix(Shape shape, Rep rep)
    : shape_(shape), frob_(frob_of(shape, rep)), rep_(std::move(rep)) {}

double SensingMatrix::entry(int i, int j) const {
  if (i < 1 || i > shape_.n1 || j < 1 || j > shape_.n2)
    throw std::out_of_range("sensing index out of range");
  struct Visitor {
    int i, j;
    Shape s;
    double operator()(const Dense& d) const {
      return (*d.data)[static_cast<size_t>(i - 1) * s.n2 + (j - 1)];
    }
    double operator()(const UniformConst& u) const { return u.value; }
    double operator()(const BlockSupport& b) const {
      double v = 0;
      for (const auto& [blk, val] : *b.entries)
        if (blk.contains(i, j, s)) v += val;
      return v;
    }
    double operator()(const ColSupport& c) const {
      if (j != c.col) return 0;
      return std::binary_search(c.rows->begin(), c.rows->end(), i) ? c.value : 0;
    }
    double operator()(const RowSupport& r) const {
      if (i != r.row) return 0;
      return std::binary_search(r.cols->begin(), r.cols->end(), j) ? r.value : 0;
    }
  };
  return std::visit(Visitor{i, j, shape_}, rep_);
}

std::vector<double> SensingMatrix::to_dense() const {
  std::vector<double> out(static_cast<size_t>(shape_.cells()), 0.0);
  if (const auto* d = std::get_if<Dense>(&rep_)) return *d->data;
  for (int i = 1; i <= shape_.n1; ++i)
    for (int j = 1; j <= shape_.n2; ++j)
      out[static_cast<size_t>(i - 1) * shape_.n2 + (j - 1)] = entry(i, j);
  return out;
}

std::string SensingMatrix::descriptor() const {
  json j;
  j["n1"] = shape_.n1;
  j["n2"] = shape_.n2;
  struct Visitor {
    json& j;
    void operator()(const Dense&) const { j["kind"] = "dense"; }
    void operator()(const UniformConst& u) const {
      j["kind"] = "uniform";
      j["value"] = u.value;
    }
    void operator()(const BlockSupport& b) const {
      j["kind"] = "block-support";
      j["num_blocks"] = b.entries->size();
      j["abs_value"] = b.entries->empty() ? 0.0 : std::fabs((*b.entries)[0].second);
    }
    void operator()(const ColSupport& c) const {
      j["kind"] = "column";
      j["col"] = c.col;
      j["num_rows"] = c.rows->size();
      j["value"] = c.value;
    }
    void operator()(const RowSupport& r) const {
      j["kind"] = "row";
      j["row"] = r.row;
      j["num_cols"] = r.cols->size();
      j["value"] = r.value;
    }
  };
  std::visit(Visitor{j}, rep_);
  return j.dump();
}

SensingMatrix gaussian_sensing(int n1, int n2, Rng& rng) {
  check_shape({n1, n2});
  double sd = 1.0 / std::sqrt(static_cast<double>(n1) * n2);
  auto data = std::make_shared<std::vector<double>>();
  data->reserve(static_cast<size_t>(n1) * n2);
  for (long long c = 0, e = static_cast<long long>(n1) * n2; c < e; ++c)
    data->push_back(sd * rng.normal());
  return SensingMatrix({n1, n2}, SensingMatrix::Dense{std::move(data)});
}

SensingMatrix allones_sensing(int n1, int n2) {
  check_shape({n1, n2});
  double v = 1.0 / std::sqrt(static_cast<double>(n1) * n2);
  return SensingMatrix({n1, n2}, SensingMatrix::UniformConst{v});
}

SensingMatrix column_sensing(const std::vector<int>& rows, int col, Shape shape) {
  check_shape(shape);
  if (rows.empty()) throw std::invalid_argument("column_sensing: empty row set");
  if (!std::is_sorted(rows.begin(), rows.end()) ||
      std::adjacent_find(rows.begin(), rows.end()) != rows.end())
    throw std::invalid_argument("column_sensing: rows must be sorted and unique");
  if (rows.front() < 1 || rows.back() > shape.n1 || col < 1 || col > shape.n2)
    throw std::invalid_argument("column_sensing: support out of range");
  double v = 1.0 / std::sqrt(static_cast<double>(rows.size()));
  return SensingMatrix(shape, SensingMatrix::ColSupport{
                                  std::make_shared<std::vector<int>>(rows), col, v});
}

SensingMatrix row_sensing(const std::vector<int>& cols, int row, Shape shape) {
  check_shape(shape);
  if (cols.empty()) throw std::invalid_argument("row_sensing: empty column set");
  if (!std::is_sorted(cols.begin(), cols.end()) ||
      std::adjacent_find(cols.begin(), cols.end()) != cols.end())
    throw std::invalid_argument("row_sensing: cols must be sorted and unique");
  if (cols.front() < 1 || cols.back() > shape.n2 || row < 1 || row > shape.n1)
    throw std::invalid_argument("row_sensing: support out of range");
  double v = 1.0 / std::sqrt(static_cast<double>(cols.size()));
  return SensingMatrix(shape, SensingMatrix::RowSupport{
                                  std::make_shared<std::vector<int>>(cols), row, v});
}

SensingMatrix block_support_sensing(std::vector<std::pair<Block, double>> entries,
                                    Shape shape) {
  check_shape(shape);
  for (const auto& [blk, v] : entries) {
    (void)v;
    if (blk.height < 1 || blk.width < 1 || blk.height > shape.n1 || blk.width > shape.n2)
      throw std::invalid_argument("block_support_sensing: block out of range");
    if (blk.row_start < 1 || blk.row_start > shape.n1 || blk.col_start < 1 ||
        blk.col_start > shape.n2)
      throw std::invalid_argument("block_support_sensing: block start out of range");
  }
  return SensingMatrix(shape, SensingMatrix::BlockSupport{
                                  std::make_shared<std::vector<std::pair<Block, double>>>(
                                      std::move(entries))});
}

double trace_inner(const SignalInstance& inst, const SensingMatrix& x) {
  if (!(x.shape() == inst.shape()))
    throw std::invalid_argument("trace_inner: shape mismatch");
  if (inst.mu == 0.0) return 0.0;
  const Block& b = inst.b_star;
  struct Visitor {
    const SignalInstance& a;
    Shape s;
    const Block& b;
    double operator()(const SensingMatrix::Dense& d) const {
      double t = 0;
      for (int i = b.row_start; i < b.row_start + b.height; ++i) {
        const double* row = d.data->data() + static_cast<size_t>(i - 1) * s.n2;
        for (int j = b.col_start; j < b.col_start + b.width; ++j) t += row[j - 1];
      }
      return a.mu * t;
    }
    double operator()(const SensingMatrix::UniformConst& u) const {
      return a.mu * u.value * static_cast<double>(b.cells());
    }
    double operator()(const SensingMatrix::BlockSupport& bs) const {
      double t = 0;
      for (const auto& [blk, v] : *bs.entries) {
        long long ov = overlap_cells(b, blk, s);
        if (ov) t += v * static_cast<double>(ov);
      }
      return a.mu * t;
    }
    double operator()(const SensingMatrix::ColSupport& c) const {
      if (c.col < b.col_start || c.col >= b.col_start + b.width) return 0;
      auto lo = std::lower_bound(c.rows->begin(), c.rows->end(), b.row_start);
      auto hi = std::lower_bound(c.rows->begin(), c.rows->end(), b.row_start + b.height);
      return a.mu * c.value * static_cast<double>(hi - lo);
    }
    double operator()(const SensingMatrix::RowSupport& r) const {
      if (r.row < b.row_start || r.row >= b.row_start + b.height) return 0;
      auto lo = std::lower_bound(r.cols->begin(), r.cols->end(), b.col_start);
      auto hi = std::lower_bound(r.cols->begin(), r.cols->end(), b.col_start + b.width);
      return a.mu * r.value * static_cast<double>(hi - lo);
    }
  };
  return std::visit(Visitor{inst, inst.shape(), b}, x.rep());
}

std::string transcript_to_jsonl(const Transcript& t) {
  std::string out;
  for (const auto& rec : t) {
    json j;
    j["phase"] = phase_tag(rec.phase, rec.cbs_level);
    j["y"] = rec.y;
    j["x"] = json::parse(rec.x.descriptor());
    out += j.dump();
    out += '\n';
  }
  return out;
}

BudgetLedger::BudgetLedger(long long total_allowed) : total_allowed_(total_allowed) {
  if (total_allowed < 0) throw std::invalid_argument("budget must be non-negative");
}

void BudgetLedger::set_cap(Phase p, long long cap) {
  if (cap < 0) throw std::invalid_argument("phase cap must be non-negative");
  caps_[idx(p)] = cap;
}

void BudgetLedger::charge(Phase p, long long count) {
  if (count < 0) throw std::invalid_argument("charge must be non-negative");
  if (total_spent_ + count > total_allowed_)
    throw budget_error("measurement budget exhausted: " + std::to_string(total_spent_) +
                       " spent + " + std::to_string(count) + " requested > " +
                       std::to_string(total_allowed_) + " allowed");
  long long cap = caps_[idx(p)];
  if (cap > 0 && spent_[idx(p)] + count > cap)
    throw budget_error("phase " + phase_tag(p) + " over its cap of " + std::to_string(cap));
  total_spent_ += count;
  spent_[idx(p)] += count;
}

void BudgetLedger::note_energy_deviation(double dev) {
  if (dev > max_energy_dev_) max_energy_dev_ = dev;
}

MeasurementRecord measure(const SignalInstance& inst, const SensingMatrix& x, Rng& rng,
                          BudgetLedger& ledger, Phase phase, int cbs_level,
                          Transcript* sink) {
  ledger.charge(phase);
  if (!x.is_dense()) ledger.note_energy_deviation(std::fabs(x.frobenius_norm() - 1.0));
  MeasurementRecord rec{trace_inner(inst, x) + inst.sigma * rng.normal(), x, phase,
                        cbs_level};
  if (sink) sink->push_back(rec);
  return rec;
}

}  // namespace blocksense
