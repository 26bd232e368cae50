#include "seaice/amg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seaice {
namespace {

CsrMatrix strength_graph_labeled(const CsrMatrix& a, const AmgParams& params,
                                 std::span<const int> labels) {
  const int n = a.rows();
  const auto off = a.offsets();
  const auto col = a.columns();
  const auto val = a.values();
  const bool use_labels = params.per_component && !labels.empty();

  auto measure = [&](double aij, double aii) {
    if (params.strength == StrengthMeasure::kAbsolute) return std::abs(aij);
    return aii < 0.0 ? aij : -aij;
  };

  std::vector<std::size_t> soff(n + 1, 0);
  std::vector<int> scol;
  scol.reserve(a.nnz());
  for (int i = 0; i < n; ++i) {
    double aii = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      if (col[k] == i) aii = val[k];
    }
    double max_m = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      const int j = col[k];
      if (j == i || (use_labels && labels[j] != labels[i])) continue;
      max_m = std::max(max_m, measure(val[k], aii));
    }
    if (max_m > 0.0) {
      const double cut = params.strong_threshold * max_m;
      for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
        const int j = col[k];
        if (j == i || (use_labels && labels[j] != labels[i])) continue;
        const double m = measure(val[k], aii);
        if (m > 0.0 && m >= cut) scol.push_back(j);
      }
    }
    soff[i + 1] = scol.size();
  }
  std::vector<double> sval(scol.size(), 1.0);
  return CsrMatrix(n, n, std::move(soff), std::move(scol), std::move(sval));
}

// Doubly linked bucket lists keyed by the RS measure.
class MeasureBuckets {
 public:
  explicit MeasureBuckets(int n) : head_(n + 2, -1), next_(n, -1), prev_(n, -1), key_(n, 0) {}

  void insert(int i, int key) {
    key_[i] = key;
    prev_[i] = -1;
    next_[i] = head_[key];
    if (head_[key] >= 0) prev_[head_[key]] = i;
    head_[key] = i;
    top_ = std::max(top_, key);
  }
  void remove(int i) {
    const int k = key_[i];
    if (prev_[i] >= 0) next_[prev_[i]] = next_[i];
    else head_[k] = next_[i];
    if (next_[i] >= 0) prev_[next_[i]] = prev_[i];
    next_[i] = prev_[i] = -1;
  }
  int key(int i) const { return key_[i]; }
  /// Point with the largest key, or -1 if only zero-keyed (or no) points remain.
  int pop_max() {
    while (top_ > 0 && head_[top_] < 0) --top_;
    if (top_ <= 0) return -1;
    const int i = head_[top_];
    remove(i);
    return i;
  }
  int max_key() const { return static_cast<int>(head_.size()) - 2; }

 private:
  std::vector<int> head_;
  std::vector<int> next_;
  std::vector<int> prev_;
  std::vector<int> key_;
  int top_ = 0;
};

// Node graph of a matrix with num_components interleaved unknowns per node:
// node J is strong for node I if the Frobenius norm of block (I, J) is at
// least theta times the largest off-diagonal block norm of row I.
CsrMatrix nodal_strength(const CsrMatrix& a, const AmgParams& params) {
  const int nc = params.num_components;
  const int nodes = a.rows() / nc;
  const auto off = a.offsets();
  const auto col = a.columns();
  const auto val = a.values();
  std::vector<double> norm2(nodes, 0.0);
  std::vector<int> touched;
  std::vector<std::size_t> soff(nodes + 1, 0);
  std::vector<int> scol;
  for (int node = 0; node < nodes; ++node) {
    touched.clear();
    for (int c = 0; c < nc; ++c) {
      const int i = node * nc + c;
      for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
        const int other = col[k] / nc;
        if (other == node) continue;
        if (norm2[other] == 0.0) touched.push_back(other);
        norm2[other] += val[k] * val[k];
      }
    }
    double max_n = 0.0;
    for (int o : touched) max_n = std::max(max_n, norm2[o]);
    const double cut = params.strong_threshold * params.strong_threshold * max_n;
    std::sort(touched.begin(), touched.end());
    for (int o : touched) {
      if (max_n > 0.0 && norm2[o] >= cut) scol.push_back(o);
      norm2[o] = 0.0;
    }
    soff[node + 1] = scol.size();
  }
  std::vector<double> sval(scol.size(), 1.0);
  return CsrMatrix(nodes, nodes, std::move(soff), std::move(scol), std::move(sval));
}

// Unknown-level graph for interpolation: same component, strongly connected nodes.
CsrMatrix expand_nodal_strength(const CsrMatrix& node_s, int nc) {
  const int nodes = node_s.rows();
  const auto off = node_s.offsets();
  const auto col = node_s.columns();
  std::vector<std::size_t> soff(static_cast<std::size_t>(nodes) * nc + 1, 0);
  std::vector<int> scol;
  scol.reserve(node_s.nnz() * nc);
  for (int node = 0; node < nodes; ++node) {
    for (int c = 0; c < nc; ++c) {
      for (std::size_t k = off[node]; k < off[node + 1]; ++k) scol.push_back(col[k] * nc + c);
      soff[node * nc + c + 1] = scol.size();
    }
  }
  std::vector<double> sval(scol.size(), 1.0);
  return CsrMatrix(nodes * nc, nodes * nc, std::move(soff), std::move(scol), std::move(sval));
}

constexpr char kUndecided = 0;
constexpr char kCoarse = 1;
constexpr char kFine = 2;

}  // namespace

CsrMatrix strength_graph(const CsrMatrix& a, const AmgParams& params) {
  std::vector<int> labels;
  if (params.per_component) {
    labels.resize(a.rows());
    for (int i = 0; i < a.rows(); ++i) labels[i] = i % params.num_components;
  }
  return strength_graph_labeled(a, params, labels);
}

std::vector<char> rs_coarsening(const CsrMatrix& s) {
  const int n = s.rows();
  const CsrMatrix st = s.transpose();
  const auto soff = s.offsets();
  const auto scol = s.columns();
  const auto toff = st.offsets();
  const auto tcol = st.columns();

  std::vector<char> state(n, kUndecided);
  MeasureBuckets buckets(n);
  for (int i = 0; i < n; ++i) {
    if (soff[i] == soff[i + 1]) {
      state[i] = kFine;  // no strong dependencies: relaxation handles it
      continue;
    }
    buckets.insert(i, static_cast<int>(toff[i + 1] - toff[i]));
  }

  // First pass: greedy maximal-measure selection.
  for (int i = buckets.pop_max(); i >= 0; i = buckets.pop_max()) {
    state[i] = kCoarse;
    for (std::size_t p = toff[i]; p < toff[i + 1]; ++p) {
      const int j = tcol[p];
      if (state[j] != kUndecided) continue;
      buckets.remove(j);
      state[j] = kFine;
      for (std::size_t q = soff[j]; q < soff[j + 1]; ++q) {
        const int k = scol[q];
        if (state[k] != kUndecided) continue;
        buckets.remove(k);
        buckets.insert(k, std::min(buckets.key(k) + 1, buckets.max_key()));
      }
    }
    for (std::size_t p = soff[i]; p < soff[i + 1]; ++p) {
      const int j = scol[p];
      if (state[j] != kUndecided) continue;
      buckets.remove(j);
      buckets.insert(j, std::max(buckets.key(j) - 1, 0));
    }
  }
  // Leftovers influence no undecided point.
  for (int i = 0; i < n; ++i) {
    if (state[i] != kUndecided) continue;
    bool has_c = false;
    for (std::size_t p = soff[i]; p < soff[i + 1] && !has_c; ++p) has_c = state[scol[p]] == kCoarse;
    state[i] = has_c ? kFine : kCoarse;
  }

  // Second pass: every strong F-F pair must share a strong C point.
  std::vector<int> marker(n, -1);
  for (int i = 0; i < n; ++i) {
    if (state[i] != kFine) continue;
    for (std::size_t p = soff[i]; p < soff[i + 1]; ++p) {
      if (state[scol[p]] == kCoarse) marker[scol[p]] = i;
    }
    int tentative = -1;
    for (std::size_t p = soff[i]; p < soff[i + 1]; ++p) {
      const int j = scol[p];
      if (state[j] != kFine) continue;
      bool shared = false;
      for (std::size_t q = soff[j]; q < soff[j + 1] && !shared; ++q) shared = marker[scol[q]] == i;
      if (shared) continue;
      if (tentative < 0) {
        tentative = j;
        state[j] = kCoarse;
        marker[j] = i;
      } else {
        state[tentative] = kFine;
        marker[tentative] = -1;
        state[i] = kCoarse;
        tentative = -1;
        break;
      }
    }
  }

  std::vector<char> is_coarse(n);
  for (int i = 0; i < n; ++i) is_coarse[i] = state[i] == kCoarse ? 1 : 0;
  return is_coarse;
}

CsrMatrix classical_interpolation(const CsrMatrix& a, const CsrMatrix& s,
                                  std::span<const char> is_coarse) {
  const int n = a.rows();
  std::vector<int> cmap(n, -1);
  int nc = 0;
  for (int i = 0; i < n; ++i) {
    if (is_coarse[i]) cmap[i] = nc++;
  }
  const auto off = a.offsets();
  const auto col = a.columns();
  const auto val = a.values();
  const auto soff = s.offsets();
  const auto scol = s.columns();

  std::vector<std::size_t> poff(n + 1, 0);
  std::vector<int> pcol;
  std::vector<double> pval;
  std::vector<int> strong_mark(n, -1);
  std::vector<int> cpos(n, -1);  // position of a C point in the current row's accumulator
  std::vector<int> row_c;
  std::vector<double> acc;

  for (int i = 0; i < n; ++i) {
    if (is_coarse[i]) {
      pcol.push_back(cmap[i]);
      pval.push_back(1.0);
      poff[i + 1] = pcol.size();
      continue;
    }
    row_c.clear();
    acc.clear();
    for (std::size_t p = soff[i]; p < soff[i + 1]; ++p) {
      const int j = scol[p];
      strong_mark[j] = i;
      if (is_coarse[j]) {
        cpos[j] = static_cast<int>(row_c.size());
        row_c.push_back(j);
        acc.push_back(0.0);
      }
    }
    double diag = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      const int j = col[k];
      const double aij = val[k];
      if (j == i) {
        diag += aij;
      } else if (strong_mark[j] == i && is_coarse[j]) {
        acc[cpos[j]] += aij;
      } else if (strong_mark[j] == i) {
        // Distribute a strong F connection over the shared C points using
        // the entries of opposite sign to the diagonal of row j.
        double ajj = 0.0;
        for (std::size_t q = off[j]; q < off[j + 1]; ++q) {
          if (col[q] == j) ajj = val[q];
        }
        const double sgn = ajj < 0.0 ? -1.0 : 1.0;
        double sum = 0.0;
        for (std::size_t q = off[j]; q < off[j + 1]; ++q) {
          const int m = col[q];
          if (is_coarse[m] && strong_mark[m] == i && cpos[m] >= 0 && sgn * val[q] < 0.0) sum += val[q];
        }
        if (sum == 0.0) {
          diag += aij;
        } else {
          const double ratio = aij / sum;
          for (std::size_t q = off[j]; q < off[j + 1]; ++q) {
            const int m = col[q];
            if (is_coarse[m] && strong_mark[m] == i && cpos[m] >= 0 && sgn * val[q] < 0.0) {
              acc[cpos[m]] += ratio * val[q];
            }
          }
        }
      } else {
        diag += aij;
      }
    }
    // Sorted by coarse index, which is monotone in the fine index.
    std::vector<std::pair<int, double>> entries;
    entries.reserve(row_c.size());
    if (diag != 0.0) {
      for (std::size_t t = 0; t < row_c.size(); ++t) {
        const double w = -acc[t] / diag;
        if (w != 0.0) entries.emplace_back(cmap[row_c[t]], w);
      }
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& [c, w] : entries) {
      pcol.push_back(c);
      pval.push_back(w);
    }
    for (int j : row_c) cpos[j] = -1;
    poff[i + 1] = pcol.size();
  }
  return CsrMatrix(n, nc, std::move(poff), std::move(pcol), std::move(pval));
}

void ssor_sweep(const CsrMatrix& a, std::span<const double> inv_diag, std::span<const double> b,
                std::span<double> x) {
  const int n = a.rows();
  const auto off = a.offsets();
  const auto col = a.columns();
  const auto val = a.values();
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) s -= val[k] * x[col[k]];
    x[i] += s * inv_diag[i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) s -= val[k] * x[col[k]];
    x[i] += s * inv_diag[i];
  }
}

AmgHierarchy::AmgHierarchy(const CsrMatrix& a, const AmgParams& params) : params_(params) {
  if (a.rows() != a.cols()) throw std::invalid_argument("AmgHierarchy: matrix must be square");
  if (!(params.strong_threshold > 0.0 && params.strong_threshold <= 1.0) || params.sweeps < 0 ||
      params.max_levels < 1 || params.coarse_size < 1 || params.num_components < 1) {
    throw std::invalid_argument("AmgHierarchy: invalid parameters");
  }
  if (params.nodal && a.rows() % params.num_components != 0) {
    throw std::invalid_argument("AmgHierarchy: nodal coarsening needs whole nodes");
  }
  std::vector<int> labels;
  if (params.per_component) {
    labels.resize(a.rows());
    for (int i = 0; i < a.rows(); ++i) labels[i] = i % params.num_components;
  }
  levels_.push_back(AmgLevel{a, {}, {}, {}, {}});
  while (true) {
    AmgLevel& fine = levels_.back();
    const int n = fine.a.rows();
    if (n <= params.coarse_size || static_cast<int>(levels_.size()) >= params.max_levels) break;
    CsrMatrix s;
    std::vector<char> cf;
    if (params.nodal) {
      const CsrMatrix node_s = nodal_strength(fine.a, params);
      const std::vector<char> node_cf = rs_coarsening(node_s);
      s = expand_nodal_strength(node_s, params.num_components);
      cf.resize(n);
      for (int i = 0; i < n; ++i) cf[i] = node_cf[i / params.num_components];
    } else {
      s = strength_graph_labeled(fine.a, params, labels);
      cf = rs_coarsening(s);
    }
    const int nc = static_cast<int>(std::count(cf.begin(), cf.end(), 1));
    if (nc == 0 || nc >= n) break;  // stagnation: solve this level directly
    CsrMatrix p = classical_interpolation(fine.a, s, cf);
    CsrMatrix r = p.transpose();
    CsrMatrix coarse = multiply(r, multiply(fine.a, p)).pruned();
    if (params.per_component) {
      std::vector<int> coarse_labels;
      coarse_labels.reserve(nc);
      for (int i = 0; i < n; ++i) {
        if (cf[i]) coarse_labels.push_back(labels[i]);
      }
      labels = std::move(coarse_labels);
    }
    fine.interpolation = std::move(p);
    fine.restriction = std::move(r);
    fine.is_coarse = std::move(cf);
    levels_.push_back(AmgLevel{std::move(coarse), {}, {}, {}, {}});
  }
  for (auto& lvl : levels_) {
    lvl.inv_diag = lvl.a.diagonal();
    for (double& d : lvl.inv_diag) d = d != 0.0 ? 1.0 / d : 0.0;
  }

  const CsrMatrix& ac = levels_.back().a;
  coarse_is_diagonal_ = true;
  for (int i = 0; i < ac.rows() && coarse_is_diagonal_; ++i) {
    for (std::size_t k = ac.offsets()[i]; k < ac.offsets()[i + 1]; ++k) {
      if (ac.columns()[k] != i && ac.values()[k] != 0.0) {
        coarse_is_diagonal_ = false;
        break;
      }
    }
  }
  if (!coarse_is_diagonal_) {
    if (ac.rows() > 8192) {
      throw std::runtime_error("AmgHierarchy: coarsening stalled with " + std::to_string(ac.rows()) +
                               " rows, too many for the direct coarse solve");
    }
    coarse_lu_ = DenseLu(ac.rows(), ac.to_dense());
  }
}

double AmgHierarchy::operator_complexity() const {
  double total = 0.0;
  for (const auto& lvl : levels_) total += static_cast<double>(lvl.a.nnz());
  return total / static_cast<double>(levels_.front().a.nnz());
}

void AmgHierarchy::apply(std::span<const double> r, std::span<double> z) const {
  std::fill(z.begin(), z.end(), 0.0);
  cycle(0, r, z);
}

void AmgHierarchy::cycle(int l, std::span<const double> b, std::span<double> x) const {
  const AmgLevel& lvl = levels_[l];
  if (l + 1 == num_levels()) {
    if (coarse_is_diagonal_) {
      for (std::size_t i = 0; i < b.size(); ++i) x[i] = b[i] * lvl.inv_diag[i];
    } else {
      std::copy(b.begin(), b.end(), x.begin());
      coarse_lu_.solve(x);
    }
    return;
  }
  for (int s = 0; s < params_.sweeps; ++s) ssor_sweep(lvl.a, lvl.inv_diag, b, x);

  std::vector<double> r(b.size());
  residual(lvl.a, x, b, r);
  std::vector<double> bc(lvl.restriction.rows());
  spmv(lvl.restriction, r, bc);
  std::vector<double> xc(bc.size(), 0.0);
  cycle(l + 1, bc, xc);
  // x += P xc
  const auto off = lvl.interpolation.offsets();
  const auto col = lvl.interpolation.columns();
  const auto val = lvl.interpolation.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) s += val[k] * xc[col[k]];
    x[i] += s;
  }

  for (int s = 0; s < params_.sweeps; ++s) ssor_sweep(lvl.a, lvl.inv_diag, b, x);
}

}  // namespace seaice
