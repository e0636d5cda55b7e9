// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include "overflow/attention.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "overflow/error.hpp"

namespace overflow {

namespace {

struct View {
  std::size_t layers, heads, seq;
  const float* f = nullptr;
  const double* d = nullptr;

  double operator()(std::size_t l, std::size_t h, std::size_t i, std::size_t j) const {
    const std::size_t idx = ((l * heads + h) * seq + i) * seq + j;
    return f ? static_cast<double>(f[idx]) : d[idx];
  }
};

View make_view(const Tensor& a) {
  if (a.rank() != 4) throw DomainError("attention tensor must be rank 4, got rank " + std::to_string(a.rank()));
  if (a.dim(2) != a.dim(3)) throw DomainError("attention tensor must be [L, H, T, T]");
  View v{a.dim(0), a.dim(1), a.dim(2)};
  if (a.dtype() == DType::f32) {
    v.f = a.f32().data();
  } else {
    v.d = a.f64().data();
  }
  return v;
}

void check_set(IndexSet s, std::size_t seq, const char* name) {
  if (s.empty()) throw DomainError(std::string("empty index set: ") + name);
  for (auto p : s) {
    if (p < 0 || static_cast<std::size_t>(p) >= seq) {
      throw DomainError(std::string("index ") + std::to_string(p) + " in " + name + " outside [0, " +
                        std::to_string(seq) + ")");
    }
  }
}

std::vector<std::size_t> selected_layers(const View& v, LayerSelection layers) {
  if (layers.empty()) {
    std::vector<std::size_t> all(v.layers);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  for (auto l : layers) {
    if (l >= v.layers) throw DomainError("layer " + std::to_string(l) + " out of range");
  }
  return {layers.begin(), layers.end()};
}

Eigen::MatrixXd mass_to(const View& v, const std::vector<std::size_t>& layers, IndexSet query, IndexSet targets) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(layers.size()), static_cast<Eigen::Index>(v.heads));
  for (std::size_t li = 0; li < layers.size(); ++li) {
    for (std::size_t h = 0; h < v.heads; ++h) {
      double acc = 0.0;
      for (auto i : query) {
        for (auto j : targets) acc += v(layers[li], h, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
      out(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(h)) = acc / static_cast<double>(query.size());
    }
  }
  return out;
}

Summary summarize_matrix(const Eigen::MatrixXd& m) {
  std::vector<double> xs(m.data(), m.data() + m.size());
  return summarize(xs);
}

}  // namespace

Eigen::MatrixXd mean_attention_to(const Tensor& attn, IndexSet query, IndexSet targets, LayerSelection layers) {
  const View v = make_view(attn);
  check_set(query, v.seq, "query");
  check_set(targets, v.seq, "target");
  return mass_to(v, selected_layers(v, layers), query, targets);
}

RatioResult attention_ratio(const Tensor& attn, IndexSet query, IndexSet xrag, IndexSet non_xrag,
                            LayerSelection layers) {
  const View v = make_view(attn);
  check_set(query, v.seq, "query");
  check_set(xrag, v.seq, "xrag");
  check_set(non_xrag, v.seq, "non-xrag");
  const std::set<std::int64_t> xs(xrag.begin(), xrag.end());
  for (auto p : non_xrag) {
    if (xs.count(p)) throw DomainError("xrag and non-xrag sets overlap at " + std::to_string(p));
  }
  const auto ls = selected_layers(v, layers);
  const Eigen::MatrixXd num = mass_to(v, ls, query, xrag) / static_cast<double>(xrag.size());
  const Eigen::MatrixXd den = mass_to(v, ls, query, non_xrag) / static_cast<double>(non_xrag.size());

  RatioResult r;
  r.ratio.resize(num.rows(), num.cols());
  for (Eigen::Index i = 0; i < num.size(); ++i) {
    const bool floored = den(i) < kRatioFloor;
    double q = num(i) / (floored ? kRatioFloor : den(i));
    if (floored || q > kRatioCap) {
      q = std::min(q, kRatioCap);
      ++r.capped;
    }
    r.ratio(i) = q;
  }
  return r;
}

Eigen::MatrixXd attention_entropy(const Tensor& attn, IndexSet positions, LayerSelection layers) {
  const View v = make_view(attn);
  check_set(positions, v.seq, "positions");
  const auto ls = selected_layers(v, layers);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ls.size() * v.heads), static_cast<Eigen::Index>(positions.size()));
  for (std::size_t li = 0; li < ls.size(); ++li) {
    for (std::size_t h = 0; h < v.heads; ++h) {
      for (std::size_t pi = 0; pi < positions.size(); ++pi) {
        const auto i = static_cast<std::size_t>(positions[pi]);
        double total = 0.0;
        for (std::size_t j = 0; j < v.seq; ++j) total += v(ls[li], h, i, j);
        if (!(total > 0.0)) {
          throw DomainError("attention row " + std::to_string(i) + " (layer " + std::to_string(ls[li]) + ", head " +
                            std::to_string(h) + ") has zero mass");
        }
        double ent = 0.0;
        for (std::size_t j = 0; j < v.seq; ++j) {
          const double p = v(ls[li], h, i, j) / total;
          if (p > 0.0) ent -= p * std::log(p);
        }
        out(static_cast<Eigen::Index>(li * v.heads + h), static_cast<Eigen::Index>(pi)) = std::max(ent, 0.0);
      }
    }
  }
  return out;
}

std::array<double, 12> AttentionFeatures::as_array() const {
  return {xrag_mass.mean, xrag_mass.max, xrag_mass.min, xrag_mass.std, ratio.mean,   ratio.max,
          ratio.min,      ratio.std,     entropy.mean,  entropy.max,   entropy.min, entropy.std};
}

AttentionFeatures attention_feature_vector(const Tensor& attn, IndexSet query, IndexSet xrag, IndexSet non_xrag,
                                           LayerSelection layers) {
  const View v = make_view(attn);
  AttentionFeatures f;
  f.xrag_mass = summarize_matrix(mean_attention_to(attn, query, xrag, layers));
  const RatioResult r = attention_ratio(attn, query, xrag, non_xrag, layers);
  f.ratio = summarize_matrix(r.ratio);
  f.ratio_capped = r.capped;
  f.entropy = summarize_matrix(attention_entropy(attn, query, layers));

  // Causal masking leaves zeros but every query row should still sum to ~1.
  for (auto l : selected_layers(v, layers)) {
    for (std::size_t h = 0; h < v.heads; ++h) {
      for (auto i : query) {
        double total = 0.0;
        for (std::size_t j = 0; j < v.seq; ++j) total += v(l, h, static_cast<std::size_t>(i), j);
        if (std::abs(total - 1.0) > kRowSumTolerance) ++f.rows_off_simplex;
      }
    }
  }
  return f;
}

std::vector<std::int64_t> complement_positions(std::size_t seq_len, IndexSet xrag, IndexSet query) {
  std::set<std::int64_t> skip(xrag.begin(), xrag.end());
  skip.insert(query.begin(), query.end());
  std::vector<std::int64_t> out;
  for (std::size_t p = 0; p < seq_len; ++p) {
    if (!skip.count(static_cast<std::int64_t>(p))) out.push_back(static_cast<std::int64_t>(p));
  }
  return out;
}

}  // namespace overflow
