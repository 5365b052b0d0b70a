#include "core/accel_sim.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "core/error.hpp"

namespace dslr::accel {

using online::ceil_log2;
using online::OnlineMultiplier;
using online::ReductionTree;
using sd::SignedDigit;

namespace {

std::int64_t product(const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const std::vector<std::int64_t>& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "x" : "") + std::to_string(shape[i]);
  return s;
}

void expect_shape(const Tensor& t, const std::vector<std::int64_t>& want, const char* what) {
  if (t.shape != want) {
    throw Error(ErrorCode::Shape, std::string(what) + " shape " + shape_str(t.shape) +
                                      " does not match expected " + shape_str(want));
  }
}

// Steps a window needs to drain: multiplier delay, tree fill, and
// 2P product digits plus one digit per tree level and one alignment digit per
// tree.
int window_steps(int precision, int depth) {
  return OnlineMultiplier::kOnlineDelay + 2 * depth + (2 * precision + depth + 2);
}

}  // namespace

Tensor Tensor::fixed(std::vector<std::int64_t> shape, int width) {
  Tensor t;
  t.data.assign(std::size_t(product(shape)), 0);
  t.shape = std::move(shape);
  t.width = width;
  t.frac_bits = width - 1;
  return t;
}

Tensor Tensor::accumulator(std::vector<std::int64_t> shape, int frac_bits) {
  Tensor t;
  t.data.assign(std::size_t(product(shape)), 0);
  t.shape = std::move(shape);
  t.width = 64;
  t.frac_bits = frac_bits;
  return t;
}

void Tensor::check() const {
  for (auto d : shape) {
    if (d < 1) throw Error(ErrorCode::Shape, "tensor dimension < 1 in " + shape_str(shape));
  }
  if (std::int64_t(data.size()) != product(shape)) {
    throw Error(ErrorCode::Shape, "tensor holds " + std::to_string(data.size()) +
                                      " values but shape " + shape_str(shape) + " needs " +
                                      std::to_string(product(shape)));
  }
  if (width < 2 || width > 64 || frac_bits < 0) {
    throw Error(ErrorCode::InvalidArgument, "unsupported tensor width/frac_bits");
  }
  if (width < 64) {
    const std::int64_t lim = std::int64_t(1) << (width - 1);
    for (auto v : data) {
      if (v < -lim || v >= lim) {
        throw Error(ErrorCode::Range, "tensor value " + std::to_string(v) +
                                          " out of range for width " + std::to_string(width));
      }
    }
  }
}

std::int64_t spatial_tiles(const LayerConfig& layer, const TileConfig& tile) {
  return ceil_div(layer.R * layer.C, tile.Tr * tile.Tc);
}

std::int64_t pass_count(const LayerConfig& layer, const TileConfig& tile) {
  return spatial_tiles(layer, tile) * ceil_div(layer.M, tile.Tm) * ceil_div(layer.N, tile.Tn);
}

std::vector<TilePass> control_schedule(const LayerConfig& layer, const TileConfig& tile) {
  require_valid(layer);
  require_valid(tile);
  const std::int64_t s_tiles = spatial_tiles(layer, tile);
  const std::int64_t m_tiles = ceil_div(layer.M, tile.Tm);
  const std::int64_t n_tiles = ceil_div(layer.N, tile.Tn);
  const std::int64_t lanes = tile.Tr * tile.Tc;
  const std::int64_t pixels = layer.R * layer.C;

  std::vector<TilePass> passes;
  passes.reserve(std::size_t(s_tiles * m_tiles * n_tiles));
  for (std::int64_t mt = 0; mt < m_tiles; ++mt) {
    for (std::int64_t nt = 0; nt < n_tiles; ++nt) {
      for (std::int64_t st = 0; st < s_tiles; ++st) {
        TilePass p;
        p.index = std::int64_t(passes.size());
        p.m_tile = mt;
        p.n_tile = nt;
        p.spatial_tile = st;
        p.m_begin = mt * tile.Tm;
        p.m_end = std::min(layer.M, p.m_begin + tile.Tm);
        p.n_begin = nt * tile.Tn;
        p.n_end = std::min(layer.N, p.n_begin + tile.Tn);
        p.pix_begin = st * lanes;
        p.pix_end = std::min(pixels, p.pix_begin + lanes);
        p.load_weights = st == 0;
        p.read_partials = nt > 0;
        p.store_outputs = nt == n_tiles - 1;
        passes.push_back(p);
      }
    }
  }
  return passes;
}

Tensor reference_conv(const LayerConfig& layer, const Tensor& inputs, const Tensor& weights) {
  require_valid(layer);
  inputs.check();
  weights.check();
  const std::int64_t rin = layer.input_rows(), cin = layer.input_cols();
  expect_shape(inputs, {layer.N, rin, cin}, "input");
  expect_shape(weights, {layer.M, layer.N, layer.K, layer.K}, "weight");

  Tensor out = Tensor::accumulator({layer.M, layer.R, layer.C}, inputs.frac_bits + weights.frac_bits);
  for (std::int64_t m = 0; m < layer.M; ++m) {
    for (std::int64_t r = 0; r < layer.R; ++r) {
      for (std::int64_t c = 0; c < layer.C; ++c) {
        std::int64_t acc = 0;
        for (std::int64_t n = 0; n < layer.N; ++n) {
          for (std::int64_t kh = 0; kh < layer.K; ++kh) {
            const std::int64_t h = r * layer.stride + kh - layer.padding;
            if (h < 0 || h >= rin) continue;
            for (std::int64_t kw = 0; kw < layer.K; ++kw) {
              const std::int64_t w = c * layer.stride + kw - layer.padding;
              if (w < 0 || w >= cin) continue;
              acc += inputs.data[std::size_t((n * rin + h) * cin + w)] *
                     weights.data[std::size_t(((m * layer.N + n) * layer.K + kh) * layer.K + kw)];
            }
          }
        }
        out.data[std::size_t((m * layer.R + r) * layer.C + c)] = acc;
      }
    }
  }
  return out;
}

WindowUnit::WindowUnit(std::int64_t channels, std::int64_t kernel_pixels, int precision,
                       bool inject_adder_fault)
    : channels_(channels),
      kernel_pixels_(kernel_pixels),
      precision_(precision),
      fault_(inject_adder_fault),
      channel_depth_(ceil_log2(std::uint64_t(channels))),
      kernel_depth_(ceil_log2(std::uint64_t(kernel_pixels))),
      weights_(std::size_t(channels * kernel_pixels), Fixed(0, precision)) {}

void WindowUnit::load_weights(std::span<const Fixed> weights) {
  if (std::int64_t(weights.size()) != channels_ * kernel_pixels_) {
    throw Error(ErrorCode::Shape, "window unit expects " + std::to_string(channels_ * kernel_pixels_) +
                                      " weights");
  }
  std::copy(weights.begin(), weights.end(), weights_.begin());
  ++weight_loads_;
}

WindowResult WindowUnit::run(std::span<const Fixed> activations) {
  const std::size_t lanes = std::size_t(channels_ * kernel_pixels_);
  if (activations.size() != lanes) {
    throw Error(ErrorCode::Shape, "window unit expects " + std::to_string(lanes) + " activations");
  }
  const std::size_t k2 = std::size_t(kernel_pixels_);
  const std::size_t tn = std::size_t(channels_);

  std::vector<DigitStream> serial;
  serial.reserve(lanes);
  for (const auto& a : activations) serial.push_back(sd::fixed_to_stream(a));

  std::vector<OnlineMultiplier> mults;
  mults.reserve(lanes);
  for (const auto& w : weights_) mults.emplace_back(w);

  // One PE per kernel pixel: T_n multipliers into a channel tree.
  std::vector<ReductionTree> pe_trees;
  std::vector<int> pe_scales;
  pe_trees.reserve(k2);
  for (std::size_t k = 0; k < k2; ++k) {
    std::vector<int> scales(tn);
    for (std::size_t c = 0; c < tn; ++c) scales[c] = serial[c * k2 + k].scale_exp();
    pe_trees.emplace_back(scales, fault_);
    pe_scales.push_back(pe_trees.back().output_scale());
  }
  ReductionTree kernel_tree(pe_scales, fault_);

  const int depth = channel_depth_ + kernel_depth_;
  const int total = window_steps(precision_, depth);

  WindowResult res;
  res.depth = depth;
  std::vector<SignedDigit> products(lanes);
  std::vector<SignedDigit> pe_in(tn);
  std::vector<SignedDigit> kernel_in(k2);
  std::vector<SignedDigit> out;
  bool products_live = false, pe_live = false;

  for (int t = 0; t < total; ++t) {
    products_live = false;
    for (std::size_t i = 0; i < lanes; ++i) {
      const auto& s = serial[i];
      auto p = mults[i].step(std::size_t(t) < s.size() ? s.at(std::size_t(t)) : SignedDigit::zero());
      if (p) {
        products[i] = *p;
        products_live = true;
      }
    }
    if (!products_live) continue;

    pe_live = false;
    for (std::size_t k = 0; k < k2; ++k) {
      for (std::size_t c = 0; c < tn; ++c) pe_in[c] = products[c * k2 + k];
      if (auto z = pe_trees[k].step(pe_in)) {
        kernel_in[k] = *z;
        pe_live = true;
      }
    }
    if (!pe_live) continue;

    if (auto z = kernel_tree.step(kernel_in)) {
      if (out.empty()) res.first_digit_step = t + 1;
      out.push_back(*z);
    }
  }
  for (const auto& m : mults) {
    if (!m.residual().is_zero()) throw Error(ErrorCode::State, "multiplier residual not drained");
  }
  res.stream = DigitStream(std::move(out), kernel_tree.output_scale());
  return res;
}

unsigned worker_threads(unsigned requested) {
  unsigned n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DSLR_SIM_THREADS")) {
      const long cap = std::strtol(env, nullptr, 10);
      if (cap >= 1) n = std::min(n, unsigned(cap));
    }
  }
  return std::max(1u, n);
}

std::int64_t estimated_multiplier_steps(const LayerConfig& layer, const TileConfig& tile) {
  const int depth = ceil_log2(std::uint64_t(tile.Tn)) + ceil_log2(std::uint64_t(layer.K * layer.K));
  const std::int64_t windows = layer.M * layer.R * layer.C * ceil_div(layer.N, tile.Tn);
  return windows * tile.Tn * layer.K * layer.K * window_steps(int(tile.precision), depth);
}

RunResult run_layer(const LayerConfig& layer, const TileConfig& tile, const Tensor& inputs,
                    const Tensor& weights, const SimOptions& opts) {
  require_valid(layer);
  require_valid(tile);
  if (tile.delta_mult != OnlineMultiplier::kOnlineDelay ||
      tile.delta_add != online::OnlineAdder::kOnlineDelay) {
    throw Error(ErrorCode::Validation, "the simulated online units have delta_mult = delta_add = 2");
  }
  const int precision = int(tile.precision);
  if (precision < 2 || precision > 24) {
    throw Error(ErrorCode::Validation, "simulated precision must lie in [2, 24]");
  }
  inputs.check();
  weights.check();
  const std::int64_t rin = layer.input_rows(), cin = layer.input_cols();
  expect_shape(inputs, {layer.N, rin, cin}, "input");
  expect_shape(weights, {layer.M, layer.N, layer.K, layer.K}, "weight");
  for (const Tensor* t : {&inputs, &weights}) {
    if (t->width != precision || t->frac_bits != precision - 1) {
      throw Error(ErrorCode::Shape, "tensor width " + std::to_string(t->width) +
                                        " does not match tile precision " + std::to_string(precision));
    }
  }

  const auto schedule = control_schedule(layer, tile);
  const std::int64_t k2 = layer.K * layer.K;
  const std::int64_t tn = tile.Tn;
  const int out_frac = 2 * (precision - 1);

  RunResult res;
  res.outputs = Tensor::accumulator({layer.M, layer.R, layer.C}, out_frac);
  res.passes = std::int64_t(schedule.size());
  std::vector<std::int64_t> pass_cycles(schedule.size(), 0);
  std::vector<int> pass_first(schedule.size(), 0);

  const std::int64_t m_tiles = ceil_div(layer.M, tile.Tm);
  const std::int64_t passes_per_m = std::int64_t(schedule.size()) / m_tiles;

  std::vector<std::int64_t> loads(std::size_t(m_tiles), 0);
  std::vector<std::int64_t> steps(std::size_t(m_tiles), 0);

  auto run_m_tile = [&](std::int64_t mt) {
    const std::int64_t m_begin = mt * tile.Tm;
    const std::int64_t m_end = std::min(layer.M, m_begin + tile.Tm);
    std::vector<WindowUnit> units;
    for (std::int64_t m = m_begin; m < m_end; ++m) {
      units.emplace_back(tn, k2, precision, opts.inject_adder_fault);
    }
    std::vector<Fixed> w(std::size_t(tn * k2), Fixed(0, precision));
    std::vector<Fixed> act(std::size_t(tn * k2), Fixed(0, precision));

    for (std::int64_t pi = mt * passes_per_m; pi < (mt + 1) * passes_per_m; ++pi) {
      const TilePass& p = schedule[std::size_t(pi)];
      if (p.load_weights) {
        for (std::int64_t m = p.m_begin; m < p.m_end; ++m) {
          for (std::int64_t c = 0; c < tn; ++c) {
            const std::int64_t n = p.n_begin + c;
            for (std::int64_t k = 0; k < k2; ++k) {
              const std::int64_t raw =
                  n < p.n_end ? weights.data[std::size_t((m * layer.N + n) * k2 + k)] : 0;
              w[std::size_t(c * k2 + k)] = Fixed(raw, precision);
            }
          }
          units[std::size_t(m - m_begin)].load_weights(w);
        }
        ++loads[std::size_t(mt)];
      }

      int first = 0;
      int depth = 0;
      for (std::int64_t pix = p.pix_begin; pix < p.pix_end; ++pix) {
        const std::int64_t r = pix / layer.C, col = pix % layer.C;
        // Window extraction; padding and masked channels stream zeros.
        for (std::int64_t c = 0; c < tn; ++c) {
          const std::int64_t n = p.n_begin + c;
          for (std::int64_t kh = 0; kh < layer.K; ++kh) {
            for (std::int64_t kw = 0; kw < layer.K; ++kw) {
              const std::int64_t h = r * layer.stride + kh - layer.padding;
              const std::int64_t x = col * layer.stride + kw - layer.padding;
              std::int64_t raw = 0;
              if (n < p.n_end && h >= 0 && h < rin && x >= 0 && x < cin) {
                raw = inputs.data[std::size_t((n * rin + h) * cin + x)];
              }
              act[std::size_t(c * k2 + kh * layer.K + kw)] = Fixed(raw, precision);
            }
          }
        }
        for (std::int64_t m = p.m_begin; m < p.m_end; ++m) {
          WindowResult wr = units[std::size_t(m - m_begin)].run(act);
          if (first == 0) {
            first = wr.first_digit_step;
          } else if (wr.first_digit_step != first) {
            throw Error(ErrorCode::State, "window units out of lockstep");
          }
          depth = wr.depth;
          steps[std::size_t(mt)] += tn * k2 * window_steps(precision, wr.depth);
          res.outputs.data[std::size_t(m * layer.R * layer.C + pix)] += wr.value().to_fixed_raw(out_frac);
        }
      }
      pass_first[std::size_t(pi)] = first;
      // Fill latency measured by the run, then P_i + tree-depth output digits.
      pass_cycles[std::size_t(pi)] = (first - 1) + precision + depth;
    }
  };

  const unsigned nthreads = std::min<unsigned>(worker_threads(opts.threads), unsigned(m_tiles));
  if (nthreads <= 1) {
    for (std::int64_t mt = 0; mt < m_tiles; ++mt) run_m_tile(mt);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (unsigned t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::int64_t mt = t; mt < m_tiles; mt += nthreads) run_m_tile(mt);
        } catch (...) {
          std::lock_guard lk(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (std::size_t i = 0; i < pass_cycles.size(); ++i) res.measured_cycles += pass_cycles[i];
  res.per_pass_cycles = pass_cycles.front();
  res.first_digit_step = pass_first.front();
  for (auto l : loads) res.weight_loads += l;
  for (auto s : steps) res.multiplier_steps += s;
  return res;
}

}  // namespace dslr::accel
