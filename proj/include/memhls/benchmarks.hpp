#pragma once

// Parameterized DSP benchmark graphs: FIR, LMS adaptive filter, radix-2 FFT.

#include <cstddef>
#include <string>
#include <vector>

#include "memhls/error.hpp"
#include "memhls/sfg.hpp"

namespace memhls {

enum class AdderShape { Chain, Tree };

namespace detail {

inline std::string indexed(const std::string& base, std::size_t i) {
  return base + "(" + std::to_string(i) + ")";
}

// Sums `terms` with add vertices named <prefix>_<k>; returns the root.
inline std::size_t reduce_sum(Sfg& g, std::vector<std::size_t> terms, AdderShape shape,
                              const std::string& prefix) {
  std::size_t next = 0;
  auto make_add = [&](std::size_t a, std::size_t b) {
    const auto v = g.add_vertex(prefix + "_" + std::to_string(next++), VertexKind::Add);
    g.add_edge(a, v);
    g.add_edge(b, v);
    return v;
  };
  if (shape == AdderShape::Chain) {
    std::size_t acc = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) acc = make_add(acc, terms[i]);
    return acc;
  }
  while (terms.size() > 1) {
    std::vector<std::size_t> level;
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2) level.push_back(make_add(terms[i], terms[i + 1]));
    if (terms.size() % 2) level.push_back(terms.back());
    terms = std::move(level);
  }
  return terms.front();
}

// x(0) data followed by delays x(1..n-1): the sample window of a signal.
inline std::vector<std::size_t> ageing_vector(Sfg& g, const std::string& base, std::size_t n) {
  std::vector<std::size_t> out;
  out.push_back(g.add_vertex(indexed(base, 0), VertexKind::Data));
  for (std::size_t i = 1; i < n; ++i) {
    out.push_back(g.add_vertex(indexed(base, i), VertexKind::Delay));
    g.add_edge(out[i - 1], out[i]);
  }
  return out;
}

}  // namespace detail

// y = sum h(i) * x(i). Coefficients are static constants; x is an ageing vector.
inline Sfg gen_fir(std::size_t n, AdderShape shape = AdderShape::Chain) {
  if (n < 1) throw Error("gen_fir: tap count must be >= 1");
  Sfg g;
  std::vector<std::size_t> h;
  for (std::size_t i = 0; i < n; ++i) h.push_back(g.add_vertex(detail::indexed("h", i), VertexKind::Constant));
  const auto x = detail::ageing_vector(g, "x", n);
  std::vector<std::size_t> products;
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = g.add_vertex("mul_" + std::to_string(i), VertexKind::Mul);
    g.add_edge(h[i], m);
    g.add_edge(x[i], m);
    products.push_back(m);
  }
  const auto sum = detail::reduce_sum(g, products, shape, "acc");
  const auto y = g.add_vertex("y", VertexKind::Output);
  g.add_edge(sum, y);
  g.close_polar();
  return g;
}

// LMS adaptive filter, one iteration:
//   y = sum h(i) x(i);  e = d - y;  adapt = deux_mu * e;  h(i) <- h(i) + adapt * x(i)
// h(i) loops back through a delay labelled h(i); x is an ageing vector.
inline Sfg gen_lms(std::size_t n, AdderShape shape = AdderShape::Tree) {
  if (n < 1) throw Error("gen_lms: tap count must be >= 1");
  Sfg g;
  const auto adapt = g.add_vertex("adapt", VertexKind::Data);
  const auto mu = g.add_vertex("deux_mu", VertexKind::Constant);
  std::vector<std::size_t> h;
  for (std::size_t i = 0; i < n; ++i) h.push_back(g.add_vertex(detail::indexed("h", i), VertexKind::Data));
  const auto x = detail::ageing_vector(g, "x", n);
  const auto d = g.add_vertex("d", VertexKind::Input);

  std::vector<std::size_t> products;
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = g.add_vertex("fmul_" + std::to_string(i), VertexKind::Mul);
    g.add_edge(h[i], m);
    g.add_edge(x[i], m);
    products.push_back(m);
  }
  const auto y = detail::reduce_sum(g, products, shape, "facc");
  const auto err = g.add_vertex("err", VertexKind::Sub);
  g.add_edge(d, err);
  g.add_edge(y, err);
  const auto e_out = g.add_vertex("e", VertexKind::Output);
  g.add_edge(err, e_out);

  const auto amul = g.add_vertex("amul", VertexKind::Mul);
  g.add_edge(mu, amul);
  g.add_edge(err, amul);
  g.add_edge(amul, adapt);

  for (std::size_t i = 0; i < n; ++i) {
    const auto um = g.add_vertex("umul_" + std::to_string(i), VertexKind::Mul);
    g.add_edge(adapt, um);
    g.add_edge(x[i], um);
    const auto ua = g.add_vertex("uadd_" + std::to_string(i), VertexKind::Add);
    g.add_edge(h[i], ua);
    g.add_edge(um, ua);
    const auto z = g.add_vertex("hz_" + std::to_string(i), VertexKind::Delay, detail::indexed("h", i));
    g.add_edge(ua, z);
    g.add_edge(z, h[i]);
  }
  g.close_polar();
  return g;
}

// Radix-2 decimation-in-time FFT over complex samples xr(i) + j xi(i).
// Twiddle factors are multiplier immediates; W^0 butterflies skip the
// complex multiply. Butterfly vertices are named s<stage>_<top>_{ar,ai,br,bi}.
inline Sfg gen_fft(std::size_t n) {
  if (n < 2 || n > 1024 || (n & (n - 1)) != 0) throw Error("gen_fft: point count must be a power of two in [2,1024]");
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;

  Sfg g;
  std::vector<std::size_t> xr(n), xi(n);
  for (std::size_t i = 0; i < n; ++i) xr[i] = g.add_vertex(detail::indexed("xr", i), VertexKind::Data);
  for (std::size_t i = 0; i < n; ++i) xi[i] = g.add_vertex(detail::indexed("xi", i), VertexKind::Data);

  auto bitrev = [log2n](std::size_t v) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < log2n; ++b) r |= ((v >> b) & 1u) << (log2n - 1 - b);
    return r;
  };
  std::vector<std::size_t> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = xr[bitrev(i)];
    im[i] = xi[bitrev(i)];
  }

  auto op = [&g](const std::string& id, VertexKind k, std::initializer_list<std::size_t> in) {
    const auto v = g.add_vertex(id, k);
    for (auto p : in) g.add_edge(p, v);
    return v;
  };

  for (std::size_t s = 1; s <= log2n; ++s) {
    const std::size_t span = std::size_t{1} << s;
    const std::size_t half = span / 2;
    for (std::size_t block = 0; block < n; block += span) {
      for (std::size_t j = 0; j < half; ++j) {
        const auto top = block + j;
        const auto bot = top + half;
        const auto tag = "s" + std::to_string(s) + "_" + std::to_string(top);
        std::size_t tr = re[bot], ti = im[bot];
        if (j * (n / span) != 0) {
          const auto m1 = op(tag + "_m1", VertexKind::Mul, {re[bot]});
          const auto m2 = op(tag + "_m2", VertexKind::Mul, {im[bot]});
          const auto m3 = op(tag + "_m3", VertexKind::Mul, {re[bot]});
          const auto m4 = op(tag + "_m4", VertexKind::Mul, {im[bot]});
          tr = op(tag + "_tr", VertexKind::Sub, {m1, m2});
          ti = op(tag + "_ti", VertexKind::Add, {m3, m4});
        }
        const auto ar = op(tag + "_ar", VertexKind::Add, {re[top], tr});
        const auto ai = op(tag + "_ai", VertexKind::Add, {im[top], ti});
        const auto br = op(tag + "_br", VertexKind::Sub, {re[top], tr});
        const auto bi = op(tag + "_bi", VertexKind::Sub, {im[top], ti});
        re[top] = ar;
        im[top] = ai;
        re[bot] = br;
        im[bot] = bi;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    op(detail::indexed("Xr", i), VertexKind::Output, {re[i]});
    op(detail::indexed("Xi", i), VertexKind::Output, {im[i]});
  }
  g.close_polar();
  return g;
}

}  // namespace memhls
