#pragma once

// Plain-text graph and network files.
//
//   graph:    header `n d seed`,       then `i j`   per edge in canonical order
//   network:  header `n d alpha seed`, then `i j w` per edge, w at %.17g
//
// Readers rebuild the graph through RegularGraph::from_edges, so every
// structural invariant is re-checked on load.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "regular_graph.hpp"
#include "weights.hpp"

namespace wrg {

/// Shortest round-trip decimal is not portable before C++23's <print>;
/// 17 significant digits always round-trips a double.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_graph(std::ostream& os, const RegularGraph& g) {
  os << g.n() << ' ' << g.d() << ' ' << g.seed() << '\n';
  for (const auto& e : g.edges()) os << e.u << ' ' << e.v << '\n';
}

inline void write_network(std::ostream& os, const WeightedNetwork& net) {
  const auto& g = net.graph();
  os << g.n() << ' ' << g.d() << ' ' << fmt_double(net.params().alpha) << ' ' << net.seed() << '\n';
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    os << g.edge(e).u << ' ' << g.edge(e).v << ' ' << fmt_double(net.weight(e)) << '\n';
}

namespace detail {

inline std::istringstream next_line(std::istream& is, std::size_t& line_no, const char* what) {
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
  }
  throw Error(Errc::parse_error, std::string("unexpected end of file while reading ") + what);
}

template <class... T>
void parse_fields(std::istringstream& ls, std::size_t line_no, T&... out) {
  (ls >> ... >> out);
  std::string rest;
  if (ls.fail() || (ls >> rest))
    throw Error(Errc::parse_error, "malformed line " + std::to_string(line_no));
}

inline std::vector<Edge> read_edges(std::istream& is, std::size_t count, std::size_t& line_no,
                                    std::vector<double>* weights) {
  std::vector<Edge> edges(count);
  if (weights) weights->resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto ls = next_line(is, line_no, "edges");
    std::int64_t i = 0, j = 0;
    if (weights)
      parse_fields(ls, line_no, i, j, (*weights)[k]);
    else
      parse_fields(ls, line_no, i, j);
    if (i < 0 || j < 0 || i > UINT32_MAX || j > UINT32_MAX)
      throw Error(Errc::parse_error, "vertex id out of range on line " + std::to_string(line_no));
    edges[k] = {static_cast<Vertex>(i), static_cast<Vertex>(j)};
  }
  std::string extra;
  if (is >> extra) throw Error(Errc::parse_error, "trailing content after the last edge");
  for (std::size_t k = 0; k < count; ++k) {
    const bool ordered = edges[k].u < edges[k].v && (k == 0 || edges[k - 1] < edges[k]);
    if (!ordered) throw Error(Errc::parse_error, "edges not in canonical order at edge " + std::to_string(k));
  }
  return edges;
}

}  // namespace detail

inline RegularGraph read_graph(std::istream& is) {
  std::size_t line_no = 0;
  auto hs = detail::next_line(is, line_no, "header");
  std::size_t n = 0, d = 0;
  std::uint64_t seed = 0;
  detail::parse_fields(hs, line_no, n, d, seed);
  check_regular_parameters(n, d);
  auto edges = detail::read_edges(is, n * d / 2, line_no, nullptr);
  return RegularGraph::from_edges(n, d, std::move(edges), seed);
}

inline WeightedNetwork read_network(std::istream& is) {
  std::size_t line_no = 0;
  auto hs = detail::next_line(is, line_no, "header");
  std::size_t n = 0, d = 0;
  double alpha = 0;
  std::uint64_t seed = 0;
  detail::parse_fields(hs, line_no, n, d, alpha, seed);
  check_regular_parameters(n, d);
  std::vector<double> w;
  auto edges = detail::read_edges(is, n * d / 2, line_no, &w);
  // Canonical order was checked, so w lines up with the edge ids.
  auto g = RegularGraph::from_edges(n, d, std::move(edges), seed);
  return WeightedNetwork(std::move(g), std::move(w), WeibullParams(alpha), seed);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  return out;
}

}  // namespace wrg
