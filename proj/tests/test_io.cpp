#include <gtest/gtest.h>

#include <sstream>

#include "wrg/io.hpp"

using namespace wrg;

namespace {

Errc parse_code(const std::string& text, bool network) {
  std::istringstream in(text);
  try {
    if (network)
      read_network(in);
    else
      read_graph(in);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::io_error;
}

}  // namespace

TEST(Io, GraphRoundTrip) {
  const auto g = generate_regular(100, 3, 42);
  std::stringstream ss;
  write_graph(ss, g);
  const auto h = read_graph(ss);
  EXPECT_EQ(h.n(), 100u);
  EXPECT_EQ(h.seed(), 42u);
  EXPECT_TRUE(std::equal(g.edges().begin(), g.edges().end(), h.edges().begin(), h.edges().end()));
}

TEST(Io, NetworkRoundTripIsExact) {
  const auto net = weigh(generate_regular(200, 4, 1), WeibullParams(0.7), 2);
  std::stringstream ss;
  write_network(ss, net);
  const auto back = read_network(ss);
  EXPECT_EQ(back.params().alpha, 0.7);
  EXPECT_EQ(back.seed(), 2u);
  ASSERT_EQ(back.weights().size(), net.weights().size());
  for (std::size_t i = 0; i < net.weights().size(); ++i) EXPECT_EQ(back.weights()[i], net.weights()[i]);
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(fmt_double(x)), x);
}

TEST(Io, BlankLinesAreIgnored) {
  EXPECT_NO_THROW({
    std::istringstream in("\n4 3 0\n\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n\n");
    read_graph(in);
  });
}

TEST(Io, MalformedFilesAreRejected) {
  EXPECT_EQ(parse_code("", false), Errc::parse_error);
  EXPECT_EQ(parse_code("4 3\n", false), Errc::parse_error);
  EXPECT_EQ(parse_code("4 3 0\n0 1\n0 2\n", false), Errc::parse_error);
  EXPECT_EQ(parse_code("4 3 0\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n5 6\n", false), Errc::parse_error);
  EXPECT_EQ(parse_code("4 3 0\n0 1 9\n0 2\n0 3\n1 2\n1 3\n2 3\n", false), Errc::parse_error);
  EXPECT_EQ(parse_code("4 3 0\n0 2\n0 1\n0 3\n1 2\n1 3\n2 3\n", false), Errc::parse_error);
  EXPECT_EQ(parse_code("4 3 0\n0 1\n0 1\n0 3\n1 2\n1 3\n2 3\n", false), Errc::parse_error);
  EXPECT_EQ(parse_code("4 3 0\n0 x\n0 2\n0 3\n1 2\n1 3\n2 3\n", false), Errc::parse_error);
  EXPECT_EQ(parse_code("5 3 0\n", false), Errc::invalid_parameters);
  EXPECT_EQ(parse_code("4 3 1 0\n0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3\n", true), Errc::parse_error);
}

TEST(Io, MissingFileIsAnIoError) {
  try {
    open_input("/nonexistent/dir/graph.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io_error);
  }
}
