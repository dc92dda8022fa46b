#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "kacdp/error.hpp"
#include "kacdp/explain.hpp"
#include "oracles.hpp"
#include "tmpdir.hpp"
#include "toy.hpp"

using namespace kacdp;

namespace {

Matrix uniform_samples(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, d);
  for (double& v : m.values) v = u(rng);
  return m;
}

void zero_edge(KanNetwork& net, std::size_t l, std::size_t q, std::size_t p) {
  ActivationEdge& e = net.layers[l].edge(q, p);
  e.w_b = 0.0;
  e.w_s = 0.0;
  std::fill(e.spline.coefficients.begin(), e.spline.coefficients.end(), 0.0);
}

KanNetwork zeroed(const std::vector<int>& widths) {
  KanNetwork net = init_network(widths, 5, 3, 1);
  net.set_parameters(std::vector<double>(net.parameter_count(), 0.0));
  return net;
}

// Small structural check of the DOT dialect export_dot emits: balanced
// braces, every statement terminated, node ids declared before use.
struct DotSummary {
  bool ok = true;
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

DotSummary check_dot(const std::string& text) {
  DotSummary s;
  std::istringstream in(text);
  std::string line;
  int depth = 0;
  std::set<std::string> declared;
  const std::regex node_re(R"(^\s*(n\d+_\d+) \[label="[^"]*", shape=(box|circle|doublecircle)\];$)");
  const std::regex edge_re(R"(^\s*(n\d+_\d+) -> (n\d+_\d+) \[label="-?\d+\.\d{4}", penwidth=\d+\.\d{3}\];$)");
  const std::regex other_re(R"(^\s*(rankdir=LR|rank=same|node \[[^\]]*\]);$)");
  std::getline(in, line);
  if (line != "digraph kan {") s.ok = false;
  depth = 1;
  while (std::getline(in, line)) {
    std::smatch m;
    if (line == "}" || line == "  }") {
      --depth;
    } else if (line.ends_with("{")) {
      ++depth;
    } else if (std::regex_match(line, m, node_re)) {
      declared.insert(m[1]);
      ++s.nodes;
    } else if (std::regex_match(line, m, edge_re)) {
      if (!declared.count(m[1]) || !declared.count(m[2])) s.ok = false;
      ++s.edges;
    } else if (!std::regex_match(line, other_re)) {
      s.ok = false;
    }
    if (depth < 0) s.ok = false;
  }
  if (depth != 0) s.ok = false;
  return s;
}

}  // namespace

TEST_CASE("edge scores: zero edge and zero-variance column") {
  KanNetwork net = toy::randomized({2, 1}, 5, 3, 3);
  zero_edge(net, 0, 0, 1);
  Matrix x = uniform_samples(50, 2, 4);
  const EdgeScoreMatrix s = edge_scores(net, x);
  CHECK(s.layers[0](0, 1) == 0.0);
  CHECK(s.layers[0](0, 0) > 0.0);

  KanNetwork net2 = toy::randomized({2, 1}, 5, 3, 3);
  for (std::size_t i = 0; i < x.rows; ++i) x(i, 0) = 0.37;
  CHECK(edge_scores(net2, x).layers[0](0, 0) == 0.0);

  CHECK_THROWS_AS(edge_scores(net2, Matrix(0, 2)), Error);
}

TEST_CASE("edge scores match a two-pass standard deviation") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const KanNetwork net = toy::randomized({2, 1}, 5, 3, 20 + seed);
    const Matrix x = uniform_samples(100, 2, 30 + seed);
    const EdgeScoreMatrix s = edge_scores(net, x);
    for (std::size_t p = 0; p < 2; ++p) {
      std::vector<double> phi;
      for (std::size_t i = 0; i < x.rows; ++i) {
        phi.push_back(edge_forward(net.layers[0].edge(0, p), net.layers[0].knots, x(i, p)));
      }
      CHECK(std::abs(s.layers[0](0, p) - std::sqrt(oracle::variance(phi))) < 1e-10);
    }
  }
  // a deeper net, hidden-layer edges see the hidden activations
  const KanNetwork deep = toy::randomized({3, 2, 1}, 4, 2, 9, 0.5);
  const Matrix x = uniform_samples(700, 3, 10);
  const EdgeScoreMatrix s = edge_scores(deep, x);
  for (std::size_t p = 0; p < 2; ++p) {
    std::vector<double> phi;
    for (std::size_t i = 0; i < x.rows; ++i) phi.push_back(network_forward(deep, x.row(i)).edge_outputs[1][p]);
    CHECK(std::abs(s.layers[1](0, p) - std::sqrt(oracle::variance(phi))) < 1e-10);
  }
}

TEST_CASE("attribution: a single live edge takes all the mass") {
  KanNetwork net = zeroed({10, 1});
  net.layers[0].edge(0, 3).w_b = 1.0;
  const AttributionReport r = feature_attribution(net, uniform_samples(200, 10, 1));
  for (std::size_t p = 0; p < 10; ++p) {
    if (p == 3) {
      CHECK(r.scores[p] > 0.0);
      CHECK(r.normalized_scores[p] == 1.0);
    } else {
      CHECK(r.scores[p] == 0.0);
      CHECK(r.normalized_scores[p] == 0.0);
    }
  }
  CHECK(r.ranking[0] == 3);
  CHECK(r.rank_of(3) == 1);
  // remaining ties are broken by index
  CHECK(r.ranking[1] == 0);
  CHECK(r.ranking[9] == 9);
}

TEST_CASE("attribution: symmetric features score equally") {
  KanNetwork net = toy::randomized({2, 3, 1}, 5, 3, 8, 0.4);
  for (std::size_t q = 0; q < 3; ++q) net.layers[0].edge(q, 1) = net.layers[0].edge(q, 0);
  Matrix x = uniform_samples(300, 2, 2);
  for (std::size_t i = 0; i < x.rows; ++i) x(i, 1) = x(i, 0);
  const AttributionReport r = feature_attribution(net, x);
  CHECK(r.scores[0] == r.scores[1]);
}

TEST_CASE("attribution: normalization and zero-edge nullity") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    KanNetwork net = toy::randomized({10, 4, 1}, 5, 3, 100 + seed, 0.5);
    for (std::size_t q = 0; q < 4; ++q) zero_edge(net, 0, q, 7);
    const AttributionReport r = feature_attribution(net, uniform_samples(150, 10, seed));
    CHECK(r.scores[7] == 0.0);
    double sum = 0.0;
    for (double v : r.normalized_scores) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    std::vector<std::size_t> sorted = r.ranking;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 10; ++i) CHECK(sorted[i] == i);
    for (std::size_t i = 1; i < 10; ++i) CHECK(r.scores[r.ranking[i - 1]] >= r.scores[r.ranking[i]]);
  }
}

TEST_CASE("attribution: hand-computed propagation") {
  KanNetwork net = zeroed({2, 2, 1});
  EdgeScoreMatrix e;
  e.layers.emplace_back(2, 2);
  e.layers.emplace_back(1, 2);
  e.layers[0].values = {1.0, 3.0, 2.0, 2.0};  // E0[q][p]
  e.layers[1].values = {1.0, 3.0};            // E1[0][p]
  // N1 = [1/4, 3/4]; raw_p = sum_q N1[q] E0[q][p]
  const AttributionReport r = attribution_from_scores(net, e);
  CHECK(r.scores[0] == doctest::Approx(0.25 * 1.0 + 0.75 * 2.0));
  CHECK(r.scores[1] == doctest::Approx(0.25 * 3.0 + 0.75 * 2.0));
  CHECK(r.ranking == std::vector<std::size_t>{1, 0});

  EdgeScoreMatrix bad;
  bad.layers.emplace_back(2, 3);
  CHECK_THROWS_AS(attribution_from_scores(net, bad), Error);

  // all-zero scores stay finite thanks to the division guard
  e.layers[1].values = {0.0, 0.0};
  const AttributionReport z = attribution_from_scores(net, e);
  for (double v : z.scores) CHECK(v == 0.0);
  for (double v : z.normalized_scores) CHECK(v == 0.0);
}

TEST_CASE("ranking is stable under per-layer rescaling") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const KanNetwork net = init_network({10, 4, 1}, 5, 3, 1);
  for (int t = 0; t < 50; ++t) {
    EdgeScoreMatrix e;
    e.layers.emplace_back(4, 10);
    e.layers.emplace_back(1, 4);
    for (auto& m : e.layers)
      for (double& v : m.values) v = u(rng);
    const auto base = attribution_from_scores(net, e).ranking;
    for (auto& m : e.layers) {
      const double c = 0.01 + 100.0 * u(rng);
      for (double& v : m.values) v *= c;
    }
    CHECK(attribution_from_scores(net, e).ranking == base);
  }
}

TEST_CASE("attribution csv") {
  KanNetwork net = zeroed({10, 1});
  net.layers[0].edge(0, 3).w_b = 2.0;
  const std::string csv = attribution_csv(feature_attribution(net, uniform_samples(20, 10, 3)));
  CHECK(csv.starts_with("feature,score,normalized_score,rank\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

TEST_CASE("export_dot shape counts and syntax") {
  const KanNetwork small = init_network({10, 1}, 5, 3, 1);
  const std::string a = export_dot(small, edge_scores(small, uniform_samples(30, 10, 1)));
  const DotSummary sa = check_dot(a);
  CHECK(sa.ok);
  CHECK(sa.nodes == 11);
  CHECK(sa.edges == 10);

  const KanNetwork deep = init_network({10, 4, 1}, 5, 3, 1);
  const EdgeScoreMatrix es = edge_scores(deep, uniform_samples(30, 10, 1));
  const std::string b = export_dot(deep, es);
  const DotSummary sb = check_dot(b);
  CHECK(sb.ok);
  CHECK(sb.nodes == 15);
  CHECK(sb.edges == 44);
  CHECK(export_dot(deep, es) == b);
  CHECK(b.find("doublecircle") != std::string::npos);
}

TEST_CASE("export_dot matches the golden file") {
  const KanNetwork net = init_network({10, 2, 1}, 3, 2, 5);
  EdgeScoreMatrix e;
  e.layers.emplace_back(2, 10);
  e.layers.emplace_back(1, 2);
  for (std::size_t i = 0; i < 20; ++i) e.layers[0].values[i] = 0.05 * static_cast<double>(i);
  e.layers[1].values = {0.75, 1.5};
  const std::string dot = export_dot(net, e);
  const auto golden = std::filesystem::path(KACDP_GOLDEN_DIR) / "structure_10_2_1.dot";
  if (std::getenv("KACDP_UPDATE_GOLDEN")) testutil::spit(golden, dot);
  CHECK(dot == testutil::slurp(golden));
}

TEST_CASE("decision path") {
  SUBCASE("all-zero network") {
    const KanNetwork net = zeroed({10, 1});
    const Matrix x = uniform_samples(1, 10, 2);
    const DecisionPath d = decision_path(net, x.row(0));
    CHECK(d.logit == 0.0);
    CHECK(d.probability == 0.5);
    REQUIRE(d.edges.size() == 10);
    for (const auto& c : d.edges) {
      CHECK(c.phi == 0.0);
      CHECK(c.share == 0.0);
    }
  }
  SUBCASE("single nonzero edge") {
    KanNetwork net = zeroed({10, 1});
    net.layers[0].edge(0, 3).w_b = 1.0;
    std::vector<double> x(10, 0.5);
    const DecisionPath d = decision_path(net, x);
    CHECK(d.edges[3].share == 1.0);
    CHECK(d.edges[3].phi == silu(0.5));
    CHECK(d.edges[0].share == 0.0);
  }
  SUBCASE("random [10,4,1] re-sums to the trace") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const KanNetwork net = toy::randomized({10, 4, 1}, 5, 3, 40 + seed, 0.5);
      const Matrix x = uniform_samples(1, 10, seed);
      const DecisionPath d = decision_path(net, x.row(0));
      const ForwardTrace t = network_forward(net, x.row(0));
      CHECK(d.logit == t.logit);
      std::size_t at = 0;
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        for (std::size_t q = 0; q < net.layers[l].n_out; ++q) {
          double sum = 0.0;
          double shares = 0.0;
          for (std::size_t p = 0; p < net.layers[l].n_in; ++p, ++at) {
            CHECK(d.edges[at].layer == l);
            CHECK(d.edges[at].q == q);
            CHECK(d.edges[at].p == p);
            sum += d.edges[at].phi;
            shares += d.edges[at].share;
          }
          CHECK(sum == t.node_sums[l][q]);
          CHECK(std::abs(shares - 1.0) < 1e-9);
        }
      }
      const std::string csv = decision_path_csv(d);
      CHECK(csv.starts_with("layer,q,p,input,phi,share,node_sum\n"));
      CHECK(std::count(csv.begin(), csv.end(), '\n') == 45);
      CHECK(decision_path_text(net, d).find("logit=") != std::string::npos);
    }
  }
}

TEST_CASE("activation curves") {
  KanNetwork net = toy::randomized({3, 2, 1}, 4, 3, 5);
  zero_edge(net, 0, 1, 2);
  CHECK_THROWS_AS(sample_activation_curves(net, 1), Error);
  const auto two = sample_activation_curves(net, 2);
  CHECK(two.size() == 2 * 8);
  for (std::size_t i = 0; i < two.size(); i += 2) {
    CHECK(two[i].x == -1.0);
    CHECK(two[i + 1].x == 1.0);
  }
  const auto rows = sample_activation_curves(net, 33);
  CHECK(rows.size() == 33 * 8);
  for (const auto& r : rows) {
    const KanLayer& layer = net.layers[r.layer];
    CHECK(r.phi == edge_forward(layer.edge(r.q, r.p), layer.knots, r.x));
    if (r.layer == 0 && r.q == 1 && r.p == 2) CHECK(r.phi == 0.0);
  }
  const std::string csv = curves_csv(rows);
  CHECK(csv.starts_with("layer,q,p,x,phi\n"));
}
